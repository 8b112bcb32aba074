#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace semhier {

class Corpus;

using FeatureVector = std::vector<double>;

struct KernelParams {
    double sigma = 1.0;  // RBF width, > 0

    // Throws ValidationError when sigma is not a positive finite number.
    static KernelParams with_sigma(double sigma);
};

struct SvmOptions {
    double c = 10.0;             // soft-margin bound
    double tol = 1e-3;           // maximal KKT violation at convergence
    std::size_t max_iter = 1'000'000;
};

// Trained binary RBF-SVM. Only points with alpha > 0 are kept.
struct SvmModel {
    std::vector<FeatureVector> support_vectors;
    std::vector<double> alphas;
    std::vector<int> labels;  // +1 / -1
    double bias = 0.0;
    KernelParams kernel;

    std::size_t dim() const { return support_vectors.empty() ? 0 : support_vectors.front().size(); }
};

struct ConceptCentroid {
    std::string label;
    FeatureVector vector;
};

// exp(-||x - y||^2 / sigma^2). Throws DimensionError.
double rbf_kernel(std::span<const double> x, std::span<const double> y, const KernelParams& k);

double squared_distance(std::span<const double> x, std::span<const double> y);

// Soft-margin dual solved by SMO with maximal-violating-pair selection.
// Throws ValidationError for empty classes or mixed dimensions and
// ConvergenceError when max_iter is exhausted.
SvmModel train_svm(const std::vector<FeatureVector>& positives, const std::vector<FeatureVector>& negatives,
                   const KernelParams& kernel, const SvmOptions& options = {});

// sum_k alpha_k y_k K(x_k, x) + b
double decision(const SvmModel& model, std::span<const double> x);

// Mean of the positive-class support vectors. Throws ValidationError.
ConceptCentroid centroid(const SvmModel& model, const std::string& label);

// 1 / (1 + euclidean distance)
double visual_similarity(const ConceptCentroid& a, const ConceptCentroid& b);
double visual_similarity(std::span<const double> a, std::span<const double> b);

// Median of pairwise Euclidean distances; 1.0 when there are fewer than two
// points or the median is zero.
double median_pairwise_distance(const std::vector<FeatureVector>& points);

// Text dump with 17 significant digits:
//   semhier-svm 1
//   sigma <v>
//   bias <v>
//   dim <D>
//   count <n>
//   <label> <alpha> <f_0> ... <f_{D-1}>     (n lines)
std::string dump_svm(const SvmModel& model);
SvmModel parse_svm(const std::string& text);
void save_svm(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_svm(const std::filesystem::path& path);

struct VisualOptions {
    std::optional<double> sigma;  // unset: median heuristic on each training sample
    SvmOptions svm;
    std::uint64_t seed = 42;
};

// One-vs-all SVM per vocabulary concept with negatives subsampled to the
// positive count, then the positive-support-vector centroid. A concept that
// labels every image has no negatives; its centroid falls back to the mean of
// its images (with a warning).
std::vector<ConceptCentroid> concept_centroids(const Corpus& corpus, const VisualOptions& options);

}  // namespace semhier
