#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "semhier/hierarchy.hpp"
#include "semhier/random.hpp"
#include "semhier/visual.hpp"

namespace semhier {

class Corpus;

enum class LeafScore { min, product };

struct ClassifyOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    SvmOptions svm;
    // Fixed RBF width. Unset: cross-validate over {1, 1/2, 2} x median distance.
    std::optional<double> sigma;
    double threshold = 0.0;  // margin needed to enter a child during descent
    LeafScore leaf_score = LeafScore::min;
};

// Stand-in for a node whose positive or negative pool is empty.
struct ConstantAccept {};

using NodeModel = std::variant<SvmModel, ConstantAccept>;

// SVM decision value, or +inf for ConstantAccept.
double margin(const NodeModel& model, std::span<const double> x);

struct BalancedSample {
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
};

// Subsamples the larger pool down to the size of the smaller one. Both
// outputs keep the order of their pools.
BalancedSample balanced_sample(const std::vector<std::size_t>& positives, const std::vector<std::size_t>& negatives,
                               Rng& rng);

// Trains on a balanced sample of the given image indices. Sigma is picked by
// k-fold accuracy unless fixed or either class has fewer than `folds` images.
SvmModel fit_balanced(const Corpus& corpus, const std::vector<std::size_t>& positives,
                      const std::vector<std::size_t>& negatives, const ClassifyOptions& options, Rng& rng);

// One-vs-all model per vocabulary concept. Concepts with fewer than `folds`
// positives (or no negatives) are skipped with a warning.
std::map<std::string, SvmModel> train_flat(const Corpus& corpus, const ClassifyOptions& options);

struct NodePools {
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
};

// positives: images carrying any leaf label under the node; negatives: images
// under the parent's other children, minus the positives.
NodePools node_pools(const Corpus& corpus, const Hierarchy& h, std::size_t node);

class HierarchicalClassifier {
public:
    HierarchicalClassifier(Hierarchy h, std::vector<std::optional<NodeModel>> models, ClassifyOptions options);

    const Hierarchy& hierarchy() const { return h_; }
    // Model of a non-root node.
    const NodeModel& model(std::size_t node) const;
    std::size_t model_count() const;

    // Leaf name -> score. Unreached leaves get -inf.
    std::map<std::string, double> infer(std::span<const double> x) const;
    // As infer, also reporting how many nodes were visited.
    std::map<std::string, double> infer(std::span<const double> x, std::size_t& visited) const;

private:
    Hierarchy h_;
    std::vector<std::optional<NodeModel>> models_;
    ClassifyOptions options_;
    std::size_t dim_ = 0;
};

// Throws ValidationError when a hierarchy leaf is not a corpus concept.
HierarchicalClassifier train_hierarchical(const Corpus& corpus, const Hierarchy& h, const ClassifyOptions& options);

struct RankedItem {
    std::string id;
    double score = 0.0;
    bool positive = false;
};

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

// Ranked by descending score, ties by ascending id. Throws ValidationError
// without positives.
double average_precision(std::vector<RankedItem> items);
std::vector<PrPoint> pr_curve(std::vector<RankedItem> items);

struct ConceptEval {
    std::string label;
    double ap = 0.0;
    std::vector<PrPoint> pr;
};

struct EvalReport {
    std::vector<ConceptEval> concepts;
    double mean_ap = 0.0;
    nlohmann::json config;
};

struct Evaluation {
    EvalReport flat;
    EvalReport hierarchical;
    double delta = 0.0;  // hierarchical mean AP - flat mean AP
};

// Scores every test image for every concept with positives in the test set.
// Concepts without a flat model (or missing from the hierarchy) are scored
// as constant reject with a warning.
Evaluation evaluate(const std::map<std::string, SvmModel>& flat, const HierarchicalClassifier& hierarchical,
                    const Corpus& test);

// Seeded permutation; the first floor(size * fraction) images train.
// Throws ValidationError unless both parts are non-empty.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double fraction, std::uint64_t seed);

}  // namespace semhier
