#include "semhier/visual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "semhier/corpus.hpp"
#include "semhier/diagnostics.hpp"
#include "semhier/error.hpp"
#include "semhier/random.hpp"

namespace semhier {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DimensionError("feature dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

KernelParams KernelParams::with_sigma(double sigma) {
    if (!std::isfinite(sigma) || sigma <= 0.0) {
        throw ValidationError("RBF sigma must be a positive finite number");
    }
    return KernelParams{sigma};
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    require_same_dim(x.size(), y.size());
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, const KernelParams& k) {
    return std::exp(-squared_distance(x, y) / (k.sigma * k.sigma));
}

SvmModel train_svm(const std::vector<FeatureVector>& positives, const std::vector<FeatureVector>& negatives,
                   const KernelParams& kernel, const SvmOptions& options) {
    if (positives.empty() || negatives.empty()) {
        throw ValidationError("SVM training needs at least one positive and one negative example");
    }
    if (!(options.c > 0.0) || !(options.tol > 0.0)) throw ValidationError("SVM C and tol must be positive");
    const std::size_t dim = positives.front().size();

    std::vector<const FeatureVector*> x;
    std::vector<int> y;
    for (const auto& p : positives) {
        require_same_dim(dim, p.size());
        x.push_back(&p);
        y.push_back(+1);
    }
    for (const auto& q : negatives) {
        require_same_dim(dim, q.size());
        x.push_back(&q);
        y.push_back(-1);
    }
    const std::size_t n = x.size();

    std::vector<double> gram(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        gram[i * n + i] = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            const double v = rbf_kernel(*x[i], *x[j], kernel);
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }
    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * gram[i * n + j]; };

    const double c = options.c;
    constexpr double tau = 1e-12;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a

    auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0.0); };
    auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < c); };

    std::size_t iter = 0;
    for (;;) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i == n || j == n || gmax - gmin < options.tol) break;
        if (iter++ >= options.max_iter) {
            throw ConvergenceError("SMO did not converge within " + std::to_string(options.max_iter) +
                                       " iterations (KKT violation " + format17(gmax - gmin) + ")",
                                   gmax - gmin);
        }

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(i, t) * di + q(j, t) * dj;
    }

    // Threshold: average over free vectors, else midpoint of the feasible range.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    SvmModel model;
    model.kernel = kernel;
    model.bias = -rho;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_vectors.push_back(*x[t]);
            model.alphas.push_back(alpha[t]);
            model.labels.push_back(y[t]);
        }
    }
    return model;
}

double decision(const SvmModel& model, std::span<const double> x) {
    if (!model.support_vectors.empty()) require_same_dim(model.dim(), x.size());
    double s = model.bias;
    for (std::size_t k = 0; k < model.support_vectors.size(); ++k) {
        s += model.alphas[k] * model.labels[k] * rbf_kernel(model.support_vectors[k], x, model.kernel);
    }
    return s;
}

ConceptCentroid centroid(const SvmModel& model, const std::string& label) {
    ConceptCentroid out{label, FeatureVector(model.dim(), 0.0)};
    std::size_t count = 0;
    for (std::size_t k = 0; k < model.support_vectors.size(); ++k) {
        if (model.labels[k] <= 0) continue;
        ++count;
        for (std::size_t d = 0; d < out.vector.size(); ++d) out.vector[d] += model.support_vectors[k][d];
    }
    if (count == 0) throw ValidationError("model for '" + label + "' has no positive support vectors");
    for (double& v : out.vector) v /= static_cast<double>(count);
    return out;
}

double visual_similarity(std::span<const double> a, std::span<const double> b) {
    return 1.0 / (1.0 + std::sqrt(squared_distance(a, b)));
}

double visual_similarity(const ConceptCentroid& a, const ConceptCentroid& b) {
    return visual_similarity(a.vector, b.vector);
}

double median_pairwise_distance(const std::vector<FeatureVector>& points) {
    std::vector<double> d;
    d.reserve(points.size() * (points.size() - (points.empty() ? 0 : 1)) / 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) d.push_back(std::sqrt(squared_distance(points[i], points[j])));
    }
    if (d.empty()) return 1.0;
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double m = *mid;
    if (d.size() % 2 == 0) {
        const double lower = *std::max_element(d.begin(), mid);
        m = (m + lower) / 2.0;
    }
    return m > 0.0 ? m : 1.0;
}

// ---------------------------------------------------------------------------
// Model files

std::string dump_svm(const SvmModel& model) {
    std::ostringstream out;
    out << "semhier-svm 1\n";
    out << "sigma " << format17(model.kernel.sigma) << '\n';
    out << "bias " << format17(model.bias) << '\n';
    out << "dim " << model.dim() << '\n';
    out << "count " << model.support_vectors.size() << '\n';
    for (std::size_t k = 0; k < model.support_vectors.size(); ++k) {
        out << model.labels[k] << ' ' << format17(model.alphas[k]);
        for (double v : model.support_vectors[k]) out << ' ' << format17(v);
        out << '\n';
    }
    return out.str();
}

SvmModel parse_svm(const std::string& text) {
    std::istringstream in(text);
    auto expect = [&](const char* key) {
        std::string k;
        if (!(in >> k) || k != key) throw ParseError(std::string("SVM model: expected '") + key + "'");
    };
    int version = 0;
    expect("semhier-svm");
    if (!(in >> version) || version != 1) throw ParseError("SVM model: unsupported version");
    SvmModel m;
    std::size_t dim = 0;
    std::size_t count = 0;
    expect("sigma");
    if (!(in >> m.kernel.sigma)) throw ParseError("SVM model: bad sigma");
    expect("bias");
    if (!(in >> m.bias)) throw ParseError("SVM model: bad bias");
    expect("dim");
    if (!(in >> dim)) throw ParseError("SVM model: bad dim");
    expect("count");
    if (!(in >> count)) throw ParseError("SVM model: bad count");
    for (std::size_t k = 0; k < count; ++k) {
        int label = 0;
        double alpha = 0.0;
        if (!(in >> label >> alpha) || (label != 1 && label != -1)) {
            throw ParseError("SVM model: bad support vector header at row " + std::to_string(k));
        }
        FeatureVector v(dim);
        for (auto& f : v) {
            if (!(in >> f)) throw ParseError("SVM model: truncated support vector at row " + std::to_string(k));
        }
        m.labels.push_back(label);
        m.alphas.push_back(alpha);
        m.support_vectors.push_back(std::move(v));
    }
    KernelParams::with_sigma(m.kernel.sigma);
    return m;
}

void save_svm(const SvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << dump_svm(model);
}

SvmModel load_svm(const std::filesystem::path& path) { return parse_svm(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Corpus-level centroids

std::vector<ConceptCentroid> concept_centroids(const Corpus& corpus, const VisualOptions& options) {
    std::vector<ConceptCentroid> out;
    const auto& images = corpus.images();
    for (std::size_t ci = 0; ci < corpus.vocabulary().size(); ++ci) {
        const std::string& label = corpus.vocabulary()[ci];
        const ImageSet with = corpus.images_with(ci);
        std::vector<std::size_t> pos;
        std::vector<std::size_t> neg;
        for (std::size_t k = 0; k < images.size(); ++k) (with.contains(k) ? pos : neg).push_back(k);

        if (pos.empty()) {
            // Possible on a split that kept the parent vocabulary.
            warn("concept '" + label + "' has no images; using a zero centroid");
            out.push_back({label, FeatureVector(corpus.feature_dim(), 0.0)});
            continue;
        }
        if (neg.empty()) {
            warn("concept '" + label + "' labels every image; centroid is the mean of its images");
            FeatureVector mean(corpus.feature_dim(), 0.0);
            for (auto k : pos) {
                for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += images[k].features[d];
            }
            for (double& v : mean) v /= static_cast<double>(pos.size());
            out.push_back({label, std::move(mean)});
            continue;
        }

        Rng rng(options.seed, ci);
        const std::size_t m = std::min(pos.size(), neg.size());
        pos = rng.sample(pos, m);
        neg = rng.sample(neg, m);

        std::vector<FeatureVector> p;
        std::vector<FeatureVector> q;
        for (auto k : pos) p.push_back(images[k].features);
        for (auto k : neg) q.push_back(images[k].features);

        double sigma = 0.0;
        if (options.sigma) {
            sigma = *options.sigma;
        } else {
            std::vector<FeatureVector> all = p;
            all.insert(all.end(), q.begin(), q.end());
            sigma = median_pairwise_distance(all);
        }
        const SvmModel model = train_svm(p, q, KernelParams::with_sigma(sigma), options.svm);
        out.push_back(centroid(model, label));
    }
    return out;
}

}  // namespace semhier
