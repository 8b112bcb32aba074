#include "semhier/classify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "semhier/corpus.hpp"
#include "semhier/diagnostics.hpp"
#include "semhier/error.hpp"

namespace semhier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Keeps the flat and hierarchical streams apart for the same seed.
constexpr std::uint64_t kHierStream = std::uint64_t{1} << 32;

std::vector<FeatureVector> gather(const Corpus& corpus, const std::vector<std::size_t>& idx) {
    std::vector<FeatureVector> out;
    out.reserve(idx.size());
    for (auto k : idx) out.push_back(corpus.images()[k].features);
    return out;
}

std::vector<std::size_t> members_of(const ImageSet& s) { return s.members(); }

double sigmoid(double x) {
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

double cv_accuracy(const std::vector<FeatureVector>& pos, const std::vector<FeatureVector>& neg, std::size_t folds,
                   const KernelParams& kernel, const SvmOptions& svm) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<FeatureVector> tp, tn, hp, hn;
        for (std::size_t i = 0; i < pos.size(); ++i) (i % folds == f ? hp : tp).push_back(pos[i]);
        for (std::size_t i = 0; i < neg.size(); ++i) (i % folds == f ? hn : tn).push_back(neg[i]);
        SvmModel m;
        try {
            m = train_svm(tp, tn, kernel, svm);
        } catch (const ConvergenceError&) {
            return -1.0;
        }
        for (const auto& x : hp) correct += decision(m, x) > 0.0;
        for (const auto& x : hn) correct += decision(m, x) <= 0.0;
        total += hp.size() + hn.size();
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

// Stable order: descending score, then ascending id.
void rank(std::vector<RankedItem>& items) {
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

std::size_t count_positives(const std::vector<RankedItem>& items) {
    const auto n = static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](auto& i) { return i.positive; }));
    if (n == 0) throw ValidationError("average precision needs at least one positive");
    return n;
}

EvalReport summarize(std::vector<ConceptEval> concepts) {
    EvalReport r;
    double sum = 0.0;
    for (const auto& c : concepts) sum += c.ap;
    r.mean_ap = concepts.empty() ? 0.0 : sum / static_cast<double>(concepts.size());
    r.concepts = std::move(concepts);
    return r;
}

}  // namespace

double margin(const NodeModel& model, std::span<const double> x) {
    if (std::holds_alternative<ConstantAccept>(model)) return kInf;
    return decision(std::get<SvmModel>(model), x);
}

BalancedSample balanced_sample(const std::vector<std::size_t>& positives, const std::vector<std::size_t>& negatives,
                               Rng& rng) {
    const std::size_t m = std::min(positives.size(), negatives.size());
    BalancedSample s;
    s.positives = rng.sample(positives, m);
    s.negatives = rng.sample(negatives, m);
    return s;
}

SvmModel fit_balanced(const Corpus& corpus, const std::vector<std::size_t>& positives,
                      const std::vector<std::size_t>& negatives, const ClassifyOptions& options, Rng& rng) {
    auto sample = balanced_sample(positives, negatives, rng);
    auto pos = gather(corpus, sample.positives);
    auto neg = gather(corpus, sample.negatives);
    if (pos.empty() || neg.empty()) throw ValidationError("cannot train a classifier on an empty class");

    if (options.sigma) return train_svm(pos, neg, KernelParams::with_sigma(*options.sigma), options.svm);

    std::vector<FeatureVector> all = pos;
    all.insert(all.end(), neg.begin(), neg.end());
    const double median = median_pairwise_distance(all);
    double sigma = median;
    if (options.folds >= 2 && pos.size() >= options.folds) {
        rng.shuffle(pos);
        rng.shuffle(neg);
        double best = -2.0;
        for (double scale : {1.0, 0.5, 2.0}) {
            const auto k = KernelParams::with_sigma(median * scale);
            const double acc = cv_accuracy(pos, neg, options.folds, k, options.svm);
            if (acc > best) {
                best = acc;
                sigma = k.sigma;
            }
        }
    }
    return train_svm(pos, neg, KernelParams::with_sigma(sigma), options.svm);
}

std::map<std::string, SvmModel> train_flat(const Corpus& corpus, const ClassifyOptions& options) {
    std::map<std::string, SvmModel> out;
    for (std::size_t ci = 0; ci < corpus.vocabulary().size(); ++ci) {
        const auto& label = corpus.vocabulary()[ci];
        const ImageSet with = corpus.images_with(ci);
        std::vector<std::size_t> pos;
        std::vector<std::size_t> neg;
        for (std::size_t k = 0; k < corpus.size(); ++k) (with.contains(k) ? pos : neg).push_back(k);
        if (pos.size() < options.folds || pos.empty()) {
            warn("concept '" + label + "' has " + std::to_string(pos.size()) + " positive images (fewer than " +
                 std::to_string(options.folds) + " folds); skipped");
            continue;
        }
        if (neg.empty()) {
            warn("concept '" + label + "' labels every image; no flat classifier");
            continue;
        }
        Rng rng(options.seed, ci);
        out.emplace(label, fit_balanced(corpus, pos, neg, options, rng));
    }
    return out;
}

NodePools node_pools(const Corpus& corpus, const Hierarchy& h, std::size_t node) {
    const auto& n = h.node(node);
    if (!n.parent) throw ValidationError("the root has no classifier");

    auto images_under = [&](std::size_t id) {
        ImageSet s(corpus.size());
        for (const auto& leaf : h.leaf_names_under(id)) {
            auto ci = corpus.concept_index(leaf);
            if (!ci) throw ValidationError("hierarchy leaf '" + leaf + "' is not a corpus concept");
            s |= corpus.images_with(*ci);
        }
        return s;
    };

    const ImageSet pos = images_under(node);
    ImageSet others(corpus.size());
    for (auto sibling : h.node(*n.parent).children) {
        if (sibling != node) others |= images_under(sibling);
    }
    NodePools pools;
    pools.positives = members_of(pos);
    for (auto k : others.members()) {
        if (!pos.contains(k)) pools.negatives.push_back(k);
    }
    return pools;
}

HierarchicalClassifier::HierarchicalClassifier(Hierarchy h, std::vector<std::optional<NodeModel>> models,
                                               ClassifyOptions options)
    : h_(std::move(h)), models_(std::move(models)), options_(std::move(options)) {
    if (models_.size() != h_.nodes().size()) throw ValidationError("one model slot per hierarchy node expected");
    for (const auto& n : h_.nodes()) {
        const bool root = n.id == h_.root();
        if (root != !models_[n.id].has_value()) {
            throw ValidationError("every non-root node needs a model and the root none ('" + n.name + "')");
        }
        if (!root && std::holds_alternative<SvmModel>(*models_[n.id])) {
            const auto d = std::get<SvmModel>(*models_[n.id]).dim();
            if (dim_ == 0) dim_ = d;
            if (d != dim_) throw DimensionError("node models differ in feature dimension");
        }
    }
}

const NodeModel& HierarchicalClassifier::model(std::size_t node) const {
    const auto& m = models_.at(node);
    if (!m) throw ValidationError("the root has no classifier");
    return *m;
}

std::size_t HierarchicalClassifier::model_count() const {
    return static_cast<std::size_t>(std::count_if(models_.begin(), models_.end(), [](auto& m) { return m.has_value(); }));
}

std::map<std::string, double> HierarchicalClassifier::infer(std::span<const double> x) const {
    std::size_t visited = 0;
    return infer(x, visited);
}

std::map<std::string, double> HierarchicalClassifier::infer(std::span<const double> x, std::size_t& visited) const {
    if (dim_ != 0 && x.size() != dim_) {
        throw DimensionError("feature vector has " + std::to_string(x.size()) + " entries, expected " +
                             std::to_string(dim_));
    }
    std::map<std::string, double> scores;
    for (auto id : h_.leaves()) scores[h_.node(id).name] = -kInf;

    const bool product = options_.leaf_score == LeafScore::product;
    std::deque<std::pair<std::size_t, double>> queue{{h_.root(), product ? 1.0 : kInf}};
    visited = 0;
    while (!queue.empty()) {
        const auto [id, path] = queue.front();
        queue.pop_front();
        ++visited;
        const auto& n = h_.node(id);
        if (n.children.empty()) {
            scores[n.name] = id == h_.root() ? 0.0 : path;
            continue;
        }
        std::vector<double> margins;
        for (auto c : n.children) margins.push_back(margin(*models_[c], x));
        bool any = false;
        for (std::size_t k = 0; k < n.children.size(); ++k) {
            if (margins[k] > options_.threshold) {
                any = true;
                const double s = product ? path * sigmoid(margins[k]) : std::min(path, margins[k]);
                queue.emplace_back(n.children[k], s);
            }
        }
        if (!any) {
            const auto k = static_cast<std::size_t>(std::max_element(margins.begin(), margins.end()) - margins.begin());
            const double s = product ? path * sigmoid(margins[k]) : std::min(path, margins[k]);
            queue.emplace_back(n.children[k], s);
        }
    }
    return scores;
}

HierarchicalClassifier train_hierarchical(const Corpus& corpus, const Hierarchy& h, const ClassifyOptions& options) {
    std::vector<std::optional<NodeModel>> models(h.nodes().size());
    for (const auto& n : h.nodes()) {
        if (n.id == h.root()) continue;
        const auto pools = node_pools(corpus, h, n.id);
        if (pools.positives.empty() || pools.negatives.empty()) {
            warn("node '" + n.name + "' has an empty " + (pools.positives.empty() ? "positive" : "negative") +
                 " pool; using constant accept");
            models[n.id] = ConstantAccept{};
            continue;
        }
        Rng rng(options.seed, kHierStream + n.id);
        models[n.id] = fit_balanced(corpus, pools.positives, pools.negatives, options, rng);
    }
    return HierarchicalClassifier(h, std::move(models), options);
}

double average_precision(std::vector<RankedItem> items) {
    const auto positives = count_positives(items);
    rank(items);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (!items[k].positive) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
    return sum / static_cast<double>(positives);
}

std::vector<PrPoint> pr_curve(std::vector<RankedItem> items) {
    const auto positives = count_positives(items);
    rank(items);
    std::vector<PrPoint> out;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        hits += items[k].positive;
        out.push_back({static_cast<double>(hits) / static_cast<double>(positives),
                       static_cast<double>(hits) / static_cast<double>(k + 1)});
    }
    return out;
}

Evaluation evaluate(const std::map<std::string, SvmModel>& flat, const HierarchicalClassifier& hierarchical,
                    const Corpus& test) {
    const auto& images = test.images();
    std::vector<std::map<std::string, double>> hier_scores;
    hier_scores.reserve(images.size());
    for (const auto& img : images) hier_scores.push_back(hierarchical.infer(img.features));

    const auto leaves = hierarchical.hierarchy().leaf_names();
    const std::set<std::string> leaf_set(leaves.begin(), leaves.end());

    std::vector<ConceptEval> flat_evals;
    std::vector<ConceptEval> hier_evals;
    for (std::size_t ci = 0; ci < test.vocabulary().size(); ++ci) {
        const auto& label = test.vocabulary()[ci];
        const ImageSet with = test.images_with(ci);
        if (with.count() == 0) continue;

        const auto model = flat.find(label);
        if (model == flat.end()) warn("no flat classifier for '" + label + "'; scoring as constant reject");
        const bool in_tree = leaf_set.count(label) > 0;
        if (!in_tree) warn("'" + label + "' is not a hierarchy leaf; scoring as constant reject");

        std::vector<RankedItem> f;
        std::vector<RankedItem> hs;
        for (std::size_t k = 0; k < images.size(); ++k) {
            const bool pos = with.contains(k);
            f.push_back({images[k].id, model == flat.end() ? -kInf : decision(model->second, images[k].features), pos});
            hs.push_back({images[k].id, in_tree ? hier_scores[k].at(label) : -kInf, pos});
        }
        flat_evals.push_back({label, average_precision(f), pr_curve(f)});
        hier_evals.push_back({label, average_precision(hs), pr_curve(hs)});
    }

    Evaluation e;
    e.flat = summarize(std::move(flat_evals));
    e.hierarchical = summarize(std::move(hier_evals));
    e.delta = e.hierarchical.mean_ap - e.flat.mean_ap;
    return e;
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split fraction must lie in (0, 1)");
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(corpus.size()) * fraction));
    if (cut == 0 || cut == corpus.size()) throw ValidationError("split leaves one side empty");
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {corpus.subset(train), corpus.subset(test)};
}

}  // namespace semhier
