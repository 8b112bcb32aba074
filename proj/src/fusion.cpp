#include "semhier/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semhier/corpus.hpp"
#include "semhier/diagnostics.hpp"
#include "semhier/error.hpp"

namespace semhier {

Weights Weights::make(double visual, double conceptual, double contextual) {
    for (double w : {visual, conceptual, contextual}) {
        if (!std::isfinite(w) || w < 0.0) throw ValidationError("weights must be finite and non-negative");
    }
    if (std::abs(visual + conceptual + contextual - 1.0) > 1e-9) {
        throw ValidationError("weights must sum to 1");
    }
    return Weights{visual, conceptual, contextual};
}

MinMaxResult min_max_scale(const SymMatrix& values) {
    const std::size_t n = values.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = values(i, j);
            if (std::isnan(v)) throw ValidationError("similarity matrix contains NaN");
            if (i == j) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    MinMaxResult out{SymMatrix(n, 0.0), false};
    const bool constant = !(hi > lo);
    out.constant = constant;
    for (std::size_t i = 0; i < n; ++i) {
        out.values.set(i, i, 1.0);
        for (std::size_t j = 0; j < i; ++j) {
            out.values.set(i, j, constant ? 0.0 : (values(i, j) - lo) / (hi - lo));
        }
    }
    return out;
}

SymMatrix min_max_normalize(const SymMatrix& values) {
    auto r = min_max_scale(values);
    if (r.constant) warn("min-max normalization of a constant matrix; all off-diagonal entries set to 0");
    return std::move(r.values);
}

SymMatrix fuse(const SymMatrix& visual, const SymMatrix& conceptual, const SymMatrix& contextual,
               const Weights& w) {
    const std::size_t n = visual.size();
    if (conceptual.size() != n || contextual.size() != n) {
        throw DimensionError("fuse: channel matrices differ in size");
    }
    SymMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            out.set(i, j, w.visual * visual(i, j) + w.conceptual * conceptual(i, j) + w.contextual * contextual(i, j));
        }
    }
    return out;
}

std::size_t SimilarityMatrix::index_of(const std::string& name) const {
    auto it = std::find(concepts.begin(), concepts.end(), name);
    if (it == concepts.end()) throw UnknownConceptError("'" + name + "' is not in the similarity matrix");
    return static_cast<std::size_t>(it - concepts.begin());
}

SimilarityMatrix SimilarityMatrix::from_fused(std::vector<std::string> concepts, SymMatrix fused) {
    SimilarityMatrix m;
    const std::size_t n = concepts.size();
    if (fused.size() != n) throw DimensionError("fused matrix size does not match the concept list");
    m.concepts = std::move(concepts);
    for (auto& r : m.raw) r = SymMatrix(n);
    for (auto& r : m.normalized) r = SymMatrix(n);
    m.fused = std::move(fused);
    m.senses.resize(n * n);
    return m;
}

SimilarityMatrix compute_similarity(std::span<const ConceptProfile> profiles, std::size_t image_count,
                                    const Lexicon& lexicon, const SimilarityOptions& options, bool quiet) {
    const std::size_t n = profiles.size();
    SimilarityMatrix m;
    for (const auto& p : profiles) m.concepts.push_back(p.name);
    for (auto& r : m.raw) r = SymMatrix(n);
    m.senses.resize(n * n);

    std::vector<ImageSet> sets;
    for (const auto& p : profiles) sets.push_back(p.images);
    const ContextStats stats(m.concepts, sets, image_count);

    auto& vis = m.raw[static_cast<std::size_t>(Channel::visual)];
    auto& con = m.raw[static_cast<std::size_t>(Channel::conceptual)];
    auto& ctx = m.raw[static_cast<std::size_t>(Channel::contextual)];
    bool degenerate_context = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            vis.set(i, j, visual_similarity(profiles[i].centroid, profiles[j].centroid));

            SensePair sp = best_sense_pair(lexicon, profiles[i].senses, profiles[j].senses, options.gloss);
            con.set(i, j, sp.score);
            m.senses[i * n + j] = sp;
            m.senses[j * n + i] = SensePair{sp.sense_b, sp.sense_a, sp.score};

            double g = 0.0;
            if (stats.count(i) > 0 && stats.count(j) > 0) {
                const auto s = contextual_score(stats, i, j, options.pmi);
                degenerate_context |= s.degenerate && i != j;
                g = s.value;
            }
            ctx.set(i, j, g);
        }
    }
    if (degenerate_context && !quiet) {
        warn("a concept occurs in every image; its contextual similarities are set to 0");
    }

    for (std::size_t c = 0; c < kChannels; ++c) {
        auto r = min_max_scale(m.raw[c]);
        if (r.constant && !quiet && n > 2) {
            static constexpr const char* names[] = {"visual", "conceptual", "contextual"};
            warn(std::string(names[c]) + " channel is constant across pairs; normalized to 0");
        }
        m.normalized[c] = std::move(r.values);
    }
    m.fused = fuse(m.normalized[0], m.normalized[1], m.normalized[2], options.weights);
    return m;
}

std::vector<ConceptProfile> leaf_profiles(const Corpus& corpus, const Lexicon& lexicon,
                                          std::span<const ConceptCentroid> centroids) {
    const auto& vocab = corpus.vocabulary();
    if (centroids.size() != vocab.size()) {
        throw ValidationError("expected one centroid per vocabulary concept");
    }
    std::vector<ConceptProfile> out;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (centroids[i].label != vocab[i]) {
            throw ValidationError("centroid order does not match the vocabulary at '" + vocab[i] + "'");
        }
        out.push_back({vocab[i], centroids[i].vector, lexicon.senses(vocab[i]), corpus.images_with(i)});
    }
    return out;
}

}  // namespace semhier
