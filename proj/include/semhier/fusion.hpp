#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semhier/conceptual.hpp"
#include "semhier/contextual.hpp"
#include "semhier/image_set.hpp"
#include "semhier/lexicon.hpp"
#include "semhier/matrix.hpp"
#include "semhier/visual.hpp"

namespace semhier {

struct Weights {
    double visual = 0.4;
    double conceptual = 0.3;
    double contextual = 0.3;

    // Throws ValidationError unless all are >= 0 and they sum to 1 (1e-9).
    static Weights make(double visual, double conceptual, double contextual);
};

enum class Channel : std::size_t { visual = 0, conceptual = 1, contextual = 2 };
inline constexpr std::size_t kChannels = 3;

struct MinMaxResult {
    SymMatrix values;
    bool constant = false;  // fewer than two distinct off-diagonal values
};

// (x - min) / (max - min) over off-diagonal entries; diagonal set to 1.
// A constant matrix maps to zeros off the diagonal. Throws ValidationError
// on NaN. Silent variant.
MinMaxResult min_max_scale(const SymMatrix& values);

// As min_max_scale, warning when the input is constant.
SymMatrix min_max_normalize(const SymMatrix& values);

// w1 * visual + w2 * conceptual + w3 * contextual, elementwise.
// Throws DimensionError on shape mismatch.
SymMatrix fuse(const SymMatrix& visual, const SymMatrix& conceptual, const SymMatrix& contextual,
               const Weights& w);

// Everything a node needs to be compared on the three channels. Leaves are
// built from the corpus; inferred hierarchy nodes aggregate their children.
struct ConceptProfile {
    std::string name;
    FeatureVector centroid;
    std::vector<std::string> senses;  // candidate synsets, >= 1
    ImageSet images;                  // images carrying the concept (or a descendant)
};

struct SimilarityOptions {
    Weights weights;
    PmiMode pmi = PmiMode::standard;
    GlossMatch gloss = GlossMatch::aligned;
};

struct SimilarityMatrix {
    std::vector<std::string> concepts;
    std::array<SymMatrix, kChannels> raw;
    std::array<SymMatrix, kChannels> normalized;
    SymMatrix fused;
    std::vector<SensePair> senses;  // row-major n x n; sense_a belongs to the row concept

    std::size_t size() const { return concepts.size(); }
    // Throws UnknownConceptError.
    std::size_t index_of(const std::string& name) const;
    double phi(std::size_t i, std::size_t j) const { return fused(i, j); }
    const SensePair& sense_pair(std::size_t i, std::size_t j) const { return senses[i * size() + j]; }

    // Matrix carrying only the fused channel (for rule tests and tools).
    static SimilarityMatrix from_fused(std::vector<std::string> concepts, SymMatrix fused);
};

// Raw channels, per-channel min-max over the given profiles, then fusion.
// `quiet` suppresses warnings about degenerate channels.
SimilarityMatrix compute_similarity(std::span<const ConceptProfile> profiles, std::size_t image_count,
                                    const Lexicon& lexicon, const SimilarityOptions& options, bool quiet = false);

// Leaf profiles in vocabulary order. Throws UnknownConceptError when a
// concept has no sense in the lexicon and ValidationError when centroids do
// not match the vocabulary.
std::vector<ConceptProfile> leaf_profiles(const Corpus& corpus, const Lexicon& lexicon,
                                          std::span<const ConceptCentroid> centroids);

}  // namespace semhier
