#pragma once

#include <cstddef>
#include <string>

#include "semhier/corpus.hpp"

namespace semhier {

enum class PmiMode {
    standard,  // log(L n_ij / (n_i n_j))
    weighted,  // P(i,j) log(P(i,j) / (P(i) P(j)))
};

// Clamped (>= 0) pointwise mutual information; 0 when n_ij = 0.
// Throws ValidationError when either concept was never observed.
double pmi(const ContextStats& stats, std::size_t i, std::size_t j, PmiMode mode = PmiMode::standard);
double pmi(const ContextStats& stats, const std::string& ci, const std::string& cj,
           PmiMode mode = PmiMode::standard);

struct ContextualScore {
    double value = 0.0;
    bool degenerate = false;  // a concept occurs in every image: divisor -log 1 = 0
};

// pmi / -log max(P(i), P(j)), in [0,1]. Does not warn.
ContextualScore contextual_score(const ContextStats& stats, std::size_t i, std::size_t j,
                                 PmiMode mode = PmiMode::standard);

// As contextual_score, warning on a degenerate divisor.
double contextual_similarity(const ContextStats& stats, std::size_t i, std::size_t j,
                             PmiMode mode = PmiMode::standard);
double contextual_similarity(const ContextStats& stats, const std::string& ci, const std::string& cj,
                             PmiMode mode = PmiMode::standard);

// True when max n_i / min n_i > 10 over observed concepts, the skew at which
// the weighted variant is worth considering.
bool weighted_pmi_recommended(const ContextStats& stats);

}  // namespace semhier
