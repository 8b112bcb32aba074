#include "semhier/contextual.hpp"

#include <algorithm>
#include <cmath>

#include "semhier/diagnostics.hpp"
#include "semhier/error.hpp"

namespace semhier {

double pmi(const ContextStats& stats, std::size_t i, std::size_t j, PmiMode mode) {
    const double ni = static_cast<double>(stats.count(i));
    const double nj = static_cast<double>(stats.count(j));
    if (ni == 0.0 || nj == 0.0) {
        const auto& name = stats.concepts()[ni == 0.0 ? i : j];
        throw ValidationError("concept '" + name + "' is never observed; PMI undefined");
    }
    const double nij = static_cast<double>(stats.joint(i, j));
    if (nij == 0.0) return 0.0;
    const double total = static_cast<double>(stats.total());
    double rho = std::log(total * nij / (ni * nj));
    if (mode == PmiMode::weighted) rho *= nij / total;
    return std::max(0.0, rho);
}

double pmi(const ContextStats& stats, const std::string& ci, const std::string& cj, PmiMode mode) {
    return pmi(stats, stats.index_of(ci), stats.index_of(cj), mode);
}

ContextualScore contextual_score(const ContextStats& stats, std::size_t i, std::size_t j, PmiMode mode) {
    const double rho = pmi(stats, i, j, mode);
    const std::size_t nmax = std::max(stats.count(i), stats.count(j));
    if (nmax == stats.total()) return {0.0, true};
    if (rho == 0.0) return {0.0, false};
    const double pmax = static_cast<double>(nmax) / static_cast<double>(stats.total());
    return {std::min(1.0, rho / -std::log(pmax)), false};
}

double contextual_similarity(const ContextStats& stats, std::size_t i, std::size_t j, PmiMode mode) {
    const auto s = contextual_score(stats, i, j, mode);
    if (s.degenerate) {
        warn("contextual similarity of '" + stats.concepts()[i] + "' and '" + stats.concepts()[j] +
             "' is degenerate (a concept occurs in every image); using 0");
    }
    return s.value;
}

double contextual_similarity(const ContextStats& stats, const std::string& ci, const std::string& cj,
                             PmiMode mode) {
    return contextual_similarity(stats, stats.index_of(ci), stats.index_of(cj), mode);
}

bool weighted_pmi_recommended(const ContextStats& stats) {
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < stats.concepts().size(); ++i) {
        const auto n = stats.count(i);
        if (n == 0) continue;
        lo = lo == 0 ? n : std::min(lo, n);
        hi = std::max(hi, n);
    }
    return lo > 0 && static_cast<double>(hi) / static_cast<double>(lo) > 10.0;
}

}  // namespace semhier
