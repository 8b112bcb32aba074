#include "semhier/conceptual.hpp"

#include <algorithm>

namespace semhier {

double cosine(const GlossVector& u, const GlossVector& v) {
    if (u.empty() || v.empty()) return 0.0;
    const auto& a = u.entries();
    const auto& b = v.entries();
    double dot = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (b[j].first < a[i].first) {
            ++j;
        } else {
            dot += static_cast<double>(a[i].second) * b[j].second;
            ++i;
            ++j;
        }
    }
    // Guard against rounding pushing identical vectors a hair above 1.
    return std::min(1.0, dot / (u.norm() * v.norm()));
}

double synset_similarity(const Lexicon& lexicon, const std::string& a, const std::string& b, GlossMatch match) {
    const auto& sa = lexicon.expanded_gloss_set(a);
    const auto& sb = lexicon.expanded_gloss_set(b);
    double sum = 0.0;
    if (match == GlossMatch::aligned) {
        for (std::size_t k = 0; k < kGlossSlots; ++k) sum += cosine(sa.slots[k], sb.slots[k]);
    } else {
        for (const auto& x : sa.slots) {
            for (const auto& y : sb.slots) sum += cosine(x, y);
        }
    }
    return sum / static_cast<double>(kGlossSlots);
}

SensePair best_sense_pair(const Lexicon& lexicon, const std::vector<std::string>& senses_a,
                          const std::vector<std::string>& senses_b, GlossMatch match) {
    SensePair best;
    bool first = true;
    for (const auto& a : senses_a) {
        for (const auto& b : senses_b) {
            const double s = synset_similarity(lexicon, a, b, match);
            if (first || s > best.score) {
                best = {a, b, s};
                first = false;
            }
        }
    }
    return best;
}

SensePair conceptual_similarity(const Lexicon& lexicon, const std::string& ci, const std::string& cj,
                                GlossMatch match) {
    return best_sense_pair(lexicon, lexicon.senses(ci), lexicon.senses(cj), match);
}

}  // namespace semhier
