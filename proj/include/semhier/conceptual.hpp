#pragma once

#include <string>
#include <vector>

#include "semhier/lexicon.hpp"

namespace semhier {

// How two expanded gloss sets are compared.
//  aligned:   slot k of one set against slot k of the other, averaged over
//             the five slots; stays in [0,1].
//  all_pairs: every slot against every slot, divided by the slot count, as
//             the formula is literally printed; may exceed 1.
enum class GlossMatch { aligned, all_pairs };

struct SensePair {
    std::string sense_a;
    std::string sense_b;
    double score = 0.0;
};

// u.v / (|u||v|); 0 when either vector is empty.
double cosine(const GlossVector& u, const GlossVector& v);

double synset_similarity(const Lexicon& lexicon, const std::string& a, const std::string& b,
                         GlossMatch match = GlossMatch::aligned);

// Max synset similarity over the cartesian product of two candidate lists.
// Ties keep the first pair in (a-major, b-minor) order.
SensePair best_sense_pair(const Lexicon& lexicon, const std::vector<std::string>& senses_a,
                          const std::vector<std::string>& senses_b, GlossMatch match = GlossMatch::aligned);

// Disambiguated similarity of two concept names. Throws UnknownConceptError.
SensePair conceptual_similarity(const Lexicon& lexicon, const std::string& ci, const std::string& cj,
                                GlossMatch match = GlossMatch::aligned);

}  // namespace semhier
