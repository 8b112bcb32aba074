#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace semhier {

// Sparse word-count vector over the lexicon's word space.
class GlossVector {
public:
    using Entry = std::pair<std::uint32_t, std::uint32_t>;  // (word index, count)

    GlossVector() = default;
    // Entries with zero count are dropped; duplicates are summed.
    explicit GlossVector(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::uint64_t total() const;
    std::uint32_t count(std::uint32_t word) const;
    double norm() const { return norm_; }

    GlossVector& operator+=(const GlossVector& other);

    bool operator==(const GlossVector& o) const { return entries_ == o.entries_; }

private:
    std::vector<Entry> entries_;  // sorted by word index
    double norm_ = 0.0;
};

// Relation slots of an expanded gloss set, in their fixed order.
enum class GlossSlot : std::size_t { self = 0, hypernym, hyponym, meronym, holonym };
inline constexpr std::size_t kGlossSlots = 5;
inline constexpr std::array<std::string_view, kGlossSlots> kGlossSlotNames = {"self", "hypernym", "hyponym",
                                                                               "meronym", "holonym"};

struct ExpandedGlossSet {
    std::array<GlossVector, kGlossSlots> slots;

    std::size_t size() const { return slots.size(); }
    const GlossVector& operator[](GlossSlot s) const { return slots[static_cast<std::size_t>(s)]; }
};

struct Synset {
    std::string id;
    std::vector<std::string> lemmas;
    std::vector<std::string> gloss;  // lowercase tokens, stop words included
    std::vector<std::string> hypernyms;
    std::map<std::string, std::vector<std::string>> related;
};

// WordNet-lite knowledge source. Immutable after construction.
class Lexicon {
public:
    // Validates references, acyclicity and root reachability, then derives
    // the word space, depths and expanded gloss sets.
    // Throws ValidationError.
    static Lexicon build(std::vector<Synset> synsets, std::string root_id,
                         std::map<std::string, std::vector<std::string>> senses);

    const std::string& root() const { return root_; }
    bool contains(const std::string& id) const { return index_.count(id) != 0; }
    const Synset& synset(const std::string& id) const;
    std::size_t synset_count() const { return synsets_.size(); }
    std::vector<std::string> synset_ids() const;

    // Candidate senses of a concept; throws UnknownConceptError.
    const std::vector<std::string>& senses(const std::string& label) const;
    bool has_concept(const std::string& label) const { return senses_.count(label) != 0; }
    const std::map<std::string, std::vector<std::string>>& all_senses() const { return senses_; }

    const std::vector<std::string>& word_space() const { return word_space_; }

    // Shortest hypernym-edge count to the root.
    std::size_t depth(const std::string& id) const;

    // Every hypernym ancestor of `id` (including itself) with its shortest
    // distance from `id`.
    std::unordered_map<std::string, std::size_t> ancestors(const std::string& id) const;

    // Neighbors of `id` under a gloss slot (hyponym/meronym/holonym include
    // the inverse of the opposite relation).
    const std::vector<std::string>& neighbors(const std::string& id, GlossSlot slot) const;

    const GlossVector& gloss_vector(const std::string& id) const;
    const ExpandedGlossSet& expanded_gloss_set(const std::string& id) const;

    GlossVector vectorize(const std::vector<std::string>& tokens) const;

private:
    Lexicon() = default;
    std::size_t at(const std::string& id) const;

    std::vector<Synset> synsets_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string root_;
    std::map<std::string, std::vector<std::string>> senses_;
    std::vector<std::string> word_space_;
    std::unordered_map<std::string, std::uint32_t> word_index_;
    std::vector<std::size_t> depth_;
    std::vector<std::array<std::vector<std::string>, kGlossSlots>> neighbors_;
    std::vector<GlossVector> gloss_vectors_;
    std::vector<ExpandedGlossSet> expanded_;
};

// Lowercase, split on anything that is not [a-z0-9].
std::vector<std::string> tokenize(std::string_view text);

bool is_stop_word(std::string_view token);
const std::vector<std::string_view>& stop_words();

Lexicon parse_lexicon_json(const std::string& text);
Lexicon load_lexicon(const std::filesystem::path& path);

std::size_t path_len_to_root(const Lexicon& lexicon, const std::string& id);

// Deepest common hypernym ancestor (ancestors include the node itself).
// Ties: smallest combined distance from a and b, then smallest id.
std::string lcs(const Lexicon& lexicon, const std::string& a, const std::string& b);

// Same criterion over any non-empty set of synsets.
std::string lcs_of(const Lexicon& lexicon, const std::vector<std::string>& ids);

GlossVector gloss_vector(const Lexicon& lexicon, const std::string& id);
ExpandedGlossSet expanded_gloss_set(const Lexicon& lexicon, const std::string& id);

}  // namespace semhier
