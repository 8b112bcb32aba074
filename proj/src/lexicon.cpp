#include "semhier/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "semhier/corpus.hpp"
#include "semhier/error.hpp"

namespace semhier {

// ---------------------------------------------------------------------------
// GlossVector

GlossVector::GlossVector(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end());
    for (const auto& [w, c] : entries) {
        if (c == 0) continue;
        if (!entries_.empty() && entries_.back().first == w) {
            entries_.back().second += c;
        } else {
            entries_.emplace_back(w, c);
        }
    }
    double sq = 0.0;
    for (const auto& e : entries_) sq += static_cast<double>(e.second) * e.second;
    norm_ = std::sqrt(sq);
}

std::uint64_t GlossVector::total() const {
    std::uint64_t t = 0;
    for (const auto& e : entries_) t += e.second;
    return t;
}

std::uint32_t GlossVector::count(std::uint32_t word) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{word, 0});
    return (it != entries_.end() && it->first == word) ? it->second : 0;
}

GlossVector& GlossVector::operator+=(const GlossVector& other) {
    std::vector<Entry> merged = entries_;
    merged.insert(merged.end(), other.entries_.begin(), other.entries_.end());
    *this = GlossVector(std::move(merged));
    return *this;
}

// ---------------------------------------------------------------------------
// Tokenization

const std::vector<std::string_view>& stop_words() {
    static const std::vector<std::string_view> words = [] {
        std::vector<std::string_view> w = {
            "a",       "about",   "above",  "after",   "again",   "against", "all",     "also",    "am",
            "an",      "and",     "any",    "are",     "as",      "at",      "be",      "because", "been",
            "before",  "being",   "below",  "between", "both",    "but",     "by",      "can",     "could",
            "did",     "do",      "does",   "doing",   "down",    "during",  "each",    "either",  "etc",
            "few",     "for",     "from",   "further", "had",     "has",     "have",    "having",  "he",
            "her",     "here",    "hers",   "herself", "him",     "himself", "his",     "how",     "i",
            "if",      "in",      "into",   "is",      "it",      "its",     "itself",  "just",    "may",
            "me",      "might",   "more",   "most",    "must",    "my",      "myself",  "neither", "no",
            "nor",     "not",     "of",     "off",     "often",   "on",      "once",    "one",     "only",
            "or",      "other",   "our",    "ours",    "out",     "over",    "own",     "same",    "shall",
            "she",     "should",  "so",     "some",    "such",    "than",    "that",    "the",     "their",
            "theirs",  "them",    "then",   "there",   "these",   "they",    "this",    "those",   "through",
            "to",      "too",     "under",  "until",   "up",      "upon",    "usually", "very",    "was",
            "we",      "were",    "what",   "when",    "where",   "whether", "which",   "while",   "who",
            "whom",    "whose",   "why",    "will",    "with",    "within",  "without", "would",   "you",
            "your",    "yours",   "yourself"};
        std::sort(w.begin(), w.end());
        return w;
    }();
    return words;
}

bool is_stop_word(std::string_view token) {
    const auto& w = stop_words();
    return std::binary_search(w.begin(), w.end(), token);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalnum(u)) {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

// ---------------------------------------------------------------------------
// Lexicon

namespace {

// Returns the ids on a hypernym cycle, or empty when the graph is acyclic.
std::vector<std::string> find_cycle(const std::vector<Synset>& synsets,
                                    const std::unordered_map<std::string, std::size_t>& index) {
    enum class Mark { white, grey, black };
    std::vector<Mark> mark(synsets.size(), Mark::white);
    std::vector<std::size_t> stack;

    for (std::size_t start = 0; start < synsets.size(); ++start) {
        if (mark[start] != Mark::white) continue;
        // Iterative DFS; each frame is (node, next hypernym position).
        std::vector<std::pair<std::size_t, std::size_t>> frames{{start, 0}};
        mark[start] = Mark::grey;
        stack.push_back(start);
        while (!frames.empty()) {
            auto& [node, pos] = frames.back();
            const auto& hyper = synsets[node].hypernyms;
            if (pos == hyper.size()) {
                mark[node] = Mark::black;
                stack.pop_back();
                frames.pop_back();
                continue;
            }
            const std::size_t next = index.at(hyper[pos++]);
            if (mark[next] == Mark::grey) {
                auto it = std::find(stack.begin(), stack.end(), next);
                std::vector<std::string> cycle;
                for (; it != stack.end(); ++it) cycle.push_back(synsets[*it].id);
                cycle.push_back(synsets[next].id);
                return cycle;
            }
            if (mark[next] == Mark::white) {
                mark[next] = Mark::grey;
                stack.push_back(next);
                frames.emplace_back(next, 0);
            }
        }
    }
    return {};
}

void append_unique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

}  // namespace

Lexicon Lexicon::build(std::vector<Synset> synsets, std::string root_id,
                       std::map<std::string, std::vector<std::string>> senses) {
    Lexicon lx;
    for (std::size_t i = 0; i < synsets.size(); ++i) {
        if (synsets[i].id.empty()) throw ValidationError("synset with empty id");
        if (!lx.index_.emplace(synsets[i].id, i).second) {
            throw ValidationError("duplicate synset id '" + synsets[i].id + "'");
        }
    }
    if (!lx.index_.count(root_id)) throw ValidationError("root synset '" + root_id + "' does not exist");

    auto check_ref = [&](const std::string& from, const std::string& to, const std::string& what) {
        if (!lx.index_.count(to)) {
            throw ValidationError("synset '" + from + "': " + what + " references unknown synset '" + to + "'");
        }
    };
    for (const auto& s : synsets) {
        for (const auto& h : s.hypernyms) check_ref(s.id, h, "hypernym");
        for (const auto& [rel, ids] : s.related) {
            for (const auto& t : ids) check_ref(s.id, t, "relation '" + rel + "'");
        }
    }
    if (auto cycle = find_cycle(synsets, lx.index_); !cycle.empty()) {
        throw ValidationError("hypernym cycle: " + join(cycle, " -> "));
    }

    for (const auto& [label, ids] : senses) {
        if (ids.empty()) throw ValidationError("concept '" + label + "' has no candidate sense");
        for (const auto& id : ids) {
            if (!lx.index_.count(id)) {
                throw ValidationError("concept '" + label + "': sense references unknown synset '" + id + "'");
            }
        }
    }

    const std::size_t n = synsets.size();

    // Shortest distance to root: BFS from root over inverted hypernym edges.
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& h : synsets[i].hypernyms) children[lx.index_.at(h)].push_back(i);
    }
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    lx.depth_.assign(n, unset);
    std::deque<std::size_t> queue{lx.index_.at(root_id)};
    lx.depth_[queue.front()] = 0;
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto c : children[v]) {
            if (lx.depth_[c] == unset) {
                lx.depth_[c] = lx.depth_[v] + 1;
                queue.push_back(c);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (lx.depth_[i] == unset) {
            throw ValidationError("synset '" + synsets[i].id + "' does not reach root '" + root_id + "'");
        }
    }

    // Relation neighbors used for the expanded gloss set. The part/whole and
    // sub/super-kind relations are closed under inversion.
    lx.neighbors_.assign(n, {});
    auto slot = [](GlossSlot s) { return static_cast<std::size_t>(s); };
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = synsets[i];
        for (const auto& h : s.hypernyms) {
            append_unique(lx.neighbors_[i][slot(GlossSlot::hypernym)], h);
            append_unique(lx.neighbors_[lx.index_.at(h)][slot(GlossSlot::hyponym)], s.id);
        }
        auto rel = [&](const char* name) -> const std::vector<std::string>* {
            auto it = s.related.find(name);
            return it == s.related.end() ? nullptr : &it->second;
        };
        if (auto* v = rel("hyponym")) {
            for (const auto& t : *v) append_unique(lx.neighbors_[i][slot(GlossSlot::hyponym)], t);
        }
        if (auto* v = rel("meronym")) {
            for (const auto& t : *v) {
                append_unique(lx.neighbors_[i][slot(GlossSlot::meronym)], t);
                append_unique(lx.neighbors_[lx.index_.at(t)][slot(GlossSlot::holonym)], s.id);
            }
        }
        if (auto* v = rel("holonym")) {
            for (const auto& t : *v) {
                append_unique(lx.neighbors_[i][slot(GlossSlot::holonym)], t);
                append_unique(lx.neighbors_[lx.index_.at(t)][slot(GlossSlot::meronym)], s.id);
            }
        }
    }
    for (auto& slots : lx.neighbors_) {
        for (auto& v : slots) std::sort(v.begin(), v.end());
    }

    // Word space: every gloss token that is not a stop word, sorted.
    std::set<std::string> words;
    for (const auto& s : synsets) {
        for (const auto& t : s.gloss) {
            if (!is_stop_word(t)) words.insert(t);
        }
    }
    lx.word_space_.assign(words.begin(), words.end());
    for (std::size_t k = 0; k < lx.word_space_.size(); ++k) {
        lx.word_index_.emplace(lx.word_space_[k], static_cast<std::uint32_t>(k));
    }

    lx.synsets_ = std::move(synsets);
    lx.root_ = std::move(root_id);
    lx.senses_ = std::move(senses);

    lx.gloss_vectors_.reserve(n);
    for (const auto& s : lx.synsets_) lx.gloss_vectors_.push_back(lx.vectorize(s.gloss));

    lx.expanded_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& set = lx.expanded_[i];
        set.slots[slot(GlossSlot::self)] = lx.gloss_vectors_[i];
        for (std::size_t k = 1; k < kGlossSlots; ++k) {
            for (const auto& nb : lx.neighbors_[i][k]) set.slots[k] += lx.gloss_vectors_[lx.index_.at(nb)];
        }
    }
    return lx;
}

std::size_t Lexicon::at(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown synset '" + id + "'");
    return it->second;
}

const Synset& Lexicon::synset(const std::string& id) const { return synsets_[at(id)]; }

std::vector<std::string> Lexicon::synset_ids() const {
    std::vector<std::string> ids;
    ids.reserve(synsets_.size());
    for (const auto& s : synsets_) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

const std::vector<std::string>& Lexicon::senses(const std::string& label) const {
    auto it = senses_.find(label);
    if (it == senses_.end()) throw UnknownConceptError("concept '" + label + "' has no sense in the lexicon");
    return it->second;
}

std::size_t Lexicon::depth(const std::string& id) const { return depth_[at(id)]; }

std::unordered_map<std::string, std::size_t> Lexicon::ancestors(const std::string& id) const {
    std::unordered_map<std::string, std::size_t> dist{{id, 0}};
    std::deque<std::size_t> queue{at(id)};
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        const auto d = dist.at(synsets_[v].id);
        for (const auto& h : synsets_[v].hypernyms) {
            if (dist.emplace(h, d + 1).second) queue.push_back(index_.at(h));
        }
    }
    return dist;
}

const std::vector<std::string>& Lexicon::neighbors(const std::string& id, GlossSlot slot) const {
    return neighbors_[at(id)][static_cast<std::size_t>(slot)];
}

const GlossVector& Lexicon::gloss_vector(const std::string& id) const { return gloss_vectors_[at(id)]; }

const ExpandedGlossSet& Lexicon::expanded_gloss_set(const std::string& id) const { return expanded_[at(id)]; }

GlossVector Lexicon::vectorize(const std::vector<std::string>& tokens) const {
    std::vector<GlossVector::Entry> entries;
    for (const auto& t : tokens) {
        auto it = word_index_.find(t);
        if (it != word_index_.end() && !is_stop_word(t)) entries.emplace_back(it->second, 1u);
    }
    return GlossVector(std::move(entries));
}

// ---------------------------------------------------------------------------
// File format

Lexicon parse_lexicon_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("lexicon JSON: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw ParseError("lexicon JSON: expected an object");
        std::vector<Synset> synsets;
        for (const auto& [id, body] : doc.at("synsets").items()) {
            Synset s;
            s.id = id;
            s.lemmas = body.value("lemmas", std::vector<std::string>{});
            s.gloss = tokenize(body.value("gloss", std::string{}));
            s.hypernyms = body.value("hypernyms", std::vector<std::string>{});
            if (body.contains("relations")) {
                s.related = body["relations"].get<std::map<std::string, std::vector<std::string>>>();
            }
            synsets.push_back(std::move(s));
        }
        auto senses = doc.value("senses", std::map<std::string, std::vector<std::string>>{});
        return Lexicon::build(std::move(synsets), doc.at("root").get<std::string>(), std::move(senses));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("lexicon JSON: ") + e.what());
    }
}

Lexicon load_lexicon(const std::filesystem::path& path) { return parse_lexicon_json(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Queries

std::size_t path_len_to_root(const Lexicon& lexicon, const std::string& id) { return lexicon.depth(id); }

std::string lcs_of(const Lexicon& lexicon, const std::vector<std::string>& ids) {
    if (ids.empty()) throw ValidationError("lcs of an empty synset set");
    auto common = lexicon.ancestors(ids.front());
    for (std::size_t k = 1; k < ids.size(); ++k) {
        const auto other = lexicon.ancestors(ids[k]);
        for (auto it = common.begin(); it != common.end();) {
            auto o = other.find(it->first);
            if (o == other.end()) {
                it = common.erase(it);
            } else {
                it->second += o->second;
                ++it;
            }
        }
    }
    // The root is a common ancestor of everything, so `common` is never empty.
    const std::string* best = nullptr;
    std::size_t best_depth = 0;
    std::size_t best_dist = 0;
    for (const auto& [id, dist] : common) {
        const std::size_t d = lexicon.depth(id);
        const bool better = !best || d > best_depth || (d == best_depth && dist < best_dist) ||
                            (d == best_depth && dist == best_dist && id < *best);
        if (better) {
            best = &id;
            best_depth = d;
            best_dist = dist;
        }
    }
    return *best;
}

std::string lcs(const Lexicon& lexicon, const std::string& a, const std::string& b) {
    return lcs_of(lexicon, {a, b});
}

GlossVector gloss_vector(const Lexicon& lexicon, const std::string& id) { return lexicon.gloss_vector(id); }

ExpandedGlossSet expanded_gloss_set(const Lexicon& lexicon, const std::string& id) {
    return lexicon.expanded_gloss_set(id);
}

}  // namespace semhier
