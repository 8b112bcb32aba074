#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semhier/fusion.hpp"
#include "semhier/lexicon.hpp"

namespace semhier {

class Corpus;

enum class NodeKind { leaf, inferred, root };

// Which parenthood rule produced a merge.
//  cluster: a node is the closest neighbor of several nodes that are also in
//           its top three; grouped under their LCS, nested when the LCS differ.
//  mutual:  two nodes are each other's closest neighbor.
//  chain:   closest(a) = b and closest(b) = c with c != a.
//  forced:  no rule fired; the globally most similar pair is merged.
enum class Rule { cluster, mutual, chain, forced };

std::string_view rule_name(Rule rule);
Rule parse_rule(std::string_view name);

struct HierarchyNode {
    std::size_t id = 0;
    std::string name;
    std::string synset;
    NodeKind kind = NodeKind::leaf;
    std::vector<std::size_t> children;
    std::optional<std::size_t> parent;
};

// Provenance of one fired (or forced) action during construction.
struct MergeRecord {
    std::size_t iteration = 0;
    Rule rule = Rule::mutual;
    double phi = 0.0;
    std::vector<std::string> members;  // active nodes consumed
    std::vector<std::string> created;  // new nodes, bottom-up
};

// Rooted tree whose leaves are the corpus concepts.
class Hierarchy {
public:
    // Computes parent links and checks the tree invariants: a single root,
    // every node reachable, one parent per non-root node, unique names.
    // Throws ValidationError.
    static Hierarchy assemble(std::vector<HierarchyNode> nodes, std::size_t root,
                              std::vector<MergeRecord> merges = {});

    static Hierarchy from_json(const nlohmann::json& doc);

    const std::vector<HierarchyNode>& nodes() const { return nodes_; }
    const HierarchyNode& node(std::size_t id) const { return nodes_.at(id); }
    std::size_t root() const { return root_; }
    const std::vector<MergeRecord>& merges() const { return merges_; }
    std::optional<std::size_t> find(const std::string& name) const;

    std::size_t edge_count() const;
    std::vector<std::size_t> leaves() const;
    std::vector<std::string> leaf_names() const;
    // Leaf names in the subtree of `id` (the node itself when it is a leaf).
    std::vector<std::string> leaf_names_under(std::size_t id) const;
    // Path root -> id, inclusive.
    std::vector<std::size_t> path_from_root(std::size_t id) const;

    nlohmann::json to_json() const;
    std::string to_dot() const;

private:
    std::vector<HierarchyNode> nodes_;
    std::size_t root_ = 0;
    std::vector<MergeRecord> merges_;
};

Hierarchy load_hierarchy(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Rule machinery

// argmax over k != c of phi(c, k); ties go to the lexicographically smaller
// name. Throws ValidationError for a matrix with fewer than two nodes.
std::string closest(const SimilarityMatrix& m, const std::string& c);
std::size_t closest_index(const SimilarityMatrix& m, std::size_t c);

// Up to three highest-phi neighbors of c, descending, ties lexicographic.
std::vector<std::string> hits3(const SimilarityMatrix& m, const std::string& c);
std::vector<std::size_t> hits3_index(const SimilarityMatrix& m, std::size_t c);

// A parent to create. Its children are `members` (currently active nodes)
// plus earlier parents of the same action listed in `sub_parents`.
struct PlannedParent {
    std::string synset;
    std::vector<std::string> members;
    std::vector<std::size_t> sub_parents;
};

struct MergeAction {
    Rule rule = Rule::mutual;
    double phi = 0.0;
    std::vector<std::string> members;
    // Sense fixed for each member when it is attached (inferred nodes keep
    // their own synset).
    std::vector<std::pair<std::string, std::string>> senses;
    std::vector<PlannedParent> parents;  // bottom-up; the last one is the top
};

// Evaluates the cluster, mutual and chain rules in that order over the
// active nodes (`active[i]` describes `m.concepts[i]`). A node joins at most
// one action per call.
std::vector<MergeAction> apply_rules(const SimilarityMatrix& m, const Lexicon& lexicon,
                                     std::span<const ConceptProfile> active,
                                     GlossMatch gloss = GlossMatch::aligned);

// Merge of the globally most similar pair under its LCS.
MergeAction forced_merge(const SimilarityMatrix& m, const Lexicon& lexicon, std::span<const ConceptProfile> active,
                         GlossMatch gloss = GlossMatch::aligned);

struct BuildConfig {
    SimilarityOptions similarity;
};

// Bottom-up construction: rules, materialize parents, recompute and
// renormalize similarities over the new active set, repeat until one node
// remains. A single leaf is its own root.
Hierarchy build_hierarchy(std::span<const ConceptProfile> leaves, std::size_t image_count, const Lexicon& lexicon,
                          const BuildConfig& config);

Hierarchy build_hierarchy(const Corpus& corpus, const Lexicon& lexicon, std::span<const ConceptCentroid> centroids,
                          const BuildConfig& config);

}  // namespace semhier
