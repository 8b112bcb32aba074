#include "semhier/hierarchy.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "semhier/corpus.hpp"
#include "semhier/error.hpp"

namespace semhier {

std::string_view rule_name(Rule rule) {
    switch (rule) {
        case Rule::cluster: return "rule1";
        case Rule::mutual: return "rule2";
        case Rule::chain: return "rule3";
        case Rule::forced: return "forced";
    }
    return "unknown";
}

Rule parse_rule(std::string_view name) {
    if (name == "rule1") return Rule::cluster;
    if (name == "rule2") return Rule::mutual;
    if (name == "rule3") return Rule::chain;
    if (name == "forced") return Rule::forced;
    throw ParseError("unknown rule '" + std::string(name) + "'");
}

namespace {

std::string_view kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::leaf: return "leaf";
        case NodeKind::inferred: return "inferred";
        case NodeKind::root: return "root";
    }
    return "leaf";
}

NodeKind parse_kind(const std::string& s) {
    if (s == "leaf") return NodeKind::leaf;
    if (s == "inferred") return NodeKind::inferred;
    if (s == "root") return NodeKind::root;
    throw ParseError("unknown node kind '" + s + "'");
}

}  // namespace

Hierarchy Hierarchy::assemble(std::vector<HierarchyNode> nodes, std::size_t root, std::vector<MergeRecord> merges) {
    if (nodes.empty()) throw ValidationError("hierarchy has no nodes");
    if (root >= nodes.size()) throw ValidationError("root id out of range");

    std::set<std::string> names;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto& n = nodes[i];
        if (n.id != i) throw ValidationError("node ids must be dense and match their position");
        if (!names.insert(n.name).second) throw ValidationError("duplicate node name '" + n.name + "'");
        n.parent.reset();
    }
    for (const auto& n : nodes) {
        for (auto c : n.children) {
            if (c >= nodes.size()) throw ValidationError("child id out of range under '" + n.name + "'");
            if (c == n.id) throw ValidationError("node '" + n.name + "' is its own child");
            if (nodes[c].parent) throw ValidationError("node '" + nodes[c].name + "' has more than one parent");
            nodes[c].parent = n.id;
        }
    }
    if (nodes[root].parent) throw ValidationError("root has a parent");

    std::vector<bool> seen(nodes.size(), false);
    std::vector<std::size_t> stack{root};
    std::size_t reached = 0;
    while (!stack.empty()) {
        const auto id = stack.back();
        stack.pop_back();
        if (seen[id]) throw ValidationError("cycle through '" + nodes[id].name + "'");
        seen[id] = true;
        ++reached;
        for (auto c : nodes[id].children) stack.push_back(c);
    }
    if (reached != nodes.size()) throw ValidationError("some nodes are not reachable from the root");

    for (const auto& n : nodes) {
        if (n.kind == NodeKind::inferred && n.children.size() < 2) {
            throw ValidationError("inferred node '" + n.name + "' has fewer than two children");
        }
        if (n.kind == NodeKind::leaf && !n.children.empty()) {
            throw ValidationError("leaf '" + n.name + "' has children");
        }
        if (n.kind == NodeKind::root && n.id != root) throw ValidationError("second root '" + n.name + "'");
    }

    Hierarchy h;
    h.nodes_ = std::move(nodes);
    h.root_ = root;
    h.merges_ = std::move(merges);
    return h;
}

std::optional<std::size_t> Hierarchy::find(const std::string& name) const {
    for (const auto& n : nodes_) {
        if (n.name == name) return n.id;
    }
    return std::nullopt;
}

std::size_t Hierarchy::edge_count() const {
    std::size_t e = 0;
    for (const auto& n : nodes_) e += n.children.size();
    return e;
}

std::vector<std::size_t> Hierarchy::leaves() const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes_) {
        if (n.children.empty()) out.push_back(n.id);
    }
    return out;
}

std::vector<std::string> Hierarchy::leaf_names() const {
    std::vector<std::string> out;
    for (auto id : leaves()) out.push_back(nodes_[id].name);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Hierarchy::leaf_names_under(std::size_t id) const {
    std::vector<std::string> out;
    std::vector<std::size_t> stack{id};
    while (!stack.empty()) {
        const auto& n = nodes_.at(stack.back());
        stack.pop_back();
        if (n.children.empty()) out.push_back(n.name);
        for (auto c : n.children) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> Hierarchy::path_from_root(std::size_t id) const {
    std::vector<std::size_t> path{id};
    while (nodes_.at(path.back()).parent) path.push_back(*nodes_[path.back()].parent);
    std::reverse(path.begin(), path.end());
    return path;
}

nlohmann::json Hierarchy::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nlohmann::json children = nlohmann::json::array();
        for (auto c : n.children) {
            children.push_back(nodes_[c].name);
            edges.push_back({n.name, nodes_[c].name});
        }
        nodes.push_back({{"id", n.id},
                         {"name", n.name},
                         {"kind", kind_name(n.kind)},
                         {"synset", n.synset},
                         {"children", std::move(children)}});
    }
    nlohmann::json merges = nlohmann::json::array();
    for (const auto& m : merges_) {
        merges.push_back({{"iteration", m.iteration},
                          {"rule", rule_name(m.rule)},
                          {"phi", m.phi},
                          {"members", m.members},
                          {"created", m.created}});
    }
    return {{"root", nodes_[root_].name}, {"nodes", nodes}, {"edges", edges}, {"merges", merges}};
}

Hierarchy Hierarchy::from_json(const nlohmann::json& doc) {
    try {
        std::vector<HierarchyNode> nodes;
        std::map<std::string, std::size_t> ids;
        for (const auto& j : doc.at("nodes")) {
            HierarchyNode n;
            n.id = j.at("id").get<std::size_t>();
            n.name = j.at("name").get<std::string>();
            n.kind = parse_kind(j.at("kind").get<std::string>());
            n.synset = j.value("synset", std::string());
            ids[n.name] = n.id;
            nodes.push_back(std::move(n));
        }
        std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (const auto& j : doc.at("nodes")) {
            auto& n = nodes.at(ids.at(j.at("name").get<std::string>()));
            for (const auto& c : j.at("children")) {
                auto it = ids.find(c.get<std::string>());
                if (it == ids.end()) throw ParseError("unknown child '" + c.get<std::string>() + "'");
                n.children.push_back(it->second);
            }
        }
        auto root = ids.find(doc.at("root").get<std::string>());
        if (root == ids.end()) throw ParseError("root names an unknown node");

        std::vector<MergeRecord> merges;
        for (const auto& j : doc.value("merges", nlohmann::json::array())) {
            MergeRecord m;
            m.iteration = j.at("iteration").get<std::size_t>();
            m.rule = parse_rule(j.at("rule").get<std::string>());
            m.phi = j.at("phi").get<double>();
            m.members = j.at("members").get<std::vector<std::string>>();
            m.created = j.at("created").get<std::vector<std::string>>();
            merges.push_back(std::move(m));
        }
        return assemble(std::move(nodes), root->second, std::move(merges));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("hierarchy json: ") + e.what());
    } catch (const std::out_of_range&) {
        throw ParseError("hierarchy json: node ids are not dense");
    }
}

std::string Hierarchy::to_dot() const {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::ostringstream os;
    os << "digraph hierarchy {\n";
    for (const auto& n : nodes_) {
        const char* shape = n.id == root_ ? "diamond" : n.children.empty() ? "doubleoctagon" : "ellipse";
        os << "  " << quote(n.name) << " [shape=" << shape << "];\n";
    }
    for (const auto& n : nodes_) {
        for (auto c : n.children) os << "  " << quote(n.name) << " -> " << quote(nodes_[c].name) << ";\n";
    }
    os << "}\n";
    return os.str();
}

Hierarchy load_hierarchy(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return Hierarchy::from_json(doc);
}

// ---------------------------------------------------------------------------
// Construction

namespace {

class Builder {
public:
    Builder(std::span<const ConceptProfile> leaves, std::size_t image_count, const Lexicon& lexicon,
            const BuildConfig& config)
        : image_count_(image_count), lexicon_(lexicon), config_(config) {
        for (const auto& p : leaves) {
            if (p.senses.empty()) throw ValidationError("concept '" + p.name + "' has no senses");
            if (by_name_.count(p.name)) throw ValidationError("duplicate concept '" + p.name + "'");
            add_node(p, NodeKind::leaf, "");
            active_.push_back(nodes_.size() - 1);
        }
    }

    Hierarchy run() {
        std::size_t iteration = 0;
        while (active_.size() > 1) {
            ++iteration;
            std::sort(active_.begin(), active_.end(),
                      [&](auto a, auto b) { return nodes_[a].name < nodes_[b].name; });
            std::vector<ConceptProfile> profiles;
            for (auto id : active_) profiles.push_back(profiles_[id]);
            const auto m = compute_similarity(profiles, image_count_, lexicon_, config_.similarity, true);

            auto actions = apply_rules(m, lexicon_, profiles, config_.similarity.gloss);
            if (actions.empty()) actions.push_back(forced_merge(m, lexicon_, profiles, config_.similarity.gloss));
            for (const auto& a : actions) materialize(a, iteration);
        }
        const auto root = active_.front();
        nodes_[root].kind = NodeKind::root;
        if (nodes_[root].synset.empty()) nodes_[root].synset = profiles_[root].senses.front();
        return Hierarchy::assemble(std::move(nodes_), root, std::move(merges_));
    }

private:
    std::size_t add_node(ConceptProfile profile, NodeKind kind, std::string synset) {
        HierarchyNode n;
        n.id = nodes_.size();
        n.name = profile.name;
        n.kind = kind;
        n.synset = std::move(synset);
        by_name_[n.name] = n.id;
        nodes_.push_back(std::move(n));
        profiles_.push_back(std::move(profile));
        return nodes_.size() - 1;
    }

    std::string fresh_name(const std::string& synset) const {
        const auto& lemmas = lexicon_.synset(synset).lemmas;
        const std::string base = lemmas.empty() ? synset : lemmas.front();
        if (!by_name_.count(base)) return base;
        for (std::size_t k = 2;; ++k) {
            auto candidate = base + "_" + std::to_string(k);
            if (!by_name_.count(candidate)) return candidate;
        }
    }

    void materialize(const MergeAction& action, std::size_t iteration) {
        for (const auto& [member, sense] : action.senses) {
            auto& n = nodes_[by_name_.at(member)];
            if (n.kind == NodeKind::leaf) n.synset = sense;
        }

        MergeRecord record{iteration, action.rule, action.phi, action.members, {}};
        std::vector<std::size_t> created;
        for (const auto& planned : action.parents) {
            std::vector<std::size_t> children;
            for (const auto& member : planned.members) children.push_back(by_name_.at(member));
            for (auto k : planned.sub_parents) children.push_back(created.at(k));

            ConceptProfile p;
            p.name = fresh_name(planned.synset);
            p.senses = {planned.synset};
            p.images = ImageSet(image_count_);
            p.centroid.assign(profiles_[children.front()].centroid.size(), 0.0);
            for (auto c : children) {
                const auto& cp = profiles_[c];
                for (std::size_t d = 0; d < p.centroid.size(); ++d) p.centroid[d] += cp.centroid[d];
                p.images |= cp.images;
            }
            for (auto& x : p.centroid) x /= static_cast<double>(children.size());

            const auto id = add_node(std::move(p), NodeKind::inferred, planned.synset);
            nodes_[id].children = std::move(children);
            created.push_back(id);
            record.created.push_back(nodes_[id].name);
        }

        std::set<std::size_t> consumed;
        for (const auto& member : action.members) consumed.insert(by_name_.at(member));
        std::erase_if(active_, [&](auto id) { return consumed.count(id) > 0; });
        active_.push_back(created.back());
        merges_.push_back(std::move(record));
    }

    std::size_t image_count_;
    const Lexicon& lexicon_;
    const BuildConfig& config_;
    std::vector<HierarchyNode> nodes_;
    std::vector<ConceptProfile> profiles_;
    std::map<std::string, std::size_t> by_name_;
    std::vector<std::size_t> active_;
    std::vector<MergeRecord> merges_;
};

}  // namespace

Hierarchy build_hierarchy(std::span<const ConceptProfile> leaves, std::size_t image_count, const Lexicon& lexicon,
                          const BuildConfig& config) {
    if (leaves.empty()) throw ValidationError("cannot build a hierarchy without concepts");
    return Builder(leaves, image_count, lexicon, config).run();
}

Hierarchy build_hierarchy(const Corpus& corpus, const Lexicon& lexicon, std::span<const ConceptCentroid> centroids,
                          const BuildConfig& config) {
    const auto profiles = leaf_profiles(corpus, lexicon, centroids);
    return build_hierarchy(profiles, corpus.size(), lexicon, config);
}

}  // namespace semhier
