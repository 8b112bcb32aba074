#include <algorithm>
#include <numeric>

#include "semhier/error.hpp"
#include "semhier/hierarchy.hpp"

namespace semhier {

namespace {

// True when neighbor a ranks before neighbor b for row c.
bool ranks_before(const SimilarityMatrix& m, std::size_t c, std::size_t a, std::size_t b) {
    const double pa = m.phi(c, a);
    const double pb = m.phi(c, b);
    if (pa != pb) return pa > pb;
    return m.concepts[a] < m.concepts[b];
}

void require_pairable(const SimilarityMatrix& m) {
    if (m.size() < 2) throw ValidationError("closest/hits need at least two active nodes");
}

class RulePlanner {
public:
    RulePlanner(const SimilarityMatrix& m, const Lexicon& lexicon, std::span<const ConceptProfile> active,
                GlossMatch gloss)
        : m_(m), lexicon_(lexicon), active_(active), gloss_(gloss) {
        if (active.size() != m.size()) throw ValidationError("apply_rules: profiles do not match the matrix");
    }

    MergeAction pair(std::size_t a, std::size_t b, Rule rule) const {
        const auto sp = best_sense_pair(lexicon_, active_[a].senses, active_[b].senses, gloss_);
        MergeAction act;
        act.rule = rule;
        act.phi = m_.phi(a, b);
        act.members = {name(a), name(b)};
        act.senses = {{name(a), sp.sense_a}, {name(b), sp.sense_b}};
        act.parents.push_back({lcs(lexicon_, sp.sense_a, sp.sense_b), act.members, {}});
        return act;
    }

    // Hub node plus the nodes that chose it, nested by their LCS with the hub.
    MergeAction cluster(std::size_t hub, const std::vector<std::size_t>& joined) const {
        MergeAction act;
        act.rule = Rule::cluster;
        act.phi = m_.phi(hub, joined.front());

        const std::string hub_sense =
            best_sense_pair(lexicon_, active_[hub].senses, active_[joined.front()].senses, gloss_).sense_a;
        act.members.push_back(name(hub));
        act.senses.emplace_back(name(hub), hub_sense);

        struct Group {
            std::string lcs;
            std::vector<std::size_t> nodes;
            std::vector<std::string> senses;
        };
        std::vector<Group> groups;
        for (auto j : joined) {
            const std::string s = best_sense_pair(lexicon_, {hub_sense}, active_[j].senses, gloss_).sense_b;
            const std::string l = lcs(lexicon_, hub_sense, s);
            act.members.push_back(name(j));
            act.senses.emplace_back(name(j), s);
            auto g = std::find_if(groups.begin(), groups.end(), [&](const Group& x) { return x.lcs == l; });
            if (g == groups.end()) {
                groups.push_back({l, {}, {}});
                g = std::prev(groups.end());
            }
            g->nodes.push_back(j);
            g->senses.push_back(s);
        }
        // Deepest LCS at the bottom, shallower ones stacked above it.
        std::stable_sort(groups.begin(), groups.end(), [&](const Group& a, const Group& b) {
            const auto da = lexicon_.depth(a.lcs);
            const auto db = lexicon_.depth(b.lcs);
            return da != db ? da > db : a.lcs < b.lcs;
        });

        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<std::string> ids = groups[g].senses;
            ids.push_back(g == 0 ? hub_sense : act.parents.back().synset);
            const std::string synset = lcs_of(lexicon_, ids);
            std::vector<std::string> members;
            if (g == 0) members.push_back(name(hub));
            for (auto j : groups[g].nodes) members.push_back(name(j));

            if (g > 0 && synset == act.parents.back().synset) {
                auto& top = act.parents.back().members;
                top.insert(top.end(), members.begin(), members.end());
            } else if (g == 0) {
                act.parents.push_back({synset, std::move(members), {}});
            } else {
                act.parents.push_back({synset, std::move(members), {act.parents.size() - 1}});
            }
        }
        return act;
    }

    // closest(a) = b, closest(b) = c: b and c first, then a on top.
    MergeAction chain(std::size_t a, std::size_t b, std::size_t c) const {
        MergeAction act = pair(b, c, Rule::chain);
        const std::string b_sense = act.senses.front().second;
        const std::string a_sense = best_sense_pair(lexicon_, active_[a].senses, {b_sense}, gloss_).sense_a;
        act.members.insert(act.members.begin(), name(a));
        act.senses.insert(act.senses.begin(), {name(a), a_sense});

        const std::string lower = act.parents.front().synset;
        const std::string upper = lcs(lexicon_, lower, a_sense);
        if (upper == lower) {
            act.parents.front().members.push_back(name(a));
        } else {
            act.parents.push_back({upper, {name(a)}, {0}});
        }
        return act;
    }

    const std::string& name(std::size_t i) const { return m_.concepts[i]; }

private:
    const SimilarityMatrix& m_;
    const Lexicon& lexicon_;
    std::span<const ConceptProfile> active_;
    GlossMatch gloss_;
};

}  // namespace

std::size_t closest_index(const SimilarityMatrix& m, std::size_t c) {
    require_pairable(m);
    std::size_t best = m.size();
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (k == c) continue;
        if (best == m.size() || ranks_before(m, c, k, best)) best = k;
    }
    return best;
}

std::string closest(const SimilarityMatrix& m, const std::string& c) {
    return m.concepts[closest_index(m, m.index_of(c))];
}

std::vector<std::size_t> hits3_index(const SimilarityMatrix& m, std::size_t c) {
    require_pairable(m);
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (k != c) others.push_back(k);
    }
    const std::size_t top = std::min<std::size_t>(3, others.size());
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(top), others.end(),
                      [&](std::size_t a, std::size_t b) { return ranks_before(m, c, a, b); });
    others.resize(top);
    return others;
}

std::vector<std::string> hits3(const SimilarityMatrix& m, const std::string& c) {
    std::vector<std::string> out;
    for (auto k : hits3_index(m, m.index_of(c))) out.push_back(m.concepts[k]);
    return out;
}

std::vector<MergeAction> apply_rules(const SimilarityMatrix& m, const Lexicon& lexicon,
                                     std::span<const ConceptProfile> active, GlossMatch gloss) {
    require_pairable(m);
    const RulePlanner plan(m, lexicon, active, gloss);
    const std::size_t n = m.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return m.concepts[a] < m.concepts[b]; });

    std::vector<std::size_t> near(n);
    std::vector<std::vector<std::size_t>> top(n);
    for (std::size_t i = 0; i < n; ++i) {
        near[i] = closest_index(m, i);
        top[i] = hits3_index(m, i);
    }

    std::vector<bool> used(n, false);
    std::vector<MergeAction> actions;

    for (auto i : order) {
        if (used[i]) continue;
        std::vector<std::size_t> joined;
        for (auto j : top[i]) {
            if (near[j] == i && !used[j]) joined.push_back(j);
        }
        if (joined.size() < 2) continue;
        actions.push_back(plan.cluster(i, joined));
        used[i] = true;
        for (auto j : joined) used[j] = true;
    }

    for (auto i : order) {
        const auto j = near[i];
        if (used[i] || used[j] || near[j] != i) continue;
        actions.push_back(plan.pair(i, j, Rule::mutual));
        used[i] = used[j] = true;
    }

    for (auto i : order) {
        const auto j = near[i];
        const auto k = near[j];
        if (used[i] || used[j] || k == i || used[k]) continue;
        actions.push_back(plan.chain(i, j, k));
        used[i] = used[j] = used[k] = true;
    }
    return actions;
}

MergeAction forced_merge(const SimilarityMatrix& m, const Lexicon& lexicon, std::span<const ConceptProfile> active,
                         GlossMatch gloss) {
    require_pairable(m);
    std::size_t bi = 0;
    std::size_t bj = 1;
    auto key = [&](std::size_t i, std::size_t j) {
        const auto& a = m.concepts[i];
        const auto& b = m.concepts[j];
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            const double p = m.phi(i, j);
            const double best = m.phi(bi, bj);
            if (p > best || (p == best && key(i, j) < key(bi, bj))) {
                bi = i;
                bj = j;
            }
        }
    }
    if (m.concepts[bj] < m.concepts[bi]) std::swap(bi, bj);
    return RulePlanner(m, lexicon, active, gloss).pair(bi, bj, Rule::forced);
}

}  // namespace semhier
