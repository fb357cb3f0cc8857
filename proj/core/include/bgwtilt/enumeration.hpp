#pragma once

#include "bgwtilt/condition.hpp"
#include "bgwtilt/model.hpp"
#include "bgwtilt/sampling.hpp"
#include "bgwtilt/tree.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace bgwtilt {

struct EnumerationBudgetExceeded : std::runtime_error {
    explicit EnumerationBudgetExceeded(long long budget)
        : std::runtime_error("enumeration node budget (" + std::to_string(budget) +
                             ") exceeded; partial result discarded") {}
};

/// All trees with root type j satisfying Gamma N(T) = g, with their exact
/// unconditioned probabilities w(T) and the partition function Z = sum w.
template <class F>
struct WeightedEnsemble {
    std::vector<std::pair<TypedTree, F>> trees;
    F partition{0};
    int root_type = 0;

    bool empty() const { return trees.empty(); }
    F conditional(std::size_t idx) const { return trees[idx].second / partition; }
};

namespace detail {

template <class F>
std::vector<std::vector<WordProb<F>>> enumeration_laws(const Model<F>& m) {
    if (m.kind() != PgfKind::polynomial)
        throw ModelError("enumeration requires a finite-support model");
    if (m.has_ordered()) return m.ordered;
    std::vector<std::vector<WordProb<F>>> laws;
    for (int i = 0; i < m.num_types; ++i)
        laws.push_back(canonical_ordering(m.pgf[static_cast<std::size_t>(i)].terms));
    return laws;
}

// Arena node used during the recursive construction.
struct EnumNode {
    int parent;
    int type;
    std::vector<int> children;
};

template <class F>
TypedTree arena_to_tree(const std::vector<EnumNode>& arena, int num_types) {
    TypedTree t;
    t.type_counts.assign(static_cast<std::size_t>(num_types), 0);
    std::vector<std::pair<int, int>> stack{{0, -1}};
    while (!stack.empty()) {
        auto [src, parent_dst] = stack.back();
        stack.pop_back();
        int dst = static_cast<int>(t.nodes.size());
        t.nodes.push_back({parent_dst, arena[static_cast<std::size_t>(src)].type, {}});
        ++t.type_counts[static_cast<std::size_t>(arena[static_cast<std::size_t>(src)].type)];
        if (parent_dst >= 0) t.nodes[static_cast<std::size_t>(parent_dst)].children.push_back(dst);
        const auto& ch = arena[static_cast<std::size_t>(src)].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back({*it, dst});
    }
    return t;
}

} // namespace detail

/// Exhaustive enumeration with pruning on the partial condition value
/// (nonnegative rows required: adding vertices never decreases Gamma N).
/// `accept_below` relaxes the equality Gamma N = g to Gamma N <= g, which
/// collects every achievable cell up to the bound in one sweep.
template <class F>
WeightedEnsemble<F> enumerate_conditioned(const Model<F>& m, int root_type, const Condition& cond,
                                          const std::vector<Rational>& g, long long node_budget,
                                          bool accept_below = false) {
    auto laws = detail::enumeration_laws(m);
    IntCondition ic;
    scale_condition(cond, g, ic);
    for (const auto& row : ic.rows)
        for (long long v : row)
            if (v < 0) throw ModelError("enumeration requires nonnegative condition rows");

    const std::size_t L = ic.rows.size();
    WeightedEnsemble<F> out;
    out.root_type = root_type;

    std::vector<detail::EnumNode> arena;
    std::vector<long long> acc(L, 0);
    std::vector<int> open; // nodes awaiting a word, LIFO

    auto add_node = [&](int parent, int type) -> bool {
        for (std::size_t l = 0; l < L; ++l) {
            acc[l] += ic.rows[l][static_cast<std::size_t>(type)];
            if (acc[l] > ic.rhs[l]) {
                // undo this row's partial update before reporting failure
                for (std::size_t r = 0; r <= l; ++r)
                    acc[r] -= ic.rows[r][static_cast<std::size_t>(type)];
                return false;
            }
        }
        arena.push_back({parent, type, {}});
        if (parent >= 0)
            arena[static_cast<std::size_t>(parent)].children.push_back(
                static_cast<int>(arena.size()) - 1);
        return true;
    };
    auto remove_node = [&](int type) {
        int idx = static_cast<int>(arena.size()) - 1;
        int parent = arena[static_cast<std::size_t>(idx)].parent;
        if (parent >= 0) arena[static_cast<std::size_t>(parent)].children.pop_back();
        arena.pop_back();
        for (std::size_t l = 0; l < L; ++l) acc[l] -= ic.rows[l][static_cast<std::size_t>(type)];
    };

    auto rec = [&](auto&& self) -> void {
        if (open.empty()) {
            if (accept_below || acc == ic.rhs) {
                out.trees.emplace_back(detail::arena_to_tree<F>(arena, m.num_types), F(1));
                // weight filled by the caller loop below (probability product)
            }
            return;
        }
        int u = open.back();
        open.pop_back();
        int type = arena[static_cast<std::size_t>(u)].type;
        for (const auto& wp : laws[static_cast<std::size_t>(type)]) {
            if (wp.prob == F(0)) continue;
            if (static_cast<long long>(arena.size() + wp.word.size()) > node_budget)
                throw EnumerationBudgetExceeded(node_budget);
            std::size_t added = 0;
            bool ok = true;
            for (int letter : wp.word) {
                if (!add_node(u, letter)) {
                    ok = false;
                    break;
                }
                ++added;
            }
            if (ok) {
                std::size_t first_child = arena.size() - added;
                for (std::size_t c = 0; c < added; ++c)
                    open.push_back(static_cast<int>(first_child + c));
                self(self);
                for (std::size_t c = 0; c < added; ++c) open.pop_back();
            }
            // rollback children (also on pruned partial adds)
            for (std::size_t c = added; c > 0; --c)
                remove_node(arena.back().type);
        }
        open.push_back(u);
    };

    if (add_node(-1, root_type)) {
        open.push_back(0);
        rec(rec);
    }

    // weights: product of word probabilities along each tree
    for (auto& [tree, w] : out.trees) {
        F prob(1);
        for (const auto& n : tree.nodes) {
            Word word;
            for (int c : n.children) word.push_back(tree.nodes[static_cast<std::size_t>(c)].type);
            bool found = false;
            for (const auto& wp : laws[static_cast<std::size_t>(n.type)])
                if (wp.word == word) {
                    prob = prob * wp.prob;
                    found = true;
                    break;
                }
            if (!found) throw ModelError("enumeration: word missing from law");
        }
        w = prob;
        out.partition = out.partition + prob;
    }
    return out;
}

/// Every tree with gamma-weighted size <= bound (one sweep; used for
/// equivalence bucketing).
template <class F>
WeightedEnsemble<F> enumerate_up_to_weighted_size(const Model<F>& m, int root_type,
                                                  const std::vector<unsigned>& gamma,
                                                  long long bound, long long node_budget) {
    Condition cond = Condition::from_reduced(gamma);
    return enumerate_conditioned(m, root_type, cond, {Rational(bound)}, node_budget,
                                 /*accept_below=*/true);
}

/// Exact distribution of the gamma-weighted size of T^{(j)}, entries 0..bound
/// (defective: the tail mass beyond `bound` and infinite trees are omitted).
/// Independent of the tree enumerator: pure generating-function recursion.
std::vector<std::vector<Rational>> weighted_size_distribution(const RModel& m,
                                                              const std::vector<unsigned>& gamma,
                                                              long long bound);

/// Achievable gamma-weighted sizes per root type, up to `bound`.
std::vector<std::vector<char>> achievable_weighted_sizes(const DModel& m,
                                                         const std::vector<unsigned>& gamma,
                                                         long long bound);

} // namespace bgwtilt
