#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "fairmat/domain.hpp"

namespace fairmat {

namespace detail {

/// Forest of nested capacity blocks. Free, Uniform and Partition families
/// all reduce to one of these.
struct LaminarTree {
    struct Node {
        ItemSet items;
        std::size_t cap = 0;
        std::vector<std::size_t> children;
        ItemSet direct;  // items of this block not inside any child
    };
    std::vector<Node> nodes;
    std::vector<std::size_t> roots;
    ItemSet uncovered;

    /// Maximum of y(X) subject to 0 <= y_e <= weight(e) on X and the block
    /// caps, computed bottom-up.
    template <typename Value, typename Weight>
    Value evaluate(ItemSet x, Weight&& weight) const {
        Value total = 0;
        for (std::size_t e : (uncovered & x).items()) total += weight(e);
        for (std::size_t r : roots) total += evaluate_node<Value>(r, x, weight);
        return total;
    }

    /// Blocks containing item e.
    std::vector<std::size_t> enclosing(std::size_t e) const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < nodes.size(); ++k)
            if (nodes[k].items.contains(e)) out.push_back(k);
        return out;
    }

private:
    template <typename Value, typename Weight>
    Value evaluate_node(std::size_t k, ItemSet x, Weight& weight) const {
        const Node& node = nodes[k];
        if ((node.items & x).empty()) return Value(0);
        Value inner = 0;
        for (std::size_t e : (node.direct & x).items()) inner += weight(e);
        for (std::size_t c : node.children) inner += evaluate_node<Value>(c, x, weight);
        const Value cap = Value(node.cap);
        return inner < cap ? inner : cap;
    }
};

inline LaminarTree build_laminar_tree(std::size_t m, std::vector<Block> blocks) {
    // Larger blocks first so that every block's parent precedes it.
    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const Block& a, const Block& b) { return a.items.size() > b.items.size(); });
    LaminarTree tree;
    ItemSet covered;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        tree.nodes.push_back({blocks[k].items, blocks[k].cap, {}, blocks[k].items});
        covered = covered | blocks[k].items;
        std::optional<std::size_t> parent;
        for (std::size_t p = 0; p < k; ++p)
            if (blocks[k].items.subset_of(blocks[p].items) &&
                (!parent || blocks[p].items.size() <= blocks[*parent].items.size()))
                parent = p;
        if (parent) {
            tree.nodes[*parent].children.push_back(k);
            tree.nodes[*parent].direct = tree.nodes[*parent].direct - blocks[k].items;
        } else {
            tree.roots.push_back(k);
        }
    }
    tree.uncovered = ItemSet::full(m) - covered;
    return tree;
}

inline std::optional<LaminarTree> laminar_tree(const ConstraintFamily& family) {
    const std::size_t m = family.ground_size();
    if (std::holds_alternative<FreeKind>(family.kind())) return build_laminar_tree(m, {});
    if (const auto* u = std::get_if<UniformKind>(&family.kind()))
        return build_laminar_tree(m, {{ItemSet::full(m), u->capacity}});
    if (const auto* p = std::get_if<PartitionKind>(&family.kind()))
        if (family.is_matroid()) return build_laminar_tree(m, p->blocks);
    return std::nullopt;
}

}  // namespace detail

/// Rank function of a matroid family with a per-oracle memo. The memo is not
/// synchronized: confine each oracle to one thread.
class RankOracle {
public:
    explicit RankOracle(ConstraintFamily family) : family_(std::move(family)) {
        if (!family_.is_matroid()) throw NotAMatroid();
        tree_ = detail::laminar_tree(family_);
    }

    const ConstraintFamily& family() const { return family_; }
    std::size_t ground_size() const { return family_.ground_size(); }
    ItemSet ground() const { return ItemSet::full(ground_size()); }
    const detail::LaminarTree* laminar() const { return tree_ ? &*tree_ : nullptr; }

    std::size_t rank(ItemSet x) const {
        if (auto it = cache_.find(x.bits()); it != cache_.end()) return it->second;
        std::size_t r = 0;
        if (tree_) {
            r = tree_->evaluate<std::size_t>(x, [](std::size_t) { return std::size_t{1}; });
        } else {
            // Greedy is exact on matroids.
            ItemSet current;
            for (std::size_t e : x.items())
                if (family_.contains(current.with(e))) current = current.with(e);
            r = current.size();
        }
        cache_.emplace(x.bits(), r);
        return r;
    }

private:
    ConstraintFamily family_;
    std::optional<detail::LaminarTree> tree_;
    mutable std::unordered_map<std::uint64_t, std::size_t> cache_;
};

inline std::size_t rank(const RankOracle& oracle, ItemSet x) { return oracle.rank(x); }

/// r^x(X) = min over Y ⊆ X of r(Y) + x(X \ Y): the polymatroid whose
/// independence polytope is conv(F) truncated below x.
class ReducedRank {
public:
    ReducedRank(const RankOracle& oracle, Vector x) : oracle_(&oracle), x_(std::move(x)) {
        if (x_.size() != oracle.ground_size()) throw Error("reduced rank: vector length mismatch");
        for (const auto& v : x_)
            if (v < 0) throw Error("reduced rank: x must be nonnegative");
    }

    const RankOracle& oracle() const { return *oracle_; }
    const Vector& x() const { return x_; }

    Rational x_of(ItemSet s) const {
        Rational total = 0;
        for (std::size_t e : s.items()) total += x_[e];
        return total;
    }

private:
    const RankOracle* oracle_;
    Vector x_;
};

/// Exhaustive minimum over all Y ⊆ X. Used directly for non-laminar
/// matroids and as a test oracle for the laminar closed form.
inline Rational reduced_rank_brute(const ReducedRank& rr, ItemSet x) {
    require_subset_guard(x.size(), "reduced_rank");
    std::optional<Rational> best;
    for_each_subset(x, [&](ItemSet y) {
        Rational v = Rational(rr.oracle().rank(y)) + rr.x_of(x - y);
        if (!best || v < *best) best = std::move(v);
    });
    return *best;
}

inline Rational reduced_rank(const ReducedRank& rr, ItemSet x) {
    if (const auto* tree = rr.oracle().laminar()) {
        const Vector& xv = rr.x();
        return tree->evaluate<Rational>(x, [&xv](std::size_t e) { return xv[e] < 1 ? xv[e] : Rational(1); });
    }
    return reduced_rank_brute(rr, x);
}

/// Lexicographically maximum point of conv(F) truncated below x, built by
/// telescoping r^x along the preference order.
inline Vector choice(const RankOracle& oracle, const Preference& pref, const Vector& x) {
    const ReducedRank rr(oracle, x);
    Vector y(oracle.ground_size(), Rational(0));
    Rational previous = 0;
    ItemSet prefix;
    for (std::size_t e : pref.order()) {
        prefix = prefix.with(e);
        Rational current = reduced_rank(rr, prefix);
        y[e] = current - previous;
        previous = std::move(current);
    }
    return y;
}

/// y ≥ 0 and y(X) ≤ r(X) for every X.
inline bool in_matroid_polytope(const RankOracle& oracle, const Vector& y) {
    for (const auto& v : y)
        if (v < 0) return false;
    if (const auto* tree = oracle.laminar()) {
        for (const auto& v : y)
            if (v > 1) return false;
        for (const auto& node : tree->nodes) {
            Rational total = 0;
            for (std::size_t e : node.items.items()) total += y[e];
            if (total > node.cap) return false;
        }
        return true;
    }
    require_subset_guard(oracle.ground_size(), "in_matroid_polytope");
    bool ok = true;
    for_each_subset(oracle.ground(), [&](ItemSet s) {
        if (!ok) return;
        Rational total = 0;
        for (std::size_t e : s.items()) total += y[e];
        if (total > oracle.rank(s)) ok = false;
    });
    return ok;
}

/// Largest ε with x + ε·χ_e still in conv(F); x must already be in conv(F).
inline Rational eat_capacity(const RankOracle& oracle, const Vector& x, std::size_t e) {
    assert(in_matroid_polytope(oracle, x));
    if (const auto* tree = oracle.laminar()) {
        Rational best = 1 - x[e];
        for (std::size_t k : tree->enclosing(e)) {
            Rational used = 0;
            for (std::size_t f : tree->nodes[k].items.items()) used += x[f];
            Rational slack = Rational(tree->nodes[k].cap) - used;
            if (slack < best) best = std::move(slack);
        }
        return best;
    }
    require_subset_guard(oracle.ground_size(), "eat_capacity");
    std::optional<Rational> best;
    for_each_subset(oracle.ground().without(e), [&](ItemSet y) {
        const ItemSet s = y.with(e);
        Rational v = Rational(oracle.rank(s));
        for (std::size_t f : s.items()) v -= x[f];
        if (!best || v < *best) best = std::move(v);
    });
    return *best;
}

/// y ≥ 0 and y(X) ≤ r^x(X) for every X ⊆ E.
inline bool in_reduced_polytope(const ReducedRank& rr, const Vector& y) {
    const RankOracle& oracle = rr.oracle();
    const std::size_t m = oracle.ground_size();
    if (y.size() != m) return false;
    for (const auto& v : y)
        if (v < 0) return false;
    require_subset_guard(m, "in_reduced_polytope");
    auto y_of = [&y](ItemSet s) {
        Rational total = 0;
        for (std::size_t e : s.items()) total += y[e];
        return total;
    };
    if (oracle.laminar()) {
        bool ok = true;
        for_each_subset(oracle.ground(), [&](ItemSet s) {
            if (ok && y_of(s) > reduced_rank(rr, s)) ok = false;
        });
        return ok;
    }
    // r^x(X) = min(r(X), min_{e∈X} r^x(X−e) + x_e), tabulated over all masks.
    const std::size_t count = std::size_t{1} << m;
    std::vector<Rational> table(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        const ItemSet s(mask);
        Rational best = Rational(oracle.rank(s));
        for (std::size_t e : s.items()) {
            Rational v = table[s.without(e).bits()] + rr.x()[e];
            if (v < best) best = std::move(v);
        }
        if (y_of(s) > best) return false;
        table[mask] = std::move(best);
    }
    return true;
}

/// Standard augmentation axiom (e ∈ Y \ X) over all feasible pairs.
inline bool augmentation_check(const ConstraintFamily& family) {
    require_family_guard(family.ground_size(), "augmentation_check");
    return detail::augmentation_holds(family.ground_size(), [&family](ItemSet s) { return family.contains(s); });
}

}  // namespace fairmat
