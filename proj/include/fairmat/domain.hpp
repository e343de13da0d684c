#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairmat/errors.hpp"
#include "fairmat/guards.hpp"
#include "fairmat/item_set.hpp"
#include "fairmat/rational.hpp"

namespace fairmat {

struct Item {
    std::size_t index = 0;
    std::string label;

    friend bool operator==(const Item&, const Item&) = default;
};

/// Strict preference: `order` lists items best first, `rank` is its inverse.
/// Construction accepts any sequence so that malformed input can be reported
/// by validate_instance instead of throwing.
class Preference {
public:
    Preference() = default;
    explicit Preference(std::vector<std::size_t> order) : order_(std::move(order)) {
        rank_.assign(order_.size(), npos);
        for (std::size_t k = 0; k < order_.size(); ++k)
            if (order_[k] < rank_.size() && rank_[order_[k]] == npos) rank_[order_[k]] = k;
    }

    /// Identity order 0 > 1 > ... > m-1.
    static Preference identity(std::size_t m) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        return Preference(std::move(order));
    }

    const std::vector<std::size_t>& order() const { return order_; }
    std::size_t size() const { return order_.size(); }
    std::size_t rank(std::size_t item) const { return rank_.at(item); }
    std::size_t at(std::size_t position) const { return order_.at(position); }

    bool is_permutation() const {
        return std::none_of(rank_.begin(), rank_.end(), [](std::size_t r) { return r == npos; });
    }

    /// Items weakly preferred to `item` (a prefix of the order).
    ItemSet upper_set(std::size_t item) const {
        ItemSet s;
        for (std::size_t k = 0; k <= rank(item); ++k) s = s.with(order_[k]);
        return s;
    }

    /// Prefix of the first `k` items in preference order.
    ItemSet prefix(std::size_t k) const {
        ItemSet s;
        for (std::size_t t = 0; t < k; ++t) s = s.with(order_[t]);
        return s;
    }

    friend bool operator==(const Preference& a, const Preference& b) { return a.order_ == b.order_; }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order_;
    std::vector<std::size_t> rank_;
};

// Family encodings ---------------------------------------------------------

struct FreeKind {
    friend bool operator==(const FreeKind&, const FreeKind&) = default;
};

struct UniformKind {
    std::size_t capacity = 0;
    friend bool operator==(const UniformKind&, const UniformKind&) = default;
};

struct Block {
    ItemSet items;
    std::size_t cap = 0;
    friend bool operator==(const Block&, const Block&) = default;
};

/// Capacity caps on blocks. Blocks must form a laminar list (pairwise
/// disjoint or nested); items outside every block are uncapped.
struct PartitionKind {
    std::vector<Block> blocks;
    friend bool operator==(const PartitionKind&, const PartitionKind&) = default;
};

struct BudgetKind {
    std::vector<std::int64_t> weights;
    Rational budget;
    friend bool operator==(const BudgetKind&, const BudgetKind&) = default;
};

/// Family given by its maximal members; membership = subset of one of them.
struct ExplicitKind {
    std::vector<ItemSet> maximal_sets;
    friend bool operator==(const ExplicitKind&, const ExplicitKind&) = default;
};

using FamilyKind = std::variant<FreeKind, UniformKind, PartitionKind, BudgetKind, ExplicitKind>;

class ConstraintFamily;

namespace detail {

inline bool blocks_laminar(const std::vector<Block>& blocks) {
    for (std::size_t a = 0; a < blocks.size(); ++a)
        for (std::size_t b = a + 1; b < blocks.size(); ++b) {
            const ItemSet x = blocks[a].items, y = blocks[b].items;
            if ((x & y).empty() || x.subset_of(y) || y.subset_of(x)) continue;
            return false;
        }
    return true;
}

template <typename Member>
bool augmentation_holds(std::size_t m, Member&& member) {
    // Hereditary families: checking pairs with |Y| = |X| + 1 suffices.
    std::vector<ItemSet> feasible;
    for_each_subset(ItemSet::full(m), [&](ItemSet s) {
        if (member(s)) feasible.push_back(s);
    });
    for (ItemSet x : feasible)
        for (ItemSet y : feasible) {
            if (y.size() != x.size() + 1) continue;
            bool augmentable = false;
            for (std::size_t e : (y - x).items())
                if (member(x.with(e))) {
                    augmentable = true;
                    break;
                }
            if (!augmentable) return false;
        }
    return true;
}

}  // namespace detail

/// Hereditary set system over items 0..m-1.
class ConstraintFamily {
public:
    ConstraintFamily() : ConstraintFamily(0, FreeKind{}, true) {}

    static ConstraintFamily free(std::size_t m) { return {m, FreeKind{}, true}; }
    static ConstraintFamily uniform(std::size_t m, std::size_t capacity) { return {m, UniformKind{capacity}, true}; }
    static ConstraintFamily partition(std::size_t m, std::vector<Block> blocks) {
        const bool laminar = detail::blocks_laminar(blocks);
        return {m, PartitionKind{std::move(blocks)}, laminar};
    }
    /// Budget families are never flagged as matroids.
    static ConstraintFamily budget(std::size_t m, std::vector<std::int64_t> weights, Rational budget) {
        return {m, BudgetKind{std::move(weights), std::move(budget)}, false};
    }
    /// The matroid flag is set by the augmentation check when m is within the
    /// family enumeration guard, and false otherwise.
    static ConstraintFamily explicit_maximal(std::size_t m, std::vector<ItemSet> maximal_sets) {
        ConstraintFamily f(m, ExplicitKind{std::move(maximal_sets)}, false);
        if (m <= guards().family_items)
            f.matroid_ = detail::augmentation_holds(m, [&f](ItemSet s) { return f.contains(s); });
        return f;
    }

    std::size_t ground_size() const { return m_; }
    const FamilyKind& kind() const { return kind_; }
    bool is_matroid() const { return matroid_; }

    std::string kind_name() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, FreeKind>) return "free";
                else if constexpr (std::is_same_v<K, UniformKind>) return "uniform";
                else if constexpr (std::is_same_v<K, PartitionKind>) return "partition";
                else if constexpr (std::is_same_v<K, BudgetKind>) return "budget";
                else return "explicit";
            },
            kind_);
    }

    /// Membership oracle.
    bool contains(ItemSet s) const {
        if (!s.subset_of(ItemSet::full(m_))) return false;
        return std::visit(
            [s](const auto& k) -> bool {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, FreeKind>) {
                    return true;
                } else if constexpr (std::is_same_v<K, UniformKind>) {
                    return s.size() <= k.capacity;
                } else if constexpr (std::is_same_v<K, PartitionKind>) {
                    return std::all_of(k.blocks.begin(), k.blocks.end(),
                                       [s](const Block& b) { return (s & b.items).size() <= b.cap; });
                } else if constexpr (std::is_same_v<K, BudgetKind>) {
                    std::int64_t total = 0;
                    for (std::size_t e : s.items()) total += e < k.weights.size() ? k.weights[e] : 0;
                    return Rational(total) <= k.budget;
                } else {
                    if (s.empty()) return true;
                    return std::any_of(k.maximal_sets.begin(), k.maximal_sets.end(),
                                       [s](ItemSet mx) { return s.subset_of(mx); });
                }
            },
            kind_);
    }

    friend bool operator==(const ConstraintFamily& a, const ConstraintFamily& b) {
        return a.m_ == b.m_ && a.kind_ == b.kind_;
    }

private:
    ConstraintFamily(std::size_t m, FamilyKind kind, bool matroid)
        : m_(m), kind_(std::move(kind)), matroid_(matroid) {}

    std::size_t m_ = 0;
    FamilyKind kind_;
    bool matroid_ = true;
};

inline bool membership(const ConstraintFamily& family, ItemSet s) { return family.contains(s); }

/// Largest |Y| over feasible Y ⊆ s, by exhaustive search (any hereditary
/// family).
inline std::size_t max_feasible_subset(const ConstraintFamily& family, ItemSet s) {
    if (family.contains(s)) return s.size();
    require_subset_guard(s.size(), "max_feasible_subset");
    std::size_t best = 0;
    for_each_subset(s, [&](ItemSet y) {
        if (y.size() > best && family.contains(y)) best = y.size();
    });
    return best;
}

struct Instance {
    std::size_t n = 0;
    std::vector<Item> items;
    std::vector<Preference> prefs;
    std::vector<ConstraintFamily> constraints;

    std::size_t m() const { return items.size(); }
    ItemSet ground() const { return ItemSet::full(m()); }

    std::optional<std::size_t> item_index(const std::string& label) const {
        for (const auto& it : items)
            if (it.label == label) return it.index;
        return std::nullopt;
    }

    friend bool operator==(const Instance&, const Instance&) = default;
};

inline std::vector<Item> make_items(const std::vector<std::string>& labels) {
    std::vector<Item> items;
    items.reserve(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) items.push_back({k, labels[k]});
    return items;
}

inline bool identical_preferences(const Instance& inst) {
    return std::all_of(inst.prefs.begin(), inst.prefs.end(),
                       [&](const Preference& p) { return p == inst.prefs.front(); });
}

inline bool identical_constraints(const Instance& inst) {
    return std::all_of(inst.constraints.begin(), inst.constraints.end(),
                       [&](const ConstraintFamily& f) { return f == inst.constraints.front(); });
}

inline bool all_matroids(const Instance& inst) {
    return std::all_of(inst.constraints.begin(), inst.constraints.end(),
                       [](const ConstraintFamily& f) { return f.is_matroid(); });
}

/// n × m matrix of exact rationals.
class FractionalAssignment {
public:
    FractionalAssignment() = default;
    FractionalAssignment(std::size_t n, std::size_t m) : n_(n), m_(m), data_(n * m, Rational(0)) {}

    static FractionalAssignment from_rows(const std::vector<Vector>& rows) {
        const std::size_t m = rows.empty() ? 0 : rows.front().size();
        FractionalAssignment pi(rows.size(), m);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m) throw ParseError("ragged assignment matrix");
            for (std::size_t e = 0; e < m; ++e) pi(i, e) = rows[i][e];
        }
        return pi;
    }

    std::size_t agents() const { return n_; }
    std::size_t items() const { return m_; }

    Rational& operator()(std::size_t i, std::size_t e) { return data_[i * m_ + e]; }
    const Rational& operator()(std::size_t i, std::size_t e) const { return data_[i * m_ + e]; }

    std::span<const Rational> row(std::size_t i) const { return {data_.data() + i * m_, m_}; }
    Vector row_vector(std::size_t i) const { return Vector(row(i).begin(), row(i).end()); }
    void set_row(std::size_t i, const Vector& v) {
        for (std::size_t e = 0; e < m_; ++e) (*this)(i, e) = v[e];
    }

    Rational column_sum(std::size_t e) const {
        Rational s = 0;
        for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, e);
        return s;
    }

    /// Entries in [0,1] and column sums at most 1.
    bool is_substochastic() const {
        for (const auto& x : data_)
            if (x < 0 || x > 1) return false;
        for (std::size_t e = 0; e < m_; ++e)
            if (column_sum(e) > 1) return false;
        return true;
    }

    const std::vector<Rational>& data() const { return data_; }

    friend bool operator==(const FractionalAssignment&, const FractionalAssignment&) = default;

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<Rational> data_;
};

struct DeterministicAssignment {
    std::vector<ItemSet> bundles;

    ItemSet assigned() const {
        ItemSet u;
        for (auto b : bundles) u = u | b;
        return u;
    }

    friend bool operator==(const DeterministicAssignment&, const DeterministicAssignment&) = default;
    friend auto operator<=>(const DeterministicAssignment&, const DeterministicAssignment&) = default;
};

/// True iff bundles are pairwise disjoint and each lies in its agent's family.
inline bool is_deterministic_assignment(const Instance& inst, const DeterministicAssignment& x) {
    if (x.bundles.size() != inst.n) return false;
    ItemSet seen;
    for (std::size_t i = 0; i < inst.n; ++i) {
        if (!(seen & x.bundles[i]).empty()) return false;
        if (!inst.constraints[i].contains(x.bundles[i])) return false;
        seen = seen | x.bundles[i];
    }
    return true;
}

struct LotteryEntry {
    Rational probability;
    DeterministicAssignment assignment;

    friend bool operator==(const LotteryEntry&, const LotteryEntry&) = default;
};

struct Lottery {
    std::vector<LotteryEntry> support;

    static Lottery point_mass(DeterministicAssignment x) { return Lottery{{{Rational(1), std::move(x)}}}; }

    /// Merges duplicate assignments and drops zero-probability entries.
    Lottery normalized() const {
        std::map<DeterministicAssignment, Rational> acc;
        for (const auto& entry : support) acc[entry.assignment] += entry.probability;
        Lottery out;
        for (auto& [x, p] : acc)
            if (p != 0) out.support.push_back({p, x});
        return out;
    }

    friend bool operator==(const Lottery&, const Lottery&) = default;
};

/// π_{ie} = Σ_{X : e ∈ X_i} p_X.
inline FractionalAssignment induced_fractional(const Lottery& lottery, std::size_t n, std::size_t m) {
    FractionalAssignment pi(n, m);
    for (const auto& entry : lottery.support)
        for (std::size_t i = 0; i < n && i < entry.assignment.bundles.size(); ++i)
            for (std::size_t e : entry.assignment.bundles[i].items())
                if (e < m) pi(i, e) += entry.probability;
    return pi;
}

inline FractionalAssignment induced_fractional(const Instance& inst, const Lottery& lottery) {
    return induced_fractional(lottery, inst.n, inst.m());
}

/// Characteristic matrix of a deterministic assignment.
inline FractionalAssignment characteristic(const DeterministicAssignment& x, std::size_t m) {
    return induced_fractional(Lottery::point_mass(x), x.bundles.size(), m);
}

/// Empty vector iff every structural invariant holds.
inline std::vector<std::string> validate_instance(const Instance& inst) {
    std::vector<std::string> out;
    auto report = [&out](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    const std::size_t m = inst.m();
    if (inst.n < 1) report("no agents");
    if (m > ItemSet::max_items) report("too many items");
    for (std::size_t k = 0; k < m; ++k)
        if (inst.items[k].index != k) report("item indices not contiguous");
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (inst.items[a].label == inst.items[b].label) report("item labels not unique");
    if (inst.prefs.size() != inst.n) report("preference count mismatch");
    if (inst.constraints.size() != inst.n) report("constraint count mismatch");
    for (const auto& p : inst.prefs)
        if (p.size() != m || !p.is_permutation()) report("preference not a permutation");
    const ItemSet ground = ItemSet::full(m);
    for (const auto& f : inst.constraints) {
        if (f.ground_size() != m) report("family ground set mismatch");
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, PartitionKind>) {
                    for (const auto& b : k.blocks)
                        if (!b.items.subset_of(ground)) report("block references unknown item");
                    if (!detail::blocks_laminar(k.blocks)) report("blocks not disjoint");
                } else if constexpr (std::is_same_v<K, BudgetKind>) {
                    if (k.weights.size() != m) report("budget weight count mismatch");
                    if (std::any_of(k.weights.begin(), k.weights.end(), [](std::int64_t w) { return w <= 0; }))
                        report("budget weights not positive");
                    if (k.budget < 0) report("budget negative");
                } else if constexpr (std::is_same_v<K, ExplicitKind>) {
                    for (std::size_t a = 0; a < k.maximal_sets.size(); ++a) {
                        if (!k.maximal_sets[a].subset_of(ground)) report("maximal set references unknown item");
                        for (std::size_t b = 0; b < k.maximal_sets.size(); ++b)
                            if (a != b && k.maximal_sets[a].subset_of(k.maximal_sets[b]))
                                report("maximal sets not an antichain");
                    }
                }
            },
            f.kind());
    }
    return out;
}

/// Empty vector iff the lottery is a valid distribution over assignments of
/// `inst`.
inline std::vector<std::string> validate_lottery(const Instance& inst, const Lottery& lottery) {
    std::vector<std::string> out;
    Rational total = 0;
    for (std::size_t k = 0; k < lottery.support.size(); ++k) {
        const auto& entry = lottery.support[k];
        if (entry.probability <= 0) out.push_back("non-positive probability");
        total += entry.probability;
        if (!is_deterministic_assignment(inst, entry.assignment)) out.push_back("support entry is not an assignment");
        for (std::size_t j = 0; j < k; ++j)
            if (lottery.support[j].assignment == entry.assignment) out.push_back("duplicate assignment in support");
    }
    if (total != 1) out.push_back("probabilities do not sum to 1");
    return out;
}

}  // namespace fairmat
