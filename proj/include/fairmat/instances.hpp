#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fairmat/domain.hpp"

namespace fairmat {

struct GalleryEntry {
    std::string id;
    Instance instance;
    std::string notes;
};

namespace detail {

inline Preference pref_of(const std::vector<std::string>& labels, const std::vector<std::string>& order) {
    std::vector<std::size_t> idx;
    for (const auto& l : order) {
        const auto it = std::find(labels.begin(), labels.end(), l);
        if (it == labels.end()) throw UnknownId("unknown item label '" + l + "'");
        idx.push_back(static_cast<std::size_t>(it - labels.begin()));
    }
    return Preference(std::move(idx));
}

/// The printed prefix followed by every other item in index order.
inline Preference pref_with_tail(const std::vector<std::string>& labels, const std::vector<std::string>& prefix) {
    std::vector<std::string> order = prefix;
    for (const auto& l : labels)
        if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
    return pref_of(labels, order);
}

inline ItemSet set_of(const std::vector<std::string>& labels, const std::vector<std::string>& members) {
    ItemSet s;
    for (const auto& l : members) s = s.with(pref_of(labels, {l}).at(0));
    return s;
}

inline Instance make_instance(const std::vector<std::string>& labels, std::vector<Preference> prefs,
                              std::vector<ConstraintFamily> families) {
    Instance inst;
    inst.n = prefs.size();
    inst.items = make_items(labels);
    inst.prefs = std::move(prefs);
    inst.constraints = std::move(families);
    return inst;
}

inline std::vector<std::string> numbered(const std::string& stem, std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= k; ++i) out.push_back(stem + std::to_string(i));
    return out;
}

}  // namespace detail

inline Instance ex1_instance() {
    const std::vector<std::string> labels{"a", "b", "c", "d"};
    const auto family = ConstraintFamily::partition(
        4, {{detail::set_of(labels, {"c", "d"}), 1}, {ItemSet::full(4), 2}});
    const auto pref = detail::pref_of(labels, {"a", "b", "c", "d"});
    return detail::make_instance(labels, {pref, pref}, {family, family});
}

/// Two agents with nested caps; `m` is 5 (the printed matrix) or 7 (the
/// printed item set).
inline Instance ex2_instance(std::size_t m = 5) {
    const auto labels = detail::numbered("e", m);
    const auto f1 = ConstraintFamily::partition(m, {{detail::set_of(labels, {"e1", "e2", "e3", "e5"}), 2}});
    const auto f2 = ConstraintFamily::partition(m, {{detail::set_of(labels, {"e1", "e2", "e3"}), 1}});
    const auto pref = Preference::identity(m);
    return detail::make_instance(labels, {pref, pref}, {f1, f2});
}

inline Instance caution_instance() {
    const std::vector<std::string> labels{"e1", "e2", "e3"};
    const auto family = ConstraintFamily::partition(3, {{detail::set_of(labels, {"e1", "e2"}), 1}});
    return detail::make_instance(
        labels, {detail::pref_of(labels, {"e3", "e2", "e1"}), detail::pref_of(labels, {"e2", "e1", "e3"})},
        {family, family});
}

inline Instance lex_gap_instance() {
    const std::vector<std::string> labels{"e1", "e2", "e3"};
    const auto family =
        ConstraintFamily::explicit_maximal(3, {detail::set_of(labels, {"e1"}), detail::set_of(labels, {"e2", "e3"})});
    return detail::make_instance(labels, {Preference::identity(3)}, {family});
}

/// Single agent over the worked choice-function family.
inline Instance choice_example_instance() {
    const std::vector<std::string> labels{"e1", "e2", "e3", "e4"};
    const auto family =
        ConstraintFamily::partition(4, {{detail::set_of(labels, {"e1", "e3"}), 1}, {ItemSet::full(4), 2}});
    return detail::make_instance(labels, {Preference::identity(4)}, {family});
}

inline Instance thm4_instance() {
    const std::vector<std::string> labels{"e1", "e2", "e3", "e4"};
    const auto f1 = ConstraintFamily::explicit_maximal(
        4, {detail::set_of(labels, {"e1"}), detail::set_of(labels, {"e2"}), detail::set_of(labels, {"e3", "e4"})});
    const auto pref = Preference::identity(4);
    return detail::make_instance(labels, {pref, pref}, {f1, ConstraintFamily::free(4)});
}

namespace detail {

inline Instance thm5_family(std::size_t n, std::size_t last_filler) {
    std::vector<std::string> labels{"a", "b", "c", "d", "e"};
    for (std::size_t k = 6; k <= last_filler; ++k) labels.push_back("o" + std::to_string(k));
    const auto family = ConstraintFamily::partition(labels.size(), {{detail::set_of(labels, {"a", "b", "c"}), 1}});
    std::vector<Preference> prefs{detail::pref_with_tail(labels, {"d", "a", "b", "c", "e"}),
                                  detail::pref_with_tail(labels, {"d", "b", "e", "a", "c"}),
                                  detail::pref_with_tail(labels, {"a", "d", "e", "b", "c"})};
    for (std::size_t i = 4; i <= n; ++i)
        prefs.push_back(detail::pref_with_tail(labels, {"o" + std::to_string(2 * i - 1), "o" + std::to_string(2 * i)}));
    return make_instance(labels, std::move(prefs), std::vector<ConstraintFamily>(n, family));
}

}  // namespace detail

/// n agents over {a,b,c,d,e,o6,…,o2n}; filler agents i ≥ 4 rank o_{2i−1}
/// and o_{2i} first. Unprinted preference tails follow item index order.
inline Instance thm5_general(std::size_t n) {
    if (n < 3) throw BadN("thm5_general needs n >= 3");
    return detail::thm5_family(n, 2 * n);
}

/// Three agents over {a,b,c,d,e}.
inline Instance thm5_instance() { return detail::thm5_family(3, 0); }

/// Two identical agents whose budget is half the total weight: the all-½
/// matrix is feasible iff the weights split evenly.
inline Instance build_partition_reduction(const std::vector<std::int64_t>& a) {
    if (a.empty()) throw InvalidInstance("partition reduction needs at least one value");
    for (auto v : a)
        if (v <= 0) throw InvalidInstance("partition values must be positive");
    const std::size_t k = a.size();
    const auto labels = detail::numbered("e", k);
    const std::int64_t total = std::accumulate(a.begin(), a.end(), std::int64_t{0});
    const auto family = ConstraintFamily::budget(k, a, make_rational(total, 2));
    const auto pref = Preference::identity(k);
    return detail::make_instance(labels, {pref, pref}, {family, family});
}

inline std::vector<std::string> gallery_ids() {
    return {"ex1", "ex2", "ex2-e7", "sec41-caution", "footnote1", "choice-example", "thm4", "thm5",
            "thm5-general-n", "npc"};
}

/// Parameterised ids: "thm5-general-<n>" (default n = 4 for
/// "thm5-general-n") and "npc-<a1,a2,…>" (default 1,2,3 for "npc").
inline GalleryEntry gallery(const std::string& id) {
    if (id == "ex1") return {id, ex1_instance(), "two agents, caps |X∩{c,d}|≤1 and |X|≤2; ex post but not sd-efficient mixtures"};
    if (id == "ex2") return {id, ex2_instance(5), "two agents, heterogeneous nested caps; naive eating causes envy"};
    if (id == "ex2-e7") return {id, ex2_instance(7), "ex2 with the two trailing items e6, e7"};
    if (id == "sec41-caution") return {id, caution_instance(), "envy-constrained welfare LP optimum is sd-dominated"};
    if (id == "footnote1") return {id, lex_gap_instance(), "non-matroid family where lexicographic max fails sd"};
    if (id == "choice-example") return {id, choice_example_instance(), "worked choice function, x = (1/2,1,1,1)"};
    if (id == "thm4") return {id, thm4_instance(), "two agents, identical preferences, non-matroid: no efficient envy-free lottery"};
    if (id == "thm5") return {id, thm5_instance(), "three agents, identical matroid: no efficient envy-free assignment"};
    const std::string general = "thm5-general-";
    if (id.rfind(general, 0) == 0) {
        const std::string tail = id.substr(general.size());
        std::size_t n = 4;
        if (tail != "n") {
            try {
                n = std::stoul(tail);
            } catch (const std::exception&) {
                throw UnknownId("bad agent count in '" + id + "'");
            }
        }
        return {general + std::to_string(n), thm5_general(n), "n-agent extension of thm5"};
    }
    if (id == "npc" || id.rfind("npc-", 0) == 0) {
        std::vector<std::int64_t> values{1, 2, 3};
        if (id != "npc") {
            values.clear();
            std::string list = id.substr(4);
            std::size_t start = 0;
            while (start <= list.size()) {
                const auto comma = list.find(',', start);
                const std::string tok = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                try {
                    values.push_back(std::stoll(tok));
                } catch (const std::exception&) {
                    throw UnknownId("bad value list in '" + id + "'");
                }
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        }
        std::string canonical = "npc-";
        for (std::size_t k = 0; k < values.size(); ++k) canonical += (k ? "," : "") + std::to_string(values[k]);
        return {canonical, build_partition_reduction(values), "two identical budget agents from a PARTITION instance"};
    }
    throw UnknownId("unknown gallery id '" + id + "'");
}

// Random generation ----------------------------------------------------------

enum class FamilyMix { Laminar, Explicit, Mixed };

struct RandomParams {
    std::size_t n = 2;
    std::size_t m = 4;
    FamilyMix families = FamilyMix::Laminar;
    bool identical_preferences = false;
    bool identical_constraints = false;
    std::size_t max_explicit_sets = 4;
};

namespace detail {

inline ConstraintFamily random_laminar(std::size_t m, std::mt19937_64& rng) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Block> blocks;
    std::size_t pos = 0;
    while (pos < m) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(1, m - pos)(rng);
        ItemSet items;
        for (std::size_t k = pos; k < pos + len; ++k) items = items.with(perm[k]);
        pos += len;
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) continue;  // leave uncapped
        blocks.push_back({items, std::uniform_int_distribution<std::size_t>(0, len)(rng)});
        if (len >= 3 && std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
            // Nest a sub-block with a tighter cap.
            auto members = items.items();
            std::shuffle(members.begin(), members.end(), rng);
            const std::size_t sub = std::uniform_int_distribution<std::size_t>(2, len - 1)(rng);
            ItemSet inner;
            for (std::size_t k = 0; k < sub; ++k) inner = inner.with(members[k]);
            blocks.push_back({inner, std::uniform_int_distribution<std::size_t>(0, sub - 1)(rng)});
        }
    }
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0)
        blocks.push_back({ItemSet::full(m), std::uniform_int_distribution<std::size_t>(1, m)(rng)});
    return ConstraintFamily::partition(m, std::move(blocks));
}

inline ConstraintFamily random_explicit(std::size_t m, std::size_t max_sets, std::mt19937_64& rng) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, max_sets))(rng);
    std::vector<ItemSet> sets;
    for (std::size_t t = 0; t < k; ++t)
        sets.emplace_back(std::uniform_int_distribution<std::uint64_t>(0, ItemSet::full(m).bits())(rng));
    std::vector<ItemSet> maximal;
    for (std::size_t a = 0; a < sets.size(); ++a) {
        bool dominated = false;
        for (std::size_t b = 0; b < sets.size() && !dominated; ++b)
            if (a != b && sets[a].subset_of(sets[b]) && (sets[a] != sets[b] || b < a)) dominated = true;
        if (!dominated && !sets[a].empty()) maximal.push_back(sets[a]);
    }
    return ConstraintFamily::explicit_maximal(m, std::move(maximal));
}

inline Preference random_pref(std::size_t m, std::mt19937_64& rng) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    return Preference(std::move(order));
}

}  // namespace detail

/// Deterministic in (params, seed).
inline Instance random_instance(const RandomParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto family = [&]() {
        switch (params.families) {
            case FamilyMix::Laminar: return detail::random_laminar(params.m, rng);
            case FamilyMix::Explicit: return detail::random_explicit(params.m, params.max_explicit_sets, rng);
            case FamilyMix::Mixed: break;
        }
        return std::uniform_int_distribution<int>(0, 1)(rng) == 0
                   ? detail::random_laminar(params.m, rng)
                   : detail::random_explicit(params.m, params.max_explicit_sets, rng);
    };
    Instance inst;
    inst.n = params.n;
    std::vector<std::string> labels;
    for (std::size_t e = 0; e < params.m; ++e) labels.push_back("i" + std::to_string(e));
    inst.items = make_items(labels);
    const Preference shared_pref = detail::random_pref(params.m, rng);
    const ConstraintFamily shared_family = family();
    for (std::size_t i = 0; i < params.n; ++i) {
        inst.prefs.push_back(params.identical_preferences ? shared_pref : detail::random_pref(params.m, rng));
        inst.constraints.push_back(params.identical_constraints ? shared_family : family());
    }
    return inst;
}

}  // namespace fairmat
