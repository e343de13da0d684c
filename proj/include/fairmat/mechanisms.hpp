#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairmat/domain.hpp"
#include "fairmat/frank_wolfe.hpp"
#include "fairmat/matroid.hpp"
#include "fairmat/polytope.hpp"
#include "fairmat/sdrel.hpp"
#include "fairmat/verify.hpp"

namespace fairmat {

enum class Guarantee { SdEfficient, SdEnvyFree, SdProportional, Anonymous };

inline const char* to_string(Guarantee g) {
    switch (g) {
        case Guarantee::SdEfficient: return "sd-efficient";
        case Guarantee::SdEnvyFree: return "sd-envy-free";
        case Guarantee::SdProportional: return "sd-proportional";
        case Guarantee::Anonymous: return "anonymous";
    }
    return "?";
}

struct MechanismResult {
    FractionalAssignment pi;
    std::optional<Lottery> lottery;
    std::string mechanism;
    std::vector<std::string> parameters;
    std::vector<Guarantee> guarantees;  // declared, never trusted by tests
};

/// Sd-proportional maximum-weight point of P for two matroid agents.
inline MechanismResult mech_two_agent(const Instance& inst,
                                      const std::optional<FractionalAssignment>& weights = std::nullopt) {
    if (inst.n != 2) throw WrongAgentCount("two-agent mechanism needs exactly 2 agents");
    if (!all_matroids(inst)) throw NotAMatroid();
    const FractionalAssignment w = weights ? *weights : borda_weights(inst);
    const Vector half(inst.m(), make_rational(1, 2));
    std::vector<PiConstraint> rows;
    for (std::size_t i = 0; i < 2; ++i) {
        const Vector target = choice(RankOracle(inst.constraints[i]), inst.prefs[i], half);
        PiConstraint c;
        c.relation = lp::Relation::GreaterEqual;
        c.rhs = 0;
        c.label = "proportionality";
        for (std::size_t e : inst.prefs[i].order()) {
            c.terms.push_back({i, e, Rational(1)});
            c.rhs += target[e];
            rows.push_back(c);
        }
    }
    OptimizeOptions options;
    options.representation = PolytopeP::Representation::HRep;
    const auto res = optimize_over_P(inst, w, rows, options);
    if (res.status != lp::Status::Optimal) throw Error("two-agent LP has no optimum");
    return {res.pi, std::nullopt, "two-agent", {weights ? "weights=custom" : "weights=borda"},
            {Guarantee::SdEfficient, Guarantee::SdEnvyFree, Guarantee::SdProportional}};
}

/// Simultaneous eating of the common preference order under heterogeneous
/// matroid constraints.
inline MechanismResult mech_eating(const Instance& inst) {
    if (!identical_preferences(inst)) throw PreferencesNotIdentical();
    if (!all_matroids(inst)) throw NotAMatroid();
    const std::size_t n = inst.n, m = inst.m();
    std::vector<RankOracle> oracles;
    for (const auto& f : inst.constraints) oracles.emplace_back(f);
    std::vector<Vector> x(n, Vector(m, Rational(0)));
    for (std::size_t e : inst.prefs[0].order()) {
        while (true) {
            std::vector<Rational> eps(n);
            std::vector<std::size_t> eating;
            Rational supply = 0;
            for (std::size_t i = 0; i < n; ++i) {
                eps[i] = eat_capacity(oracles[i], x[i], e);
                if (eps[i] > 0) eating.push_back(i);
                supply += x[i][e];
            }
            if (eating.empty() || supply == 1) break;
            Rational step = (1 - supply) / Rational(static_cast<long long>(eating.size()));
            for (std::size_t i : eating) step = std::min(step, eps[i]);
            for (std::size_t i : eating) x[i][e] += step;
        }
    }
    return {FractionalAssignment::from_rows(x), std::nullopt, "eating", {}, {Guarantee::SdEfficient, Guarantee::SdEnvyFree}};
}

namespace detail {

/// Bundles of `family` partitioning `s`, by backtracking; nullopt if none.
inline std::optional<std::vector<ItemSet>> search_split(const ConstraintFamily& family, std::size_t n, ItemSet s,
                                                        std::size_t& budget) {
    const auto items = s.items();
    std::vector<ItemSet> bundles(n);
    std::function<bool(std::size_t)> place = [&](std::size_t k) {
        if (k == items.size()) return true;
        if (budget == 0) throw EnumerationTooLarge("partitionability search exceeded guard");
        --budget;
        for (std::size_t b = 0; b < n; ++b) {
            const ItemSet grown = bundles[b].with(items[k]);
            if (!family.contains(grown)) continue;
            const ItemSet saved = bundles[b];
            bundles[b] = grown;
            if (place(k + 1)) return true;
            bundles[b] = saved;
            if (saved.empty()) break;  // empty bundles are interchangeable
        }
        return false;
    };
    if (!place(0)) return std::nullopt;
    return bundles;
}

/// Can `s` be split into n bundles of `family`? Matroids use the
/// matroid-union rank test.
inline bool partitionable(const ConstraintFamily& family, std::size_t n, ItemSet s, std::size_t& budget) {
    if (family.is_matroid()) {
        const RankOracle oracle(family);
        bool ok = true;
        for_each_subset(s, [&](ItemSet y) {
            if (ok && y.size() > n * oracle.rank(y)) ok = false;
        });
        return ok;
    }
    return search_split(family, n, s, budget).has_value();
}

}  // namespace detail

/// Lexicographically maximum coverable item set for identical agents, kept
/// greedily along the common preference.
inline ItemSet lex_max_union(const Instance& inst) {
    std::size_t budget = guards().partitions;
    ItemSet kept;
    for (std::size_t e : inst.prefs[0].order())
        if (detail::partitionable(inst.constraints[0], inst.n, kept.with(e), budget)) kept = kept.with(e);
    return kept;
}

/// Uniform lottery over the n cyclic shifts of an assignment covering the
/// lexicographically maximum item set.
inline MechanismResult mech_rotation(const Instance& inst) {
    if (!identical_preferences(inst) || !identical_constraints(inst)) throw NotIdenticalAgents();
    const std::size_t n = inst.n;
    const ItemSet covered = lex_max_union(inst);
    std::size_t budget = guards().partitions;
    const auto star = detail::search_split(inst.constraints[0], n, covered, budget);
    if (!star) throw Error("rotation: covered set is not partitionable");
    Lottery lottery;
    const Rational share = Rational(1) / Rational(static_cast<long long>(n));
    for (std::size_t shift = 0; shift < n; ++shift) {
        DeterministicAssignment x{std::vector<ItemSet>(n)};
        for (std::size_t i = 0; i < n; ++i) x.bundles[i] = (*star)[(i + shift) % n];
        lottery.support.push_back({share, std::move(x)});
    }
    lottery = lottery.normalized();
    return {induced_fractional(inst, lottery), lottery, "rotation", {}, {Guarantee::SdEfficient, Guarantee::SdEnvyFree}};
}

/// Naive generalised probabilistic serial: every agent eats, at unit speed,
/// her best item that still has supply and that she can still absorb.
inline MechanismResult mech_naive_ps(const Instance& inst) {
    if (!all_matroids(inst)) throw NotAMatroid();
    const std::size_t n = inst.n, m = inst.m();
    std::vector<RankOracle> oracles;
    for (const auto& f : inst.constraints) oracles.emplace_back(f);
    std::vector<Vector> x(n, Vector(m, Rational(0)));
    Vector supply(m, Rational(1));
    while (true) {
        std::vector<std::optional<std::size_t>> target(n);
        std::vector<Rational> cap(n);
        std::vector<std::size_t> eaters(m, 0);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e : inst.prefs[i].order()) {
                if (supply[e] <= 0) continue;
                Rational c = eat_capacity(oracles[i], x[i], e);
                if (c <= 0) continue;
                target[i] = e;
                cap[i] = std::move(c);
                ++eaters[e];
                any = true;
                break;
            }
        if (!any) break;
        std::optional<Rational> dt;
        auto lower = [&dt](Rational v) {
            if (!dt || v < *dt) dt = std::move(v);
        };
        for (std::size_t e = 0; e < m; ++e)
            if (eaters[e] > 0) lower(supply[e] / Rational(static_cast<long long>(eaters[e])));
        for (std::size_t i = 0; i < n; ++i)
            if (target[i]) lower(cap[i]);
        for (std::size_t i = 0; i < n; ++i)
            if (target[i]) {
                x[i][*target[i]] += *dt;
                supply[*target[i]] -= *dt;
            }
    }
    return {FractionalAssignment::from_rows(x), std::nullopt, "naive-ps", {}, {}};
}

struct AnonymousResult {
    MechanismResult result;
    FrankWolfeResult solver;
    bool snapped = false;  // the rounded point is exactly in P
};

/// Anonymous strictly convex minimisation over P. The rational snap is kept
/// only when it lies in P exactly.
inline AnonymousResult mech_anonymous(const Instance& inst, const FrankWolfeOptions& options = {}) {
    AnonymousResult out;
    out.solver = frank_wolfe_qp(inst, options);
    FractionalAssignment rounded = snap(out.solver);
    double drift = 0;
    for (std::size_t i = 0; i < inst.n; ++i)
        for (std::size_t e = 0; e < inst.m(); ++e)
            drift = std::max(drift, std::abs(to_double(rounded(i, e)) - out.solver.at(i, e)));
    out.snapped = drift <= 1e-6 && check_feasible(inst, rounded).feasible;
    if (!out.snapped) {
        // Fall back to the exact convex combination of the active vertices.
        Lottery lottery;
        Rational total = 0;
        for (const auto& [w, x] : out.solver.active) {
            Rational p = nearest_fraction(w, 4096);
            if (p <= 0) continue;
            total += p;
            lottery.support.push_back({p, x});
        }
        for (auto& entry : lottery.support) entry.probability /= total;
        rounded = induced_fractional(inst, lottery);
    }
    out.result = {rounded, std::nullopt, "anonymous",
                  {"tol=" + std::to_string(options.tol), out.snapped ? "snap=exact" : "snap=none"},
                  {Guarantee::SdEfficient, Guarantee::Anonymous}};
    return out;
}

}  // namespace fairmat
