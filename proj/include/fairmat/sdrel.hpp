#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairmat/domain.hpp"
#include "fairmat/matroid.hpp"
#include "fairmat/polytope.hpp"

namespace fairmat {

enum class Dominance { StrictlyDominates, Equal, DominatedStrictly, Incomparable };

inline const char* to_string(Dominance d) {
    switch (d) {
        case Dominance::StrictlyDominates: return "strictly-dominates";
        case Dominance::Equal: return "equal";
        case Dominance::DominatedStrictly: return "dominated-strictly";
        case Dominance::Incomparable: return "incomparable";
    }
    return "?";
}

struct DominanceVerdict {
    Dominance relation = Dominance::Equal;
    /// First item (in preference order) whose cumulative sum decides the
    /// verdict: strictly larger for StrictlyDominates, strictly smaller for
    /// DominatedStrictly and Incomparable.
    std::optional<std::size_t> witness;

    bool weakly_dominates() const {
        return relation == Dominance::StrictlyDominates || relation == Dominance::Equal;
    }
};

inline ItemSet upper_set(const Preference& pref, std::size_t e) { return pref.upper_set(e); }

/// Compares all m cumulative sums of x and y along `pref`.
inline DominanceVerdict sd_compare(const Preference& pref, std::span<const Rational> x, std::span<const Rational> y) {
    Rational cx = 0, cy = 0;
    std::optional<std::size_t> first_greater, first_less;
    for (std::size_t e : pref.order()) {
        cx += x[e];
        cy += y[e];
        if (cx > cy && !first_greater) first_greater = e;
        if (cx < cy && !first_less) first_less = e;
    }
    if (!first_greater && !first_less) return {Dominance::Equal, std::nullopt};
    if (!first_less) return {Dominance::StrictlyDominates, first_greater};
    if (!first_greater) return {Dominance::DominatedStrictly, first_less};
    return {Dominance::Incomparable, first_less};
}

inline DominanceVerdict sd_compare(const Preference& pref, const Vector& x, const Vector& y) {
    return sd_compare(pref, std::span<const Rational>(x), std::span<const Rational>(y));
}

/// One ordered pair of the envy check: does `envier` sd-envy `envied`?
struct PairEnvy {
    std::size_t envier = 0;
    std::size_t envied = 0;
    bool satisfied = true;
    std::optional<std::size_t> witness;
    Rational lhs;  // envier's own cumulative share at the witness
    Rational rhs;  // best feasible share extractable from the envied bundle
};

struct EnvyReport {
    std::vector<PairEnvy> pairs;

    bool all_satisfied() const {
        for (const auto& p : pairs)
            if (!p.satisfied) return false;
        return true;
    }
    const PairEnvy* find(std::size_t envier, std::size_t envied) const {
        for (const auto& p : pairs)
            if (p.envier == envier && p.envied == envied) return &p;
        return nullptr;
    }
    std::vector<const PairEnvy*> violations() const {
        std::vector<const PairEnvy*> out;
        for (const auto& p : pairs)
            if (!p.satisfied) out.push_back(&p);
        return out;
    }
};

namespace detail {

/// max |Y| over Y ⊆ s with Y ∈ family; rank for matroids, exhaustive otherwise.
inline std::size_t best_feasible_count(const ConstraintFamily& family, const std::optional<RankOracle>& oracle,
                                       ItemSet s) {
    if (oracle) return oracle->rank(s);
    return max_feasible_subset(family, s);
}

}  // namespace detail

/// Exact evaluation of the lottery-level envy inequality for every ordered
/// pair and every item.
inline EnvyReport is_sd_envy_free(const Instance& inst, const Lottery& lottery) {
    const FractionalAssignment pi = induced_fractional(inst, lottery);
    EnvyReport report;
    for (std::size_t i = 0; i < inst.n; ++i) {
        std::optional<RankOracle> oracle;
        if (inst.constraints[i].is_matroid()) oracle.emplace(inst.constraints[i]);
        for (std::size_t j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            PairEnvy pe{i, j, true, std::nullopt, 0, 0};
            Rational own = 0;
            for (std::size_t e : inst.prefs[i].order()) {
                own += pi(i, e);
                const ItemSet upper = inst.prefs[i].upper_set(e);
                Rational other = 0;
                for (const auto& entry : lottery.support)
                    other += entry.probability *
                             detail::best_feasible_count(inst.constraints[i], oracle, entry.assignment.bundles[j] & upper);
                if (own < other) {
                    pe.satisfied = false;
                    pe.witness = e;
                    pe.lhs = own;
                    pe.rhs = other;
                    break;
                }
            }
            report.pairs.push_back(std::move(pe));
        }
    }
    return report;
}

/// Identical-constraint form: π_i ⪰_i^sd π_j for every ordered pair.
inline EnvyReport is_sd_envy_free_fractional(const Instance& inst, const FractionalAssignment& pi) {
    if (!identical_constraints(inst)) throw ConstraintsNotIdentical();
    EnvyReport report;
    for (std::size_t i = 0; i < inst.n; ++i)
        for (std::size_t j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            PairEnvy pe{i, j, true, std::nullopt, 0, 0};
            Rational own = 0, other = 0;
            for (std::size_t e : inst.prefs[i].order()) {
                own += pi(i, e);
                other += pi(j, e);
                if (own < other) {
                    pe = {i, j, false, e, own, other};
                    break;
                }
            }
            report.pairs.push_back(std::move(pe));
        }
    return report;
}

struct PairCheck {
    std::size_t i = 0;
    std::size_t j = 0;
    bool holds = true;
    DominanceVerdict verdict;
};

/// π_i ⪰_i^sd F_i[π_j] for every ordered pair (i ≠ j).
inline std::vector<PairCheck> ef_sufficient_matroid(const Instance& inst, const FractionalAssignment& pi) {
    if (!all_matroids(inst)) throw NotAMatroid();
    std::vector<PairCheck> out;
    for (std::size_t i = 0; i < inst.n; ++i) {
        const RankOracle oracle(inst.constraints[i]);
        for (std::size_t j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            const Vector target = choice(oracle, inst.prefs[i], pi.row_vector(j));
            const auto verdict = sd_compare(inst.prefs[i], pi.row(i), std::span<const Rational>(target));
            out.push_back({i, j, verdict.weakly_dominates(), verdict});
        }
    }
    return out;
}

inline bool all_hold(const std::vector<PairCheck>& checks) {
    for (const auto& c : checks)
        if (!c.holds) return false;
    return true;
}

/// Per agent: π_i ⪰_i^sd F_i[½·1].
inline std::vector<bool> sd_proportional_agents(const Instance& inst, const FractionalAssignment& pi) {
    if (!all_matroids(inst)) throw NotAMatroid();
    std::vector<bool> out;
    const Vector half(inst.m(), make_rational(1, 2));
    for (std::size_t i = 0; i < inst.n; ++i) {
        const Vector target = choice(RankOracle(inst.constraints[i]), inst.prefs[i], half);
        out.push_back(sd_compare(inst.prefs[i], pi.row(i), std::span<const Rational>(target)).weakly_dominates());
    }
    return out;
}

inline bool is_sd_proportional(const Instance& inst, const FractionalAssignment& pi) {
    for (bool b : sd_proportional_agents(inst, pi))
        if (!b) return false;
    return true;
}

/// w_ie = |{e' : e ⪰_i e'}|.
inline FractionalAssignment borda_weights(const Instance& inst) {
    FractionalAssignment w(inst.n, inst.m());
    for (std::size_t i = 0; i < inst.n; ++i)
        for (std::size_t e = 0; e < inst.m(); ++e) w(i, e) = Rational(inst.m() - inst.prefs[i].rank(e));
    return w;
}

inline Rational weighted_value(const FractionalAssignment& w, const FractionalAssignment& pi) {
    Rational v = 0;
    for (std::size_t k = 0; k < w.data().size(); ++k) v += w.data()[k] * pi.data()[k];
    return v;
}

/// Rows y_i(U(≻_i, e)) ≥ π_i(U(≻_i, e)) for every agent and prefix.
inline std::vector<PiConstraint> dominance_rows(const Instance& inst, const FractionalAssignment& pi) {
    std::vector<PiConstraint> rows;
    for (std::size_t i = 0; i < inst.n; ++i) {
        PiConstraint c;
        c.relation = lp::Relation::GreaterEqual;
        c.rhs = 0;
        c.label = "dominance";
        for (std::size_t e : inst.prefs[i].order()) {
            c.terms.push_back({i, e, Rational(1)});
            c.rhs += pi(i, e);
            rows.push_back(c);
        }
    }
    return rows;
}

struct EfficiencyResult {
    bool efficient = true;
    std::optional<FractionalAssignment> dominating;
    Rational value_at_pi;
    Rational optimum;
};

/// Maximises the consistent weights over P subject to weak sd-dominance of
/// π for every agent. π is sd-efficient iff the optimum equals its own value.
inline EfficiencyResult is_sd_efficient(const Instance& inst, const FractionalAssignment& pi,
                                        const std::optional<FractionalAssignment>& weights = std::nullopt) {
    const FractionalAssignment w = weights ? *weights : borda_weights(inst);
    OptimizeOptions options;
    options.maximal_vertices = true;
    const auto res = optimize_over_P(inst, w, dominance_rows(inst, pi), options);
    EfficiencyResult out;
    out.value_at_pi = weighted_value(w, pi);
    if (res.status != lp::Status::Optimal) throw InfeasiblePoint("efficiency LP has no solution; is pi feasible?");
    out.optimum = res.value;
    if (out.optimum > out.value_at_pi) {
        out.efficient = false;
        out.dominating = res.pi;
    }
    return out;
}

}  // namespace fairmat
