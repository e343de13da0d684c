#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairmat/domain.hpp"
#include "fairmat/matroid.hpp"
#include "fairmat/polytope.hpp"
#include "fairmat/sdrel.hpp"
#include "fairmat/simplex.hpp"

namespace fairmat {

/// Separating hyperplane for a point outside P: y·χ_X + y0 ≥ 0 for every
/// deterministic assignment X while y·π + y0 < 0.
struct Separation {
    FractionalAssignment y;
    Rational y0;
};

struct FeasibilityResult {
    bool feasible = false;
    std::optional<Lottery> decomposition;
    std::optional<Separation> separation;
};

namespace detail {

/// Linear row over π used by the face-peeling decomposition.
struct PiRow {
    std::vector<std::size_t> vars;
    Rational rhs;
};

inline std::vector<PiRow> hrep_rows(const Instance& inst) {
    const PolytopeP p = build_P_hrep(inst, HRepForm::Compact);
    std::vector<PiRow> rows;
    for (const auto& r : p.rank_rows) {
        PiRow row{{}, Rational(r.bound)};
        for (std::size_t e : r.items.items()) row.vars.push_back(p.variable(r.agent, e));
        rows.push_back(std::move(row));
    }
    for (std::size_t e = 0; e < p.m; ++e) {
        PiRow row{{}, Rational(1)};
        for (std::size_t i = 0; i < p.n; ++i) row.vars.push_back(p.variable(i, e));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Rational row_value(const PiRow& row, const Vector& z) {
    Rational v = 0;
    for (std::size_t k : row.vars) v += z[k];
    return v;
}

/// Matroid case: repeatedly move from π to an integral vertex χ of its
/// minimal face, take the largest λ with (π − λχ)/(1 − λ) still in P, and
/// recurse on the remainder. Each round lowers the face dimension, so at
/// most n·m + 1 rounds occur.
inline Lottery peel_decomposition(const Instance& inst, const FractionalAssignment& pi) {
    const std::size_t n = inst.n, m = inst.m(), vars = n * m;
    const auto rows = hrep_rows(inst);
    Vector z(pi.data().begin(), pi.data().end());
    Rational remaining = 1;  // probability mass not yet assigned
    Lottery out;
    for (std::size_t round = 0; round <= vars + 1; ++round) {
        lp::LinearProgram face(vars, lp::Sense::Maximize);
        for (const auto& row : rows) {
            std::vector<lp::Term> terms;
            for (std::size_t k : row.vars) terms.push_back({k, Rational(1)});
            const bool tight = row_value(row, z) == row.rhs;
            face.add_constraint(std::move(terms), tight ? lp::Relation::Equal : lp::Relation::LessEqual, row.rhs);
        }
        for (std::size_t k = 0; k < vars; ++k)
            if (z[k] == 0) face.add_constraint({{k, Rational(1)}}, lp::Relation::Equal, Rational(0));
        const auto res = lp::simplex(face);
        if (res.status != lp::Status::Optimal) throw InfeasiblePoint("decomposition: face LP failed");
        const Vector& chi = res.x;
        for (const auto& v : chi)
            if (!is_integral(v)) throw Error("decomposition: face vertex is not integral");

        std::optional<Rational> lambda = Rational(1);
        auto lower = [&lambda](Rational v) {
            if (v < *lambda) lambda = std::move(v);
        };
        for (const auto& row : rows) {
            const Rational at_chi = row_value(row, chi);
            if (at_chi < row.rhs) lower((row.rhs - row_value(row, z)) / (row.rhs - at_chi));
        }
        for (std::size_t k = 0; k < vars; ++k)
            if (chi[k] == 1) lower(z[k]);

        DeterministicAssignment x{std::vector<ItemSet>(n)};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e = 0; e < m; ++e)
                if (chi[i * m + e] == 1) x.bundles[i] = x.bundles[i].with(e);
        out.support.push_back({remaining * *lambda, x});
        if (*lambda == 1) return out.normalized();
        for (std::size_t k = 0; k < vars; ++k) z[k] = (z[k] - *lambda * chi[k]) / (1 - *lambda);
        remaining *= 1 - *lambda;
    }
    throw Error("decomposition: peeling did not terminate");
}

/// General case: π as a convex combination of deterministic assignments, by
/// one exact LP. A basic solution has at most n·m + 1 positive weights.
inline lp::Result vrep_decomposition_lp(const Instance& inst, const FractionalAssignment& pi,
                                        std::vector<DeterministicAssignment>& vertices) {
    const std::size_t n = inst.n, m = inst.m();
    vertices = enumerate_assignments(inst);
    lp::LinearProgram prog(vertices.size(), lp::Sense::Maximize);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t e = 0; e < m; ++e) {
            std::vector<lp::Term> terms;
            for (std::size_t v = 0; v < vertices.size(); ++v)
                if (vertices[v].bundles[i].contains(e)) terms.push_back({v, Rational(1)});
            prog.add_constraint(std::move(terms), lp::Relation::Equal, pi(i, e));
        }
    std::vector<lp::Term> all;
    for (std::size_t v = 0; v < vertices.size(); ++v) all.push_back({v, Rational(1)});
    prog.add_constraint(std::move(all), lp::Relation::Equal, Rational(1));
    return lp::simplex(prog);
}

}  // namespace detail

/// π ∈ P, with a decomposition as positive evidence and a separating
/// hyperplane over deterministic assignments as negative evidence.
inline FeasibilityResult check_feasible(const Instance& inst, const FractionalAssignment& pi) {
    const std::size_t n = inst.n, m = inst.m();
    if (pi.agents() != n || pi.items() != m) throw InvalidInstance("assignment shape does not match instance");
    FeasibilityResult out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t e = 0; e < m; ++e)
            if (pi(i, e) < 0) {
                Separation s{FractionalAssignment(n, m), 0};
                s.y(i, e) = 1;
                out.separation = std::move(s);
                return out;
            }
    if (all_matroids(inst)) {
        const PolytopeP p = build_P_hrep(inst, HRepForm::Compact);
        for (const auto& row : p.rank_rows) {
            Rational total = 0;
            for (std::size_t e : row.items.items()) total += pi(row.agent, e);
            if (total > row.bound) {
                Separation s{FractionalAssignment(n, m), Rational(row.bound)};
                for (std::size_t e : row.items.items()) s.y(row.agent, e) = -1;
                out.separation = std::move(s);
                return out;
            }
        }
        for (std::size_t e = 0; e < m; ++e)
            if (pi.column_sum(e) > 1) {
                Separation s{FractionalAssignment(n, m), Rational(1)};
                for (std::size_t i = 0; i < n; ++i) s.y(i, e) = -1;
                out.separation = std::move(s);
                return out;
            }
        out.feasible = true;
        out.decomposition = detail::peel_decomposition(inst, pi);
        return out;
    }
    std::vector<DeterministicAssignment> vertices;
    const auto res = detail::vrep_decomposition_lp(inst, pi, vertices);
    if (res.status == lp::Status::Optimal) {
        Lottery lottery;
        for (std::size_t v = 0; v < vertices.size(); ++v)
            if (res.x[v] != 0) lottery.support.push_back({res.x[v], vertices[v]});
        out.feasible = true;
        out.decomposition = lottery.normalized();
        return out;
    }
    // Farkas multipliers on the equality rows are free; they give y directly.
    Separation s{FractionalAssignment(n, m), res.farkas.back()};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t e = 0; e < m; ++e) s.y(i, e) = res.farkas[i * m + e];
    out.separation = std::move(s);
    return out;
}

/// Exact lottery inducing π with support at most n·m + 1.
inline Lottery decompose(const Instance& inst, const FractionalAssignment& pi) {
    auto res = check_feasible(inst, pi);
    if (!res.feasible) throw InfeasiblePoint("assignment is not in P");
    return std::move(*res.decomposition);
}

/// Lexicographic maximum of {y ≥ 0 : y(X) ≤ r^x(X) ∀X} by one LP per
/// preference position, earlier coordinates pinned. Ranks come from the
/// membership oracle, not from RankOracle.
inline Vector choice_oracle_lex_lp(const ConstraintFamily& family, const Preference& pref, const Vector& x) {
    const std::size_t m = family.ground_size();
    require_subset_guard(m, "choice_oracle_lex_lp");
    std::vector<std::pair<ItemSet, Rational>> rows;
    for_each_subset(ItemSet::full(m), [&](ItemSet s) {
        if (s.empty()) return;
        std::optional<Rational> best;
        for_each_subset(s, [&](ItemSet y) {
            Rational v = Rational(max_feasible_subset(family, y));
            for (std::size_t e : (s - y).items()) v += x[e];
            if (!best || v < *best) best = std::move(v);
        });
        rows.emplace_back(s, *best);
    });
    Vector y(m, Rational(0));
    std::vector<std::size_t> pinned;
    for (std::size_t e : pref.order()) {
        lp::LinearProgram prog(m, lp::Sense::Maximize);
        prog.set_objective(e, 1);
        for (const auto& [s, bound] : rows) {
            std::vector<lp::Term> terms;
            for (std::size_t f : s.items()) terms.push_back({f, Rational(1)});
            prog.add_constraint(std::move(terms), lp::Relation::LessEqual, bound);
        }
        for (std::size_t f : pinned) prog.add_constraint({{f, Rational(1)}}, lp::Relation::Equal, y[f]);
        const auto res = lp::simplex(prog);
        if (res.status != lp::Status::Optimal) throw Error("choice_oracle_lex_lp: LP not optimal");
        y[e] = res.x[e];
        pinned.push_back(e);
    }
    return y;
}

/// Envy row coefficients of a deterministic assignment: for agent i, rival j
/// and item e, |X_i ∩ U| − max{|Y| : Y ⊆ X_j ∩ U, Y ∈ ℱ_i}.
inline Rational envy_coefficient(const Instance& inst, const DeterministicAssignment& x, std::size_t i, std::size_t j,
                                 std::size_t e) {
    const ItemSet upper = inst.prefs[i].upper_set(e);
    const auto own = (x.bundles[i] & upper).size();
    const auto best = max_feasible_subset(inst.constraints[i], x.bundles[j] & upper);
    return Rational(static_cast<long long>(own) - static_cast<long long>(best));
}

struct SearchOptions {
    std::size_t attempts = 24;
    std::uint64_t seed = 1;
};

/// Desk-scale search for an sd-efficient and sd-envy-free lottery: maximise a
/// consistent welfare subject to the envy rows (linear in p), then test
/// efficiency; retry with other consistent weights. No result does not
/// mean that none exists.
inline std::optional<Lottery> brute_force_search(const Instance& inst, const SearchOptions& options = {}) {
    const std::size_t n = inst.n, m = inst.m();
    const auto vertices = enumerate_assignments(inst);
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> step(1, 9);
    for (std::size_t attempt = 0; attempt < options.attempts; ++attempt) {
        FractionalAssignment w = borda_weights(inst);
        if (attempt > 0)
            for (std::size_t i = 0; i < n; ++i) {
                Rational level = 0;
                for (std::size_t k = m; k-- > 0;) {
                    level += step(rng);
                    w(i, inst.prefs[i].at(k)) = level;
                }
            }
        lp::LinearProgram prog(vertices.size(), lp::Sense::Maximize);
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            Rational value = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t e : vertices[v].bundles[i].items()) value += w(i, e);
            prog.set_objective(v, value);
        }
        std::vector<lp::Term> all;
        for (std::size_t v = 0; v < vertices.size(); ++v) all.push_back({v, Rational(1)});
        prog.add_constraint(std::move(all), lp::Relation::Equal, Rational(1));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                for (std::size_t e = 0; e < m; ++e) {
                    std::vector<lp::Term> terms;
                    for (std::size_t v = 0; v < vertices.size(); ++v) {
                        Rational c = envy_coefficient(inst, vertices[v], i, j, e);
                        if (c != 0) terms.push_back({v, std::move(c)});
                    }
                    prog.add_constraint(std::move(terms), lp::Relation::GreaterEqual, Rational(0));
                }
            }
        const auto res = lp::simplex(prog);
        if (res.status != lp::Status::Optimal) return std::nullopt;
        Lottery lottery;
        for (std::size_t v = 0; v < vertices.size(); ++v)
            if (res.x[v] != 0) lottery.support.push_back({res.x[v], vertices[v]});
        lottery = lottery.normalized();
        if (is_sd_efficient(inst, induced_fractional(inst, lottery)).efficient &&
            is_sd_envy_free(inst, lottery).all_satisfied())
            return lottery;
    }
    return std::nullopt;
}

}  // namespace fairmat
