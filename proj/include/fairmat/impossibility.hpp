#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairmat/certificates.hpp"
#include "fairmat/domain.hpp"
#include "fairmat/instances.hpp"
#include "fairmat/polytope.hpp"
#include "fairmat/sdrel.hpp"
#include "fairmat/simplex.hpp"
#include "fairmat/verify.hpp"
#include "fairmat/io.hpp"

namespace fairmat {

// Two agents, identical preferences, one non-matroid family ----------------

struct Thm4Certificates {
    Instance instance;
    cert::SupportRestriction support;
    cert::LotteryFarkas infeasibility;
    bool forced_rows_implied = false;  // first-item envy rows pin π_{i,e1} = ½
};

namespace detail {

/// Greedily adds unassigned items to any agent that can take them.
inline DeterministicAssignment extend_greedily(const Instance& inst, DeterministicAssignment x) {
    for (std::size_t e = 0; e < inst.m(); ++e) {
        if (x.assigned().contains(e)) continue;
        for (std::size_t i = 0; i < inst.n; ++i)
            if (inst.constraints[i].contains(x.bundles[i].with(e))) {
                x.bundles[i] = x.bundles[i].with(e);
                break;
            }
    }
    return x;
}

inline lp::LinearProgram lottery_program(const Instance& inst, const std::vector<DeterministicAssignment>& vars,
                                         const std::vector<cert::LotteryRow>& rows) {
    lp::LinearProgram prog(vars.size(), lp::Sense::Maximize);
    for (const auto& row : rows) {
        std::vector<lp::Term> terms;
        for (std::size_t v = 0; v < vars.size(); ++v) {
            Rational a;
            switch (row.kind) {
                case cert::LotteryRow::Kind::Sum: a = 1; break;
                case cert::LotteryRow::Kind::Envy: a = envy_coefficient(inst, vars[v], row.i, row.j, row.e); break;
                case cert::LotteryRow::Kind::Forced: a = vars[v].bundles[row.i].contains(row.e) ? 1 : 0; break;
            }
            if (a != 0) terms.push_back({v, std::move(a)});
        }
        switch (row.kind) {
            case cert::LotteryRow::Kind::Sum: prog.add_constraint(std::move(terms), lp::Relation::Equal, Rational(1), "sum"); break;
            case cert::LotteryRow::Kind::Envy: prog.add_constraint(std::move(terms), lp::Relation::GreaterEqual, Rational(0), "envy"); break;
            case cert::LotteryRow::Kind::Forced: prog.add_constraint(std::move(terms), lp::Relation::Equal, row.value, "forced"); break;
        }
    }
    return prog;
}

}  // namespace detail

/// Support restriction (non-maximal assignments are strictly improvable) and
/// an exact Farkas certificate that the envy rows over the maximal
/// assignments admit no lottery.
inline Thm4Certificates certify_thm4_nonexistence(const Instance& inst = thm4_instance()) {
    Thm4Certificates out{inst, {}, {}, false};
    for (const auto& x : enumerate_assignments(inst)) {
        const auto bigger = detail::extend_greedily(inst, x);
        if (bigger != x) out.support.dominated.emplace_back(x, bigger);
        else out.infeasibility.variables.push_back(x);
    }
    auto& rows = out.infeasibility.rows;
    rows.push_back({cert::LotteryRow::Kind::Sum, 0, 0, 0, 0});
    for (std::size_t i = 0; i < inst.n; ++i)
        for (std::size_t j = 0; j < inst.n; ++j)
            if (i != j)
                for (std::size_t e : inst.prefs[i].order()) rows.push_back({cert::LotteryRow::Kind::Envy, i, j, e, 0});
    const std::size_t top = inst.prefs[0].at(0);
    for (std::size_t i = 0; i < inst.n; ++i)
        rows.push_back({cert::LotteryRow::Kind::Forced, i, 0, top, Rational(1) / Rational(static_cast<long long>(inst.n))});

    // Solve without the forced rows; they are consequences, recorded with
    // zero multipliers.
    std::vector<cert::LotteryRow> base;
    for (const auto& r : rows)
        if (r.kind != cert::LotteryRow::Kind::Forced) base.push_back(r);
    const auto res = lp::simplex(detail::lottery_program(inst, out.infeasibility.variables, base));
    if (res.status != lp::Status::Infeasible) throw Error("envy system over maximal assignments is feasible");
    out.infeasibility.y = res.farkas;
    out.infeasibility.y.resize(rows.size(), Rational(0));

    // Sum and top-item envy rows alone pin each π_{i,top}: min = max = 1/n.
    std::vector<cert::LotteryRow> first;
    for (const auto& r : base)
        if (r.kind == cert::LotteryRow::Kind::Sum || r.e == top) first.push_back(r);
    bool pinned = true;
    for (std::size_t i = 0; i < inst.n; ++i)
        for (auto sense : {lp::Sense::Maximize, lp::Sense::Minimize}) {
            auto prog = detail::lottery_program(inst, out.infeasibility.variables, first);
            prog.set_sense(sense);
            for (std::size_t v = 0; v < out.infeasibility.variables.size(); ++v)
                prog.set_objective(v, out.infeasibility.variables[v].bundles[i].contains(top) ? 1 : 0);
            const auto r = lp::simplex(prog);
            pinned = pinned && r.status == lp::Status::Optimal &&
                     r.value == Rational(1) / Rational(static_cast<long long>(inst.n));
        }
    out.forced_rows_implied = pinned;
    return out;
}

// Three (or more) agents, identical matroid --------------------------------

namespace detail {

/// a·z ≤ b, or a·z = b when `equality`.
struct DenseRow {
    Vector a;
    Rational b;
    bool equality = false;
};

inline Rational dot(const Vector& a, const Vector& z) {
    Rational s = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] != 0) s += a[k] * z[k];
    return s;
}

/// LP over the rows (variables free in sign are not needed: every system
/// here includes z ≥ 0).
inline lp::Result solve_rows(const std::vector<DenseRow>& rows, std::size_t vars, const Vector& objective,
                             lp::Sense sense) {
    lp::LinearProgram prog(vars, sense);
    for (std::size_t k = 0; k < vars; ++k) prog.set_objective(k, objective[k]);
    for (const auto& r : rows) {
        std::vector<lp::Term> terms;
        for (std::size_t k = 0; k < vars; ++k)
            if (r.a[k] != 0) terms.push_back({k, r.a[k]});
        prog.add_constraint(std::move(terms), r.equality ? lp::Relation::Equal : lp::Relation::LessEqual, r.b);
    }
    return lp::simplex(prog);
}

/// Basis of {w : A w = 0} by exact row reduction; columns of the result.
inline std::vector<Vector> null_space(std::vector<Vector> a, std::size_t cols) {
    std::vector<std::size_t> pivot_cols;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        const Rational lead = a[row][c];
        for (auto& v : a[row]) v /= lead;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][c] == 0) continue;
            const Rational f = a[r][c];
            for (std::size_t k = 0; k < cols; ++k) a[r][k] -= f * a[row][k];
        }
        pivot_cols.push_back(c);
        ++row;
    }
    std::vector<Vector> basis;
    for (std::size_t c = 0; c < cols; ++c) {
        if (std::find(pivot_cols.begin(), pivot_cols.end(), c) != pivot_cols.end()) continue;
        Vector v(cols, Rational(0));
        v[c] = 1;
        for (std::size_t r = 0; r < pivot_cols.size(); ++r) v[pivot_cols[r]] = -a[r][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Unique solution of the square system, if any.
inline std::optional<Vector> solve_square(std::vector<Vector> a, Vector b) {
    const std::size_t d = b.size();
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t p = c;
        while (p < d && a[p][c] == 0) ++p;
        if (p == d) return std::nullopt;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == c || a[r][c] == 0) continue;
            const Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < d; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    Vector w(d);
    for (std::size_t c = 0; c < d; ++c) w[c] = b[c] / a[c][c];
    return w;
}

/// Vertices of {z : rows}, which must be bounded. Implicit equalities are
/// found by LP, the affine hull is parametrised, redundant rows are dropped
/// and every d-subset of the remaining rows is tried as a basis.
inline std::vector<Vector> enumerate_vertices(std::vector<DenseRow> rows, std::size_t vars, std::size_t& dimension) {
    // Nonnegativity as explicit rows so that it takes part in the sweep.
    for (std::size_t k = 0; k < vars; ++k) {
        Vector a(vars, Rational(0));
        a[k] = -1;
        rows.push_back({std::move(a), 0, false});
    }
    // Rows strict somewhere are found by maximising a capped slack sum;
    // when no further slack is possible, the rest are implicit equalities.
    std::vector<bool> strict(rows.size(), false);
    std::optional<Vector> point;
    while (true) {
        std::vector<std::size_t> open;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!rows[r].equality && !strict[r]) open.push_back(r);
        const std::size_t total = vars + open.size();
        lp::LinearProgram prog(total, lp::Sense::Maximize);
        for (std::size_t t = 0; t < open.size(); ++t) {
            prog.set_objective(vars + t, 1);
            prog.add_constraint({{vars + t, Rational(1)}}, lp::Relation::LessEqual, Rational(1));
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::vector<lp::Term> terms;
            for (std::size_t k = 0; k < vars; ++k)
                if (rows[r].a[k] != 0) terms.push_back({k, rows[r].a[k]});
            const auto it = std::find(open.begin(), open.end(), r);
            if (it != open.end()) terms.push_back({vars + static_cast<std::size_t>(it - open.begin()), Rational(1)});
            prog.add_constraint(std::move(terms), rows[r].equality ? lp::Relation::Equal : lp::Relation::LessEqual, rows[r].b);
        }
        const auto res = lp::simplex(prog);
        if (res.status != lp::Status::Optimal) {
            dimension = 0;
            return {};
        }
        point = Vector(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(vars));
        bool progress = false;
        for (std::size_t t = 0; t < open.size(); ++t)
            if (res.x[vars + t] > 0) {
                strict[open[t]] = true;
                progress = true;
            }
        if (!progress) {
            for (std::size_t r : open) rows[r].equality = true;
            break;
        }
    }

    std::vector<Vector> eq;
    for (const auto& r : rows)
        if (r.equality) eq.push_back(r.a);
    const auto basis = null_space(eq, vars);
    const std::size_t d = basis.size();
    dimension = d;
    const Vector& z0 = *point;
    auto lift = [&](const Vector& w) {
        Vector z = z0;
        for (std::size_t t = 0; t < d; ++t)
            for (std::size_t k = 0; k < vars; ++k)
                if (basis[t][k] != 0) z[k] += w[t] * basis[t][k];
        return z;
    };
    if (d == 0) return {z0};

    // Inequalities in w-coordinates, deduplicated after scaling.
    std::vector<DenseRow> reduced;
    for (const auto& r : rows) {
        if (r.equality) continue;
        Vector a(d);
        bool zero = true;
        for (std::size_t t = 0; t < d; ++t) {
            a[t] = dot(r.a, basis[t]);
            zero = zero && a[t] == 0;
        }
        if (zero) continue;
        Rational b = r.b - dot(r.a, z0);
        Rational scale = 0;
        for (const auto& v : a)
            if (v != 0) {
                scale = abs(v);
                break;
            }
        for (auto& v : a) v /= scale;
        b /= scale;
        bool dup = false;
        for (auto& other : reduced)
            if (other.a == a) {
                if (b < other.b) other.b = b;
                dup = true;
                break;
            }
        if (!dup) reduced.push_back({std::move(a), std::move(b), false});
    }
    // Drop rows implied by the others: max of a·w over the rest stays ≤ b.
    // w is free, so it is split as w = u − v with u, v ≥ 0.
    for (std::size_t r = 0; r < reduced.size();) {
        lp::LinearProgram prog(2 * d, lp::Sense::Maximize);
        for (std::size_t t = 0; t < d; ++t) {
            prog.set_objective(t, reduced[r].a[t]);
            prog.set_objective(d + t, -reduced[r].a[t]);
        }
        for (std::size_t s = 0; s < reduced.size(); ++s) {
            if (s == r) continue;
            std::vector<lp::Term> terms;
            for (std::size_t t = 0; t < d; ++t)
                if (reduced[s].a[t] != 0) {
                    terms.push_back({t, reduced[s].a[t]});
                    terms.push_back({d + t, -reduced[s].a[t]});
                }
            prog.add_constraint(std::move(terms), lp::Relation::LessEqual, reduced[s].b);
        }
        const auto res = lp::simplex(prog);
        if (res.status == lp::Status::Optimal && res.value <= reduced[r].b) reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(r));
        else ++r;
    }

    std::vector<Vector> found;
    std::vector<std::size_t> pick(d);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start, std::size_t depth) {
        if (depth == d) {
            std::vector<Vector> a;
            Vector b;
            for (std::size_t s : pick) {
                a.push_back(reduced[s].a);
                b.push_back(reduced[s].b);
            }
            const auto w = solve_square(std::move(a), std::move(b));
            if (!w) return;
            for (const auto& r : reduced)
                if (dot(r.a, *w) > r.b) return;
            if (std::find(found.begin(), found.end(), *w) == found.end()) found.push_back(*w);
            return;
        }
        for (std::size_t s = start; s < reduced.size(); ++s) {
            pick[depth] = s;
            choose(s + 1, depth + 1);
        }
    };
    choose(0, 0);
    std::vector<Vector> out;
    for (const auto& w : found) out.push_back(lift(w));
    return out;
}

inline FractionalAssignment as_assignment(const Vector& z, std::size_t n, std::size_t m) {
    FractionalAssignment pi(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t e = 0; e < m; ++e) pi(i, e) = z[i * m + e];
    return pi;
}

inline bool in_P(const Instance& inst, const FractionalAssignment& pi) {
    for (const auto& v : pi.data())
        if (v < 0) return false;
    for (std::size_t e = 0; e < inst.m(); ++e)
        if (pi.column_sum(e) > 1) return false;
    for (const auto& row : build_P_hrep(inst, HRepForm::Compact).rank_rows) {
        Rational total = 0;
        for (std::size_t e : row.items.items()) total += pi(row.agent, e);
        if (total > row.bound) return false;
    }
    return true;
}

}  // namespace detail

/// The restricted polytope Q ⊆ P of the n-agent instance: identical-form
/// envy rows, and the allocations that efficiency forces (agents 1–3 take
/// one unit of {a,b,c} and 2/3 of {d,e}; filler agent i takes o_{2i−1} and
/// o_{2i}).
struct RestrictedPolytope {
    Instance instance;
    std::vector<detail::DenseRow> rows;
    std::size_t vars = 0;
};

/// The five-item instance for n = 3, the extension otherwise.
inline Instance thm5_for(std::size_t n) { return n == 3 ? thm5_instance() : thm5_general(n); }

inline RestrictedPolytope thm5_restricted_polytope(std::size_t n = 3) {
    RestrictedPolytope q{thm5_for(n), {}, 0};
    const Instance& inst = q.instance;
    const std::size_t m = inst.m();
    q.vars = n * m;
    auto var = [m](std::size_t i, std::size_t e) { return i * m + e; };
    auto idx = [&inst](const std::string& l) { return *inst.item_index(l); };
    auto row = [&](std::vector<std::pair<std::size_t, Rational>> terms, Rational b, bool eq) {
        Vector a(q.vars, Rational(0));
        for (auto& [k, c] : terms) a[k] += c;
        q.rows.push_back({std::move(a), std::move(b), eq});
    };
    for (const auto& r : build_P_hrep(inst, HRepForm::Compact).rank_rows) {
        std::vector<std::pair<std::size_t, Rational>> t;
        for (std::size_t e : r.items.items()) t.emplace_back(var(r.agent, e), 1);
        row(std::move(t), Rational(r.bound), false);
    }
    for (std::size_t e = 0; e < m; ++e) {
        std::vector<std::pair<std::size_t, Rational>> t;
        for (std::size_t i = 0; i < n; ++i) t.emplace_back(var(i, e), 1);
        row(std::move(t), 1, false);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::vector<std::pair<std::size_t, Rational>> t;
            for (std::size_t e : inst.prefs[i].order()) {
                t.emplace_back(var(i, e), -1);
                t.emplace_back(var(j, e), 1);
                row(t, 0, false);
            }
        }
    for (std::size_t i = 0; i < 3; ++i) {
        row({{var(i, idx("a")), 1}, {var(i, idx("b")), 1}, {var(i, idx("c")), 1}}, 1, true);
        row({{var(i, idx("d")), 1}, {var(i, idx("e")), 1}}, make_rational(2, 3), true);
    }
    for (std::size_t i = 4; i <= n; ++i) {
        row({{var(i - 1, idx("o" + std::to_string(2 * i - 1))), 1}}, 1, true);
        row({{var(i - 1, idx("o" + std::to_string(2 * i))), 1}}, 1, true);
    }
    return q;
}

struct Thm5Report {
    std::size_t n = 3;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t dimension = 0;
    std::vector<FractionalAssignment> vertices;
    std::vector<cert::DominatingPoint> vertex_certificates;
    std::vector<cert::DominatingPoint> sample_certificates;
    std::size_t undominated = 0;  // points with no dominating witness
    // Exact optima over Q of the quantities bounded in the case analysis.
    Rational gamma_min, alpha_max, beta_max, beta_minus_three_halves_alpha_max;
    bool bounds_confirmed = false;
    std::size_t parametric_mismatches = 0;  // points off the printed parametric matrix
    std::size_t first_direction_used = 0;
    std::size_t second_direction_used = 0;
    std::size_t directions_uncovered = 0;  // points where neither printed direction improves
    std::string status = "vertex and sampling evidence over Q; not a universal nonexistence proof";

    bool all_certified() const {
        return undominated == 0 && vertex_certificates.size() == vertices.size() &&
               sample_certificates.size() == samples && !vertices.empty();
    }
};

namespace detail {

/// Does π + t·D (t > 0 small) stay in P and sd-dominate π?
inline bool direction_improves(const Instance& inst, const FractionalAssignment& pi, const FractionalAssignment& d) {
    std::optional<Rational> step;
    for (std::size_t k = 0; k < pi.data().size(); ++k) {
        const Rational& v = pi.data()[k];
        const Rational& dv = d.data()[k];
        if (dv < 0) {
            Rational s = v / -dv;
            if (!step || s < *step) step = s;
        } else if (dv > 0) {
            Rational s = (1 - v) / dv;
            if (!step || s < *step) step = s;
        }
    }
    if (!step || *step <= 0) return false;
    FractionalAssignment moved = pi;
    for (std::size_t i = 0; i < pi.agents(); ++i)
        for (std::size_t e = 0; e < pi.items(); ++e) moved(i, e) += *step / 2 * d(i, e);
    if (!in_P(inst, moved)) return false;
    bool strict = false;
    for (std::size_t i = 0; i < inst.n; ++i) {
        const auto v = sd_compare(inst.prefs[i], moved.row(i), pi.row(i));
        if (!v.weakly_dominates()) return false;
        strict = strict || v.relation == Dominance::StrictlyDominates;
    }
    return strict;
}

}  // namespace detail

/// Enumerates the vertices of Q, certifies each one and `samples` seeded
/// random convex combinations as sd-dominated, and re-derives the bounds
/// used by the case analysis.
inline Thm5Report certify_thm5_sampling(std::size_t samples = 1000, std::uint64_t seed = 20240601, std::size_t n = 3) {
    if (samples < 1) throw Error("samples must be at least 1");
    const RestrictedPolytope q = thm5_restricted_polytope(n);
    const Instance& inst = q.instance;
    const std::size_t m = inst.m();
    Thm5Report rep;
    rep.n = n;
    rep.samples = samples;
    rep.seed = seed;
    const auto vertices = detail::enumerate_vertices(q.rows, q.vars, rep.dimension);
    for (const auto& v : vertices) rep.vertices.push_back(detail::as_assignment(v, n, m));

    auto idx = [&inst](const char* l) { return *inst.item_index(l); };
    const std::size_t a = idx("a"), b = idx("b"), c = idx("c"), d = idx("d"), e = idx("e");
    auto var = [m](std::size_t i, std::size_t item) { return i * m + item; };
    auto optimum = [&](Vector objective, lp::Sense sense) {
        const auto r = detail::solve_rows(q.rows, q.vars, objective, sense);
        if (r.status != lp::Status::Optimal) throw Error("bound LP over Q failed");
        return r.value;
    };
    Vector obj(q.vars, Rational(0));
    obj[var(1, c)] = 1;
    rep.gamma_min = optimum(obj, lp::Sense::Minimize);
    obj.assign(q.vars, Rational(0));
    obj[var(0, d)] = 1;
    rep.alpha_max = optimum(obj, lp::Sense::Maximize);
    obj.assign(q.vars, Rational(0));
    obj[var(2, a)] = 1;
    rep.beta_max = optimum(obj, lp::Sense::Maximize);
    obj[var(0, d)] = make_rational(-3, 2);
    rep.beta_minus_three_halves_alpha_max = optimum(obj, lp::Sense::Maximize);
    rep.bounds_confirmed = rep.gamma_min >= make_rational(1, 3) && rep.alpha_max <= make_rational(1, 2) &&
                           rep.beta_max <= make_rational(3, 4) && rep.beta_minus_three_halves_alpha_max <= 0;

    FractionalAssignment d1(n, m), d2(n, m);
    d1(0, a) = 1, d1(0, b) = -1, d1(1, a) = -1, d1(1, b) = 1;
    d2(0, a) = -1, d2(0, c) = 1, d2(0, d) = 1, d2(0, e) = -1;
    d2(2, a) = 1, d2(2, c) = -1, d2(2, d) = -1, d2(2, e) = 1;

    auto examine = [&](const FractionalAssignment& pi, std::vector<cert::DominatingPoint>& sink) {
        const auto eff = is_sd_efficient(inst, pi);
        if (eff.efficient) ++rep.undominated;
        else sink.push_back({pi, *eff.dominating, std::nullopt});

        const Rational alpha = pi(0, d), beta = pi(2, a), gamma = pi(1, c);
        const Rational third = make_rational(1, 3), two_thirds = make_rational(2, 3);
        const std::vector<std::vector<Rational>> printed{
            {1 - 3 * alpha + beta, -1 + 3 * alpha - beta + 2 * gamma, 1 - 2 * gamma, alpha, two_thirds - alpha},
            {3 * alpha - 2 * beta, 1 - 3 * alpha + 2 * beta - gamma, gamma, alpha, two_thirds - alpha},
            {beta, 1 - beta - gamma, gamma, 1 - 2 * alpha, -third + 2 * alpha}};
        const std::size_t cols[] = {a, b, c, d, e};
        bool matches = true;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t k = 0; k < 5; ++k) matches = matches && pi(i, cols[k]) == printed[i][k];
        if (!matches) ++rep.parametric_mismatches;

        const bool first = detail::direction_improves(inst, pi, d1);
        const bool second = detail::direction_improves(inst, pi, d2);
        rep.first_direction_used += first;
        rep.second_direction_used += second;
        if (!first && !second) ++rep.directions_uncovered;
    };
    for (const auto& v : rep.vertices) examine(v, rep.vertex_certificates);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> weight(1, 1000);
    std::bernoulli_distribution include(0.5);
    for (std::size_t s = 0; s < samples && !rep.vertices.empty(); ++s) {
        std::vector<Rational> w(rep.vertices.size(), Rational(0));
        Rational total = 0;
        for (std::size_t k = 0; k < w.size(); ++k)
            if (include(rng)) {
                w[k] = weight(rng);
                total += w[k];
            }
        if (total == 0) {
            w[s % w.size()] = 1;
            total = 1;
        }
        FractionalAssignment pi(n, m);
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] != 0)
                for (std::size_t t = 0; t < pi.data().size(); ++t)
                    pi(t / m, t % m) += w[k] / total * rep.vertices[k].data()[t];
        examine(pi, rep.sample_certificates);
    }
    return rep;
}

// JSON bundles -------------------------------------------------------------

inline io::json thm4_bundle_json(const Thm4Certificates& c) {
    io::json j;
    j["bundle"] = "thm4";
    j["instance"] = io::instance_json(c.instance);
    j["certificates"] = io::json::array({cert::to_json(c.instance, c.support), cert::to_json(c.instance, c.infeasibility)});
    j["forced_rows_implied"] = c.forced_rows_implied;
    return j;
}

inline io::json thm5_bundle_json(const Thm5Report& r) {
    const Instance inst = thm5_for(r.n);
    io::json j;
    j["bundle"] = "thm5";
    j["instance"] = io::instance_json(inst);
    j["status"] = r.status;
    j["agents"] = r.n;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["dimension"] = r.dimension;
    j["vertices"] = r.vertices.size();
    j["undominated"] = r.undominated;
    j["bounds"] = {{"gamma_min", to_string(r.gamma_min)},
                   {"alpha_max", to_string(r.alpha_max)},
                   {"beta_max", to_string(r.beta_max)},
                   {"beta_minus_three_halves_alpha_max", to_string(r.beta_minus_three_halves_alpha_max)},
                   {"confirmed", r.bounds_confirmed}};
    j["parametric_mismatches"] = r.parametric_mismatches;
    j["directions"] = {{"first", r.first_direction_used},
                       {"second", r.second_direction_used},
                       {"uncovered", r.directions_uncovered}};
    j["certificates"] = io::json::array();
    for (const auto& c : r.vertex_certificates) j["certificates"].push_back(cert::to_json(inst, c));
    for (const auto& c : r.sample_certificates) j["certificates"].push_back(cert::to_json(inst, c));
    return j;
}

}  // namespace fairmat
