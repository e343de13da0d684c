#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "fairmat/domain.hpp"
#include "fairmat/matroid.hpp"
#include "fairmat/simplex.hpp"

namespace fairmat {

/// Every deterministic assignment of `inst` (bundles disjoint and feasible),
/// found by depth-first search over items. With `maximal_only`, keeps only
/// assignments to which no unassigned item can be added for any agent.
inline std::vector<DeterministicAssignment> enumerate_assignments(const Instance& inst, bool maximal_only = false) {
    std::vector<DeterministicAssignment> out;
    DeterministicAssignment current{std::vector<ItemSet>(inst.n)};
    const std::size_t m = inst.m();
    const std::size_t limit = guards().assignments;
    std::function<void(std::size_t)> dfs = [&](std::size_t e) {
        if (e == m) {
            if (maximal_only) {
                const ItemSet unassigned = inst.ground() - current.assigned();
                for (std::size_t f : unassigned.items())
                    for (std::size_t i = 0; i < inst.n; ++i)
                        if (inst.constraints[i].contains(current.bundles[i].with(f))) return;
            }
            if (out.size() >= limit)
                throw EnumerationTooLarge("more than " + std::to_string(limit) + " deterministic assignments");
            out.push_back(current);
            return;
        }
        dfs(e + 1);
        for (std::size_t i = 0; i < inst.n; ++i) {
            const ItemSet grown = current.bundles[i].with(e);
            if (!inst.constraints[i].contains(grown)) continue;
            const ItemSet saved = current.bundles[i];
            current.bundles[i] = grown;
            dfs(e + 1);
            current.bundles[i] = saved;
        }
    };
    dfs(0);
    return out;
}

/// One rank inequality π_i(X) ≤ bound.
struct RankRow {
    std::size_t agent = 0;
    ItemSet items;
    std::size_t bound = 0;
};

/// The feasible-assignment polytope P = conv(𝒳), either by rank inequalities
/// plus column sums (all families matroids) or by its vertex list.
struct PolytopeP {
    enum class Representation { HRep, VRep };

    Representation representation = Representation::HRep;
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<RankRow> rank_rows;                  // HRep; column rows Σ_i π_ie ≤ 1 are implicit
    std::vector<DeterministicAssignment> vertices;   // VRep

    std::size_t variable(std::size_t agent, std::size_t item) const { return agent * m + item; }
};

enum class HRepForm {
    Full,     // one row per agent and nonempty X ⊆ E
    Compact,  // only rows that define P: laminar blocks, or dependent flats
};

namespace detail {

inline bool is_flat(const RankOracle& oracle, ItemSet x) {
    const std::size_t r = oracle.rank(x);
    for (std::size_t e : (oracle.ground() - x).items())
        if (oracle.rank(x.with(e)) == r) return false;
    return true;
}

inline void append_rank_rows(std::size_t agent, const RankOracle& oracle, HRepForm form, std::vector<RankRow>& rows) {
    const std::size_t m = oracle.ground_size();
    if (form == HRepForm::Compact) {
        if (const auto* tree = oracle.laminar()) {
            // Singleton rows π_ie ≤ 1 are implied by the column rows.
            for (const auto& node : tree->nodes)
                if (node.cap < node.items.size()) rows.push_back({agent, node.items, node.cap});
            return;
        }
    }
    require_subset_guard(m, "build_P");
    for_each_subset(ItemSet::full(m), [&](ItemSet x) {
        if (x.empty()) return;
        const std::size_t r = oracle.rank(x);
        if (form == HRepForm::Compact && (r == x.size() || !is_flat(oracle, x))) return;
        rows.push_back({agent, x, r});
    });
}

}  // namespace detail

inline PolytopeP build_P_vrep(const Instance& inst, bool maximal_only = false) {
    PolytopeP p;
    p.representation = PolytopeP::Representation::VRep;
    p.n = inst.n;
    p.m = inst.m();
    p.vertices = enumerate_assignments(inst, maximal_only);
    return p;
}

inline PolytopeP build_P_hrep(const Instance& inst, HRepForm form = HRepForm::Full) {
    if (!all_matroids(inst)) throw NotAMatroid("HRep of P requires matroid families");
    PolytopeP p;
    p.representation = PolytopeP::Representation::HRep;
    p.n = inst.n;
    p.m = inst.m();
    for (std::size_t i = 0; i < inst.n; ++i) detail::append_rank_rows(i, RankOracle(inst.constraints[i]), form, p.rank_rows);
    return p;
}

/// HRep when every family is a matroid, VRep otherwise.
inline PolytopeP build_P(const Instance& inst, HRepForm form = HRepForm::Full) {
    if (all_matroids(inst)) return build_P_hrep(inst, form);
    return build_P_vrep(inst);
}

/// Linear term over assignment entries π_{agent,item}.
struct PiTerm {
    std::size_t agent = 0;
    std::size_t item = 0;
    Rational coef;
};

struct PiConstraint {
    std::vector<PiTerm> terms;
    lp::Relation relation = lp::Relation::LessEqual;
    Rational rhs;
    std::string label;
};

struct OptimizeOptions {
    std::optional<PolytopeP::Representation> representation;  // default: HRep iff all matroids
    HRepForm form = HRepForm::Compact;
    /// VRep only: restrict to inclusion-maximal assignments. Valid only when
    /// the objective and extra rows are monotone in π.
    bool maximal_vertices = false;
    lp::Sense sense = lp::Sense::Maximize;
};

struct OptimizeResult {
    lp::Status status = lp::Status::Infeasible;
    FractionalAssignment pi;
    Rational value;
    std::optional<Lottery> lottery;  // VRep: the convex combination found
    PolytopeP::Representation representation = PolytopeP::Representation::HRep;
    lp::LinearProgram program;
    Vector farkas;
};

/// Optimises a linear objective over P intersected with `extras`. HRep solves
/// directly in π; VRep solves in barycentric coordinates over the vertices.
inline OptimizeResult optimize_over_P(const Instance& inst, const FractionalAssignment& objective,
                                      const std::vector<PiConstraint>& extras = {},
                                      const OptimizeOptions& options = {}) {
    const std::size_t n = inst.n, m = inst.m();
    const auto rep = options.representation.value_or(all_matroids(inst) ? PolytopeP::Representation::HRep
                                                                       : PolytopeP::Representation::VRep);
    OptimizeResult out;
    out.representation = rep;
    if (rep == PolytopeP::Representation::HRep) {
        const PolytopeP p = build_P_hrep(inst, options.form);
        lp::LinearProgram prog(n * m, options.sense);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e = 0; e < m; ++e) prog.set_objective(p.variable(i, e), objective(i, e));
        for (const auto& row : p.rank_rows) {
            std::vector<lp::Term> terms;
            for (std::size_t e : row.items.items()) terms.push_back({p.variable(row.agent, e), Rational(1)});
            prog.add_constraint(std::move(terms), lp::Relation::LessEqual, Rational(row.bound), "rank");
        }
        for (std::size_t e = 0; e < m; ++e) {
            std::vector<lp::Term> terms;
            for (std::size_t i = 0; i < n; ++i) terms.push_back({p.variable(i, e), Rational(1)});
            prog.add_constraint(std::move(terms), lp::Relation::LessEqual, Rational(1), "column");
        }
        for (const auto& c : extras) {
            std::vector<lp::Term> terms;
            for (const auto& t : c.terms) terms.push_back({p.variable(t.agent, t.item), t.coef});
            prog.add_constraint(std::move(terms), c.relation, c.rhs, c.label);
        }
        const auto res = lp::simplex(prog);
        out.status = res.status;
        out.farkas = res.farkas;
        if (res.status == lp::Status::Optimal) {
            out.pi = FractionalAssignment(n, m);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t e = 0; e < m; ++e) out.pi(i, e) = res.x[p.variable(i, e)];
            out.value = res.value;
        }
        out.program = std::move(prog);
        return out;
    }

    const PolytopeP p = build_P_vrep(inst, options.maximal_vertices);
    const std::size_t k = p.vertices.size();
    lp::LinearProgram prog(k, options.sense);
    auto value_on = [&](const DeterministicAssignment& x, auto&& coef) {
        Rational v = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e : x.bundles[i].items()) v += coef(i, e);
        return v;
    };
    for (std::size_t v = 0; v < k; ++v)
        prog.set_objective(v, value_on(p.vertices[v], [&](std::size_t i, std::size_t e) { return objective(i, e); }));
    {
        std::vector<lp::Term> terms;
        for (std::size_t v = 0; v < k; ++v) terms.push_back({v, Rational(1)});
        prog.add_constraint(std::move(terms), lp::Relation::Equal, Rational(1), "convexity");
    }
    for (const auto& c : extras) {
        FractionalAssignment dense(n, m);
        for (const auto& t : c.terms) dense(t.agent, t.item) += t.coef;
        std::vector<lp::Term> terms;
        for (std::size_t v = 0; v < k; ++v) {
            Rational a = value_on(p.vertices[v], [&](std::size_t i, std::size_t e) { return dense(i, e); });
            if (a != 0) terms.push_back({v, std::move(a)});
        }
        prog.add_constraint(std::move(terms), c.relation, c.rhs, c.label);
    }
    const auto res = lp::simplex(prog);
    out.status = res.status;
    out.farkas = res.farkas;
    if (res.status == lp::Status::Optimal) {
        Lottery lottery;
        for (std::size_t v = 0; v < k; ++v)
            if (res.x[v] != 0) lottery.support.push_back({res.x[v], p.vertices[v]});
        out.pi = induced_fractional(lottery, n, m);
        out.lottery = std::move(lottery);
        out.value = res.value;
    }
    out.program = std::move(prog);
    return out;
}

}  // namespace fairmat
