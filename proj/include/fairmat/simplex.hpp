#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairmat/rational.hpp"

namespace fairmat::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Maximize, Minimize };

struct Term {
    std::size_t var = 0;
    Rational coef;
};

struct Constraint {
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    Rational rhs;
    std::string label;
};

/// max/min c·x subject to rows, with every variable implicitly ≥ 0.
class LinearProgram {
public:
    explicit LinearProgram(std::size_t num_vars = 0, Sense sense = Sense::Maximize)
        : sense_(sense), objective_(num_vars, Rational(0)) {}

    std::size_t add_variable(Rational cost = 0) {
        objective_.push_back(std::move(cost));
        return objective_.size() - 1;
    }

    void set_objective(std::size_t var, Rational c) { objective_.at(var) = std::move(c); }
    void set_sense(Sense s) { sense_ = s; }

    void add_constraint(std::vector<Term> terms, Relation relation, Rational rhs, std::string label = {}) {
        for (const auto& t : terms)
            if (t.var >= objective_.size()) throw Error("constraint references unknown variable");
        constraints_.push_back({std::move(terms), relation, std::move(rhs), std::move(label)});
    }

    std::size_t num_vars() const { return objective_.size(); }
    std::size_t num_constraints() const { return constraints_.size(); }
    Sense sense() const { return sense_; }
    const Vector& objective() const { return objective_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    Rational evaluate(const Vector& x) const {
        Rational v = 0;
        for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * x[j];
        return v;
    }

    /// Exact feasibility of a point (including x ≥ 0).
    bool satisfied_by(const Vector& x) const {
        if (x.size() != num_vars()) return false;
        for (const auto& v : x)
            if (v < 0) return false;
        for (const auto& c : constraints_) {
            Rational lhs = 0;
            for (const auto& t : c.terms) lhs += t.coef * x[t.var];
            if (c.relation == Relation::LessEqual && lhs > c.rhs) return false;
            if (c.relation == Relation::GreaterEqual && lhs < c.rhs) return false;
            if (c.relation == Relation::Equal && lhs != c.rhs) return false;
        }
        return true;
    }

private:
    Sense sense_;
    Vector objective_;
    std::vector<Constraint> constraints_;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    Vector x;        // optimal basic solution
    Rational value;  // objective at x, in the LP's own sense
    Vector farkas;   // one multiplier per constraint when infeasible
    Vector ray;      // improving direction when unbounded
    std::size_t pivots = 0;
};

/// Checks y against the rows of `lp`: y_k ≥ 0 on ≤ rows, y_k ≤ 0 on ≥ rows,
/// Σ y_k a_k ≥ 0 componentwise and Σ y_k b_k < 0. Such a y proves that no
/// x ≥ 0 satisfies the rows.
inline bool verify_farkas(const LinearProgram& lp, const Vector& y) {
    const auto& rows = lp.constraints();
    if (y.size() != rows.size()) return false;
    Vector combo(lp.num_vars(), Rational(0));
    Rational rhs = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].relation == Relation::LessEqual && y[k] < 0) return false;
        if (rows[k].relation == Relation::GreaterEqual && y[k] > 0) return false;
        if (y[k] == 0) continue;
        for (const auto& t : rows[k].terms) combo[t.var] += y[k] * t.coef;
        rhs += y[k] * rows[k].rhs;
    }
    for (const auto& c : combo)
        if (c < 0) return false;
    return rhs < 0;
}

namespace detail {

/// Dense two-phase tableau, Bland's rule throughout.
class Tableau {
public:
    explicit Tableau(const LinearProgram& lp) : lp_(lp) { build(); }

    Result solve() {
        Result result;
        run(/*phase_one=*/true, result);
        if (-neg_z_ > 0) {
            result.status = Status::Infeasible;
            result.farkas = farkas();
            return result;
        }
        drive_out_artificials(result);
        load_phase_two_costs();
        if (auto enter = run(/*phase_one=*/false, result)) {
            result.status = Status::Unbounded;
            result.ray = ray(*enter);
            return result;
        }
        result.status = Status::Optimal;
        result.x = Vector(lp_.num_vars(), Rational(0));
        for (std::size_t r = 0; r < rows_; ++r)
            if (basis_[r] < lp_.num_vars()) result.x[basis_[r]] = b_[r];
        result.value = lp_.evaluate(result.x);
        return result;
    }

private:
    void build() {
        const auto& cons = lp_.constraints();
        rows_ = cons.size();
        const std::size_t n = lp_.num_vars();
        sign_.assign(rows_, 1);
        std::vector<Relation> rel(rows_);
        std::size_t slacks = 0, artificials = 0;
        for (std::size_t r = 0; r < rows_; ++r) {
            rel[r] = cons[r].relation;
            if (cons[r].rhs < 0) {
                sign_[r] = -1;
                if (rel[r] == Relation::LessEqual) rel[r] = Relation::GreaterEqual;
                else if (rel[r] == Relation::GreaterEqual) rel[r] = Relation::LessEqual;
            }
            if (rel[r] != Relation::Equal) ++slacks;
            if (rel[r] != Relation::LessEqual) ++artificials;
        }
        first_artificial_ = n + slacks;
        cols_ = first_artificial_ + artificials;
        a_.assign(rows_, std::vector<Rational>(cols_, Rational(0)));
        b_.assign(rows_, Rational(0));
        basis_.assign(rows_, 0);
        identity_col_.assign(rows_, 0);
        std::size_t next_slack = n, next_art = first_artificial_;
        for (std::size_t r = 0; r < rows_; ++r) {
            for (const auto& t : cons[r].terms) a_[r][t.var] += sign_[r] * t.coef;
            b_[r] = sign_[r] * cons[r].rhs;
            if (rel[r] == Relation::LessEqual) {
                a_[r][next_slack] = 1;
                identity_col_[r] = basis_[r] = next_slack++;
            } else {
                if (rel[r] == Relation::GreaterEqual) a_[r][next_slack++] = -1;
                a_[r][next_art] = 1;
                identity_col_[r] = basis_[r] = next_art++;
            }
        }
        // Phase one: minimise the sum of artificials.
        cost_.assign(cols_, Rational(0));
        for (std::size_t j = first_artificial_; j < cols_; ++j) cost_[j] = 1;
        reset_reduced_costs();
    }

    void reset_reduced_costs() {
        d_ = cost_;
        neg_z_ = 0;
        for (std::size_t r = 0; r < rows_; ++r) {
            const Rational& cb = cost_[basis_[r]];
            if (cb == 0) continue;
            for (std::size_t j = 0; j < cols_; ++j)
                if (a_[r][j] != 0) d_[j] -= cb * a_[r][j];
            neg_z_ -= cb * b_[r];
        }
    }

    void load_phase_two_costs() {
        cost_.assign(cols_, Rational(0));
        const auto& c = lp_.objective();
        for (std::size_t j = 0; j < lp_.num_vars(); ++j)
            cost_[j] = lp_.sense() == Sense::Maximize ? Rational(-c[j]) : c[j];
        reset_reduced_costs();
    }

    /// Pivots to optimality. Returns the entering column if the objective is
    /// unbounded along it.
    std::optional<std::size_t> run(bool phase_one, Result& result) {
        const std::size_t limit = phase_one ? cols_ : first_artificial_;
        while (true) {
            std::optional<std::size_t> enter;
            for (std::size_t j = 0; j < limit; ++j)
                if (d_[j] < 0) {
                    enter = j;
                    break;
                }
            if (!enter) return std::nullopt;
            std::optional<std::size_t> leave;
            Rational best_ratio;
            for (std::size_t r = 0; r < rows_; ++r) {
                if (a_[r][*enter] <= 0) continue;
                Rational ratio = b_[r] / a_[r][*enter];
                if (!leave || ratio < best_ratio || (ratio == best_ratio && basis_[r] < basis_[*leave])) {
                    leave = r;
                    best_ratio = std::move(ratio);
                }
            }
            if (!leave) return enter;
            pivot(*leave, *enter);
            ++result.pivots;
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const Rational p = a_[r][c];
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < cols_; ++j)
            if (a_[r][j] != 0) {
                a_[r][j] /= p;
                nz.push_back(j);
            }
        b_[r] /= p;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r || a_[i][c] == 0) continue;
            const Rational f = a_[i][c];
            for (std::size_t j : nz) a_[i][j] -= f * a_[r][j];
            b_[i] -= f * b_[r];
        }
        if (d_[c] != 0) {
            const Rational f = d_[c];
            for (std::size_t j : nz) d_[j] -= f * a_[r][j];
            neg_z_ -= f * b_[r];
        }
        basis_[r] = c;
    }

    void drive_out_artificials(Result& result) {
        for (std::size_t r = 0; r < rows_; ++r) {
            if (basis_[r] < first_artificial_) continue;
            for (std::size_t j = 0; j < first_artificial_; ++j)
                if (a_[r][j] != 0) {
                    pivot(r, j);
                    ++result.pivots;
                    break;
                }
            // A row with no structural or slack entry is redundant; its
            // artificial stays basic at zero and never moves.
        }
    }

    /// Phase-one duals y_r = c_id(r) − d_id(r), negated and mapped back
    /// through the row sign normalisation.
    Vector farkas() const {
        Vector y(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            const std::size_t k = identity_col_[r];
            const Rational phase_one_cost = k >= first_artificial_ ? Rational(1) : Rational(0);
            y[r] = -(phase_one_cost - d_[k]) * sign_[r];
        }
        return y;
    }

    Vector ray(std::size_t enter) const {
        Vector d(lp_.num_vars(), Rational(0));
        if (enter < lp_.num_vars()) d[enter] = 1;
        for (std::size_t r = 0; r < rows_; ++r)
            if (basis_[r] < lp_.num_vars()) d[basis_[r]] = -a_[r][enter];
        return d;
    }

    const LinearProgram& lp_;
    std::size_t rows_ = 0, cols_ = 0, first_artificial_ = 0;
    std::vector<int> sign_;
    std::vector<std::vector<Rational>> a_;
    Vector b_, cost_, d_;
    Rational neg_z_;
    std::vector<std::size_t> basis_, identity_col_;
};

}  // namespace detail

/// Exact two-phase primal simplex with Bland's rule.
inline Result simplex(const LinearProgram& lp) { return detail::Tableau(lp).solve(); }

}  // namespace fairmat::lp
