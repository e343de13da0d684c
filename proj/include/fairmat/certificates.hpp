#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fairmat/domain.hpp"
#include "fairmat/io.hpp"

// Certificates and their checkers. The checkers deliberately use only the
// domain model (membership oracles, exact rationals) and their own brute
// force, never the rank oracles, LP solver or mechanisms that produce the
// certificates.

namespace fairmat::cert {

/// π equals the marginals of `lottery`.
struct Decomposition {
    FractionalAssignment pi;
    Lottery lottery;
};

/// `y` is feasible and weakly sd-dominates `pi` for every agent, strictly
/// for one. Feasibility is shown by `y_lottery` when present, otherwise by
/// the rank inequalities (matroid instances only).
struct DominatingPoint {
    FractionalAssignment pi;
    FractionalAssignment y;
    std::optional<Lottery> y_lottery;
};

/// The envy inequality fails for (envier, envied) at `item`.
struct EnvyWitness {
    Lottery lottery;
    std::size_t envier = 0;
    std::size_t envied = 0;
    std::size_t item = 0;
    Rational lhs;
    Rational rhs;
};

/// Each listed assignment is dominated bundle-wise by a strictly larger
/// assignment, so an sd-efficient lottery never uses it.
struct SupportRestriction {
    std::vector<std::pair<DeterministicAssignment, DeterministicAssignment>> dominated;
};

/// y·χ_X + y0 ≥ 0 for all deterministic assignments X, y·π + y0 < 0.
struct Separation {
    FractionalAssignment pi;
    FractionalAssignment y;
    Rational y0;
};

/// A row of an LP over lottery weights p_X, described by its meaning so the
/// checker can rebuild its coefficients.
struct LotteryRow {
    enum class Kind { Sum, Envy, Forced };
    Kind kind = Kind::Sum;
    std::size_t i = 0, j = 0, e = 0;
    Rational value;  // Forced: Σ_{X : e ∈ X_i} p_X = value
};

/// Farkas multipliers proving that no p ≥ 0 over `variables` satisfies the
/// rows. Sum and Forced rows are equalities, Envy rows are ≥ 0.
struct LotteryFarkas {
    std::vector<DeterministicAssignment> variables;
    std::vector<LotteryRow> rows;
    Vector y;
};

using Certificate = std::variant<Decomposition, DominatingPoint, EnvyWitness, SupportRestriction, Separation, LotteryFarkas>;

inline std::string kind_name(const Certificate& c) {
    switch (c.index()) {
        case 0: return "Decomposition";
        case 1: return "DominatingPoint";
        case 2: return "EnvyWitness";
        case 3: return "SupportRestriction";
        default: return "LPInfeasibility";
    }
}

struct CheckResult {
    bool ok = true;
    std::string reason;

    static CheckResult fail(std::string why) { return {false, std::move(why)}; }
    explicit operator bool() const { return ok; }
};

namespace check_detail {

inline bool shaped(const Instance& inst, const FractionalAssignment& a) {
    return a.agents() == inst.n && a.items() == inst.m();
}

inline bool assignment_ok(const Instance& inst, const DeterministicAssignment& x) {
    if (x.bundles.size() != inst.n) return false;
    ItemSet used;
    for (std::size_t i = 0; i < inst.n; ++i) {
        if (!x.bundles[i].subset_of(inst.ground())) return false;
        if (!(used & x.bundles[i]).empty()) return false;
        if (!inst.constraints[i].contains(x.bundles[i])) return false;
        used = used | x.bundles[i];
    }
    return true;
}

inline std::vector<DeterministicAssignment> all_assignments(const Instance& inst) {
    std::vector<DeterministicAssignment> out;
    DeterministicAssignment cur{std::vector<ItemSet>(inst.n)};
    std::function<void(std::size_t)> go = [&](std::size_t e) {
        if (e == inst.m()) {
            out.push_back(cur);
            return;
        }
        go(e + 1);
        for (std::size_t i = 0; i < inst.n; ++i) {
            cur.bundles[i] = cur.bundles[i].with(e);
            if (inst.constraints[i].contains(cur.bundles[i])) go(e + 1);
            cur.bundles[i] = cur.bundles[i].without(e);
        }
    };
    go(0);
    return out;
}

inline std::size_t largest_feasible(const ConstraintFamily& f, ItemSet s) {
    std::size_t best = 0;
    for_each_subset(s, [&](ItemSet y) {
        if (y.size() > best && f.contains(y)) best = y.size();
    });
    return best;
}

inline FractionalAssignment marginals(const Instance& inst, const Lottery& lottery) {
    FractionalAssignment pi(inst.n, inst.m());
    for (const auto& entry : lottery.support)
        for (std::size_t i = 0; i < inst.n; ++i)
            for (std::size_t e : entry.assignment.bundles[i].items()) pi(i, e) += entry.probability;
    return pi;
}

inline CheckResult lottery_ok(const Instance& inst, const Lottery& lottery) {
    Rational total = 0;
    for (const auto& entry : lottery.support) {
        if (entry.probability <= 0) return CheckResult::fail("non-positive probability");
        if (!assignment_ok(inst, entry.assignment)) return CheckResult::fail("support entry is not a feasible assignment");
        total += entry.probability;
    }
    if (total != 1) return CheckResult::fail("probabilities sum to " + to_string(total));
    return {};
}

/// y ≥ 0, column sums ≤ 1 and y_i(X) ≤ max{|Y| : Y ⊆ X feasible} for all X.
/// These rows describe P only when every family is a matroid.
inline CheckResult rank_rows_ok(const Instance& inst, const FractionalAssignment& y) {
    for (const auto& f : inst.constraints)
        if (!f.is_matroid()) return CheckResult::fail("rank-row feasibility needs matroid families");
    for (std::size_t e = 0; e < inst.m(); ++e) {
        Rational col = 0;
        for (std::size_t i = 0; i < inst.n; ++i) {
            if (y(i, e) < 0) return CheckResult::fail("negative entry");
            col += y(i, e);
        }
        if (col > 1) return CheckResult::fail("column sum above 1");
    }
    for (std::size_t i = 0; i < inst.n; ++i) {
        bool ok = true;
        for_each_subset(inst.ground(), [&](ItemSet s) {
            if (!ok) return;
            Rational total = 0;
            for (std::size_t e : s.items()) total += y(i, e);
            if (total > largest_feasible(inst.constraints[i], s)) ok = false;
        });
        if (!ok) return CheckResult::fail("rank inequality violated for agent " + std::to_string(i));
    }
    return {};
}

inline Rational envy_term(const Instance& inst, const DeterministicAssignment& x, std::size_t i, std::size_t j,
                          std::size_t e) {
    const ItemSet upper = inst.prefs[i].upper_set(e);
    return Rational(static_cast<long long>((x.bundles[i] & upper).size())) -
           Rational(static_cast<long long>(largest_feasible(inst.constraints[i], x.bundles[j] & upper)));
}

}  // namespace check_detail

inline CheckResult check(const Instance& inst, const Decomposition& c) {
    if (auto r = check_detail::lottery_ok(inst, c.lottery); !r) return r;
    if (check_detail::marginals(inst, c.lottery) != c.pi) return CheckResult::fail("marginals differ from pi");
    return {};
}

inline CheckResult check(const Instance& inst, const DominatingPoint& c) {
    if (!check_detail::shaped(inst, c.pi) || !check_detail::shaped(inst, c.y)) return CheckResult::fail("shape mismatch");
    if (c.y_lottery) {
        if (auto r = check_detail::lottery_ok(inst, *c.y_lottery); !r) return r;
        if (check_detail::marginals(inst, *c.y_lottery) != c.y) return CheckResult::fail("y differs from its lottery");
    } else if (auto r = check_detail::rank_rows_ok(inst, c.y); !r) {
        return r;
    }
    bool strict = false;
    for (std::size_t i = 0; i < inst.n; ++i) {
        Rational cy = 0, cp = 0;
        for (std::size_t e : inst.prefs[i].order()) {
            cy += c.y(i, e);
            cp += c.pi(i, e);
            if (cy < cp) return CheckResult::fail("y does not weakly dominate pi for agent " + std::to_string(i));
            if (cy > cp) strict = true;
        }
    }
    if (!strict) return CheckResult::fail("y equals pi on every cumulative sum");
    return {};
}

inline CheckResult check(const Instance& inst, const EnvyWitness& c) {
    if (auto r = check_detail::lottery_ok(inst, c.lottery); !r) return r;
    if (c.envier >= inst.n || c.envied >= inst.n || c.envier == c.envied || c.item >= inst.m())
        return CheckResult::fail("bad indices");
    const ItemSet upper = inst.prefs[c.envier].upper_set(c.item);
    Rational lhs = 0, rhs = 0;
    for (const auto& entry : c.lottery.support) {
        lhs += entry.probability * Rational(static_cast<long long>((entry.assignment.bundles[c.envier] & upper).size()));
        rhs += entry.probability * Rational(static_cast<long long>(check_detail::largest_feasible(
                                       inst.constraints[c.envier], entry.assignment.bundles[c.envied] & upper)));
    }
    if (lhs != c.lhs || rhs != c.rhs) return CheckResult::fail("recorded sides do not match");
    if (!(lhs < rhs)) return CheckResult::fail("inequality is not violated");
    return {};
}

inline CheckResult check(const Instance& inst, const SupportRestriction& c) {
    for (const auto& [x, better] : c.dominated) {
        if (!check_detail::assignment_ok(inst, x) || !check_detail::assignment_ok(inst, better))
            return CheckResult::fail("entry is not a feasible assignment");
        bool strict = false;
        for (std::size_t i = 0; i < inst.n; ++i) {
            if (!x.bundles[i].subset_of(better.bundles[i])) return CheckResult::fail("dominator drops an item");
            if (x.bundles[i] != better.bundles[i]) strict = true;
        }
        if (!strict) return CheckResult::fail("dominator is not strictly larger");
    }
    return {};
}

inline CheckResult check(const Instance& inst, const Separation& c) {
    if (!check_detail::shaped(inst, c.pi) || !check_detail::shaped(inst, c.y)) return CheckResult::fail("shape mismatch");
    Rational at_pi = c.y0;
    for (std::size_t i = 0; i < inst.n; ++i)
        for (std::size_t e = 0; e < inst.m(); ++e) at_pi += c.y(i, e) * c.pi(i, e);
    if (!(at_pi < 0)) return CheckResult::fail("hyperplane does not cut off pi");
    for (const auto& x : check_detail::all_assignments(inst)) {
        Rational v = c.y0;
        for (std::size_t i = 0; i < inst.n; ++i)
            for (std::size_t e : x.bundles[i].items()) v += c.y(i, e);
        if (v < 0) return CheckResult::fail("hyperplane cuts off a deterministic assignment");
    }
    return {};
}

inline CheckResult check(const Instance& inst, const LotteryFarkas& c) {
    if (c.y.size() != c.rows.size()) return CheckResult::fail("multiplier count mismatch");
    for (const auto& x : c.variables)
        if (!check_detail::assignment_ok(inst, x)) return CheckResult::fail("variable is not a feasible assignment");
    Vector combo(c.variables.size(), Rational(0));
    Rational rhs = 0;
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
        const auto& row = c.rows[r];
        const Rational& y = c.y[r];
        if (y == 0) continue;
        if (row.kind == LotteryRow::Kind::Envy && y > 0) return CheckResult::fail("wrong sign on a >= row");
        if (row.kind == LotteryRow::Kind::Envy && (row.i >= inst.n || row.j >= inst.n || row.e >= inst.m()))
            return CheckResult::fail("bad envy row indices");
        for (std::size_t v = 0; v < c.variables.size(); ++v) {
            Rational a;
            switch (row.kind) {
                case LotteryRow::Kind::Sum: a = 1; break;
                case LotteryRow::Kind::Envy: a = check_detail::envy_term(inst, c.variables[v], row.i, row.j, row.e); break;
                case LotteryRow::Kind::Forced: a = c.variables[v].bundles.at(row.i).contains(row.e) ? 1 : 0; break;
            }
            combo[v] += y * a;
        }
        rhs += y * (row.kind == LotteryRow::Kind::Sum ? Rational(1) : row.kind == LotteryRow::Kind::Forced ? row.value : Rational(0));
    }
    for (const auto& a : combo)
        if (a < 0) return CheckResult::fail("combined row has a negative coefficient");
    if (!(rhs < 0)) return CheckResult::fail("combined right-hand side is not negative");
    return {};
}

inline CheckResult check(const Instance& inst, const Certificate& c) {
    return std::visit([&inst](const auto& v) { return check(inst, v); }, c);
}

/// Nonexistence of an sd-efficient, sd-envy-free lottery: the support
/// restriction excludes every assignment that is not an LP variable, and
/// the envy system over the remaining ones is infeasible without using
/// any Forced row (those are consequences, not assumptions).
inline CheckResult check_nonexistence(const Instance& inst, const SupportRestriction& sr, const LotteryFarkas& lp) {
    if (auto r = check(inst, sr); !r) return r;
    if (auto r = check(inst, lp); !r) return r;
    for (std::size_t r = 0; r < lp.rows.size(); ++r)
        if (lp.rows[r].kind == LotteryRow::Kind::Forced && lp.y[r] != 0)
            return CheckResult::fail("proof relies on a forced row");
    for (const auto& x : check_detail::all_assignments(inst)) {
        bool covered = false;
        for (const auto& v : lp.variables) covered = covered || v == x;
        for (const auto& d : sr.dominated) covered = covered || d.first == x;
        if (!covered) return CheckResult::fail("an assignment is neither restricted nor an LP variable");
    }
    return {};
}

// JSON --------------------------------------------------------------------

inline io::json to_json(const Instance& inst, const Certificate& c) {
    io::json j;
    j["kind"] = kind_name(c);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Decomposition>) {
                j["pi"] = io::pi_json(v.pi)["pi"];
                j["lottery"] = io::lottery_json(inst, v.lottery);
            } else if constexpr (std::is_same_v<T, DominatingPoint>) {
                j["pi"] = io::pi_json(v.pi)["pi"];
                j["y"] = io::pi_json(v.y)["pi"];
                if (v.y_lottery) j["y_lottery"] = io::lottery_json(inst, *v.y_lottery);
            } else if constexpr (std::is_same_v<T, EnvyWitness>) {
                j["lottery"] = io::lottery_json(inst, v.lottery);
                j["envier"] = v.envier;
                j["envied"] = v.envied;
                j["item"] = inst.items[v.item].label;
                j["lhs"] = to_string(v.lhs);
                j["rhs"] = to_string(v.rhs);
            } else if constexpr (std::is_same_v<T, SupportRestriction>) {
                j["dominated"] = io::json::array();
                for (const auto& [x, better] : v.dominated)
                    j["dominated"].push_back({{"assignment", io::assignment_json(inst, x)},
                                              {"dominated_by", io::assignment_json(inst, better)}});
            } else if constexpr (std::is_same_v<T, Separation>) {
                j["form"] = "separation";
                j["pi"] = io::pi_json(v.pi)["pi"];
                j["y"] = io::pi_json(v.y)["pi"];
                j["y0"] = to_string(v.y0);
            } else {
                j["form"] = "lottery-farkas";
                j["variables"] = io::json::array();
                for (const auto& x : v.variables) j["variables"].push_back(io::assignment_json(inst, x));
                j["rows"] = io::json::array();
                for (const auto& row : v.rows) {
                    io::json r;
                    switch (row.kind) {
                        case LotteryRow::Kind::Sum: r["type"] = "sum"; break;
                        case LotteryRow::Kind::Envy:
                            r = {{"type", "envy"}, {"envier", row.i}, {"envied", row.j}, {"item", inst.items[row.e].label}};
                            break;
                        case LotteryRow::Kind::Forced:
                            r = {{"type", "forced"}, {"agent", row.i}, {"item", inst.items[row.e].label}, {"value", to_string(row.value)}};
                            break;
                    }
                    j["rows"].push_back(r);
                }
                j["y"] = io::json::array();
                for (const auto& y : v.y) j["y"].push_back(to_string(y));
            }
        },
        c);
    return j;
}

inline Certificate from_json(const Instance& inst, const io::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        auto item = [&inst](const io::json& label) {
            const auto idx = inst.item_index(label.get<std::string>());
            if (!idx) throw ParseError("unknown item in certificate");
            return *idx;
        };
        if (kind == "Decomposition") return Decomposition{io::pi_from(j.at("pi")), io::lottery_from(inst, j.at("lottery"))};
        if (kind == "DominatingPoint") {
            DominatingPoint d{io::pi_from(j.at("pi")), io::pi_from(j.at("y")), std::nullopt};
            if (j.contains("y_lottery")) d.y_lottery = io::lottery_from(inst, j.at("y_lottery"));
            return d;
        }
        if (kind == "EnvyWitness")
            return EnvyWitness{io::lottery_from(inst, j.at("lottery")), j.at("envier").get<std::size_t>(),
                               j.at("envied").get<std::size_t>(), item(j.at("item")), io::rational_from(j.at("lhs")),
                               io::rational_from(j.at("rhs"))};
        if (kind == "SupportRestriction") {
            SupportRestriction s;
            for (const auto& d : j.at("dominated"))
                s.dominated.emplace_back(io::assignment_from(inst, d.at("assignment")),
                                         io::assignment_from(inst, d.at("dominated_by")));
            return s;
        }
        if (kind == "LPInfeasibility") {
            if (j.at("form") == "separation")
                return Separation{io::pi_from(j.at("pi")), io::pi_from(j.at("y")), io::rational_from(j.at("y0"))};
            LotteryFarkas f;
            for (const auto& x : j.at("variables")) f.variables.push_back(io::assignment_from(inst, x));
            for (const auto& r : j.at("rows")) {
                LotteryRow row;
                const std::string type = r.at("type").get<std::string>();
                if (type == "sum") {
                    row.kind = LotteryRow::Kind::Sum;
                } else if (type == "envy") {
                    row = {LotteryRow::Kind::Envy, r.at("envier").get<std::size_t>(), r.at("envied").get<std::size_t>(),
                           item(r.at("item")), 0};
                } else if (type == "forced") {
                    row = {LotteryRow::Kind::Forced, r.at("agent").get<std::size_t>(), 0, item(r.at("item")),
                           io::rational_from(r.at("value"))};
                } else {
                    throw ParseError("unknown row type '" + type + "'");
                }
                f.rows.push_back(std::move(row));
            }
            for (const auto& y : j.at("y")) f.y.push_back(io::rational_from(y));
            return f;
        }
        throw ParseError("unknown certificate kind '" + kind + "'");
    } catch (const io::json::exception& e) {
        throw ParseError(std::string("malformed certificate: ") + e.what());
    }
}

}  // namespace fairmat::cert
