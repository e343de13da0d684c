// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include "fairmat/fairmat.hpp"
#include "oracles.hpp"

using namespace fairmat;
using oracle::q;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

Outcome naive_ps_example() {
    const Instance inst = gallery("ex2").instance;
    const auto r = mech_naive_ps(inst);
    const auto expected = oracle::matrix({{q(1, 2), q(1, 2), q(1), q(0), q(0)}, {q(1, 2), q(1, 2), q(0), q(1), q(1)}});
    if (r.pi != expected) return fail("matrix differs");
    const auto lottery = decompose(inst, r.pi);
    const auto report = is_sd_envy_free(inst, lottery);
    const auto* pair = report.find(0, 1);
    if (pair == nullptr || pair->satisfied) return fail("pair (1,2) not flagged");
    if (!cert::check(inst, cert::EnvyWitness{lottery, 0, 1, *pair->witness, pair->lhs, pair->rhs}).ok)
        return fail("envy witness does not re-check");
    return {true, "agent 1 envies agent 2 at " + inst.items[*pair->witness].label};
}

Outcome eating_example() {
    const Instance inst = gallery("ex2").instance;
    const auto r = mech_eating(inst);
    const auto expected = oracle::matrix({{q(1, 2), q(1, 2), q(1), q(1, 2), q(0)}, {q(1, 2), q(1, 2), q(0), q(1, 2), q(1)}});
    if (r.pi != expected) return fail("matrix differs");
    if (!is_sd_efficient(inst, r.pi).efficient) return fail("not sd-efficient");
    if (!all_hold(ef_sufficient_matroid(inst, r.pi))) return fail("sufficient envy condition fails");
    return {};
}

Outcome choice_example() {
    const Instance inst = gallery("choice-example").instance;
    const Vector x{q(1, 2), q(1), q(1), q(1)};
    const Vector expected{q(1, 2), q(1), q(1, 2), q(0)};
    const auto got = choice(RankOracle(inst.constraints[0]), inst.prefs[0], x);
    if (got != expected) return fail("choice differs");
    if (choice_oracle_lex_lp(inst.constraints[0], inst.prefs[0], x) != expected) return fail("lex LP oracle differs");
    if (oracle::choice(inst.constraints[0], inst.prefs[0], x) != expected) return fail("brute-force oracle differs");
    return {};
}

Outcome example_one() {
    const Instance inst = gallery("ex1").instance;
    const auto p1 = oracle::matrix({{q(1, 2), q(1, 2), q(1, 2), q(1, 2)}, {q(1, 2), q(1, 2), q(1, 2), q(1, 2)}});
    const auto p2 = oracle::matrix({{q(1), q(1), q(0), q(0)}, {q(0), q(0), q(1), q(0)}});
    const auto p3 = oracle::matrix({{q(0), q(0), q(1), q(0)}, {q(1), q(1), q(0), q(0)}});
    for (const auto* p : {&p1, &p2, &p3})
        if (!is_sd_efficient(inst, *p).efficient) return fail("a printed assignment is not sd-efficient");
    if (!is_sd_envy_free_fractional(inst, p1).all_satisfied()) return fail("pi1 flagged");
    if (is_sd_envy_free_fractional(inst, p2).all_satisfied()) return fail("pi2 not flagged");
    if (is_sd_envy_free_fractional(inst, p3).all_satisfied()) return fail("pi3 not flagged");
    FractionalAssignment mid(2, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t e = 0; e < 4; ++e) mid(i, e) = (p2(i, e) + p3(i, e)) / 2;
    const auto r = is_sd_efficient(inst, mid);
    if (r.efficient || !r.dominating) return fail("mixture not flagged");
    if (!cert::check(inst, cert::DominatingPoint{mid, *r.dominating, std::nullopt}).ok) return fail("witness does not re-check");
    return {};
}

Outcome thm4_certificate() {
    const auto c = certify_thm4_nonexistence();
    for (const auto& x : oracle::assignments(c.instance)) {
        if (x.assigned() == ItemSet::full(c.instance.m())) continue;
        bool listed = false;
        for (const auto& d : c.support.dominated) listed = listed || d.first == x;
        if (!listed) return fail("a non-full-coverage assignment is not restricted");
    }
    if (!cert::check_nonexistence(c.instance, c.support, c.infeasibility).ok) return fail("certificates do not re-check");
    // Round trip through JSON before re-checking once more.
    const auto bundle = thm4_bundle_json(c);
    const Instance inst = io::instance_from(bundle["instance"]);
    const auto sr = std::get<cert::SupportRestriction>(cert::from_json(inst, bundle["certificates"][0]));
    const auto lp = std::get<cert::LotteryFarkas>(cert::from_json(inst, bundle["certificates"][1]));
    if (!cert::check_nonexistence(inst, sr, lp).ok) return fail("serialized certificates do not re-check");
    return {true, std::to_string(c.support.dominated.size()) + " restricted, " +
                      std::to_string(c.infeasibility.variables.size()) + " LP columns"};
}

Outcome thm5_evidence() {
    const auto r = certify_thm5_sampling(1000, 20240601);
    const Instance inst = thm5_instance();
    if (r.vertices.empty()) return fail("Q has no vertices");
    if (!r.all_certified()) return fail("an undominated point of Q");
    for (const auto& c : r.vertex_certificates)
        if (!cert::check(inst, c).ok) return fail("vertex certificate does not re-check");
    for (const auto& c : r.sample_certificates)
        if (!cert::check(inst, c).ok) return fail("sample certificate does not re-check");
    if (!(r.gamma_min >= q(1, 3) && r.alpha_max <= q(1, 2) && r.beta_max <= q(3, 4))) return fail("bounds not implied");
    if (r.status.find("not a universal") == std::string::npos) return fail("report lacks its epistemic status");
    return {true, std::to_string(r.vertices.size()) + " vertices, " + std::to_string(r.sample_certificates.size()) +
                      " samples; " + r.status};
}

Outcome two_agent_suite() {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        RandomParams p;
        p.n = 2;
        p.m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        p.families = FamilyMix::Laminar;
        const Instance inst = random_instance(p, rng());
        const auto r = mech_two_agent(inst);
        if (!is_sd_efficient(inst, r.pi).efficient) return fail("not efficient, trial " + std::to_string(t));
        if (!all_hold(ef_sufficient_matroid(inst, r.pi))) return fail("envy, trial " + std::to_string(t));
        if (!is_sd_proportional(inst, r.pi)) return fail("not proportional, trial " + std::to_string(t));
    }
    return {};
}

Outcome eating_suite() {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        RandomParams p;
        p.n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        p.m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        p.families = FamilyMix::Laminar;
        p.identical_preferences = true;
        const Instance inst = random_instance(p, rng());
        const auto r = mech_eating(inst);
        const std::string at = ", trial " + std::to_string(t);
        if (!is_sd_efficient(inst, r.pi).efficient) return fail("not efficient" + at);
        if (!all_hold(ef_sufficient_matroid(inst, r.pi))) return fail("envy" + at);
        const auto f = check_feasible(inst, r.pi);
        if (!f.feasible || !f.decomposition) return fail("infeasible" + at);
        if (f.decomposition->support.size() > inst.n * inst.m() + 1) return fail("support too large" + at);
        if (!validate_lottery(inst, *f.decomposition).empty()) return fail("bad lottery" + at);
        if (induced_fractional(inst, *f.decomposition) != r.pi) return fail("decomposition mismatch" + at);
    }
    return {};
}

Outcome rotation_suite() {
    std::mt19937_64 rng(13);
    std::size_t non_matroid = 0;
    for (int t = 0; t < 100; ++t) {
        RandomParams p;
        p.n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        p.m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        p.families = t % 3 == 0 ? FamilyMix::Laminar : FamilyMix::Explicit;
        p.max_explicit_sets = 6;
        p.identical_preferences = true;
        p.identical_constraints = true;
        Instance inst = random_instance(p, rng());
        if (t % 3 == 2) {
            std::vector<std::int64_t> w(inst.m());
            std::int64_t total = 0;
            for (auto& v : w) total += v = std::uniform_int_distribution<std::int64_t>(1, 5)(rng);
            const auto budget = ConstraintFamily::budget(inst.m(), w, q(total, 2));
            inst.constraints.assign(inst.n, budget);
        }
        non_matroid += !inst.constraints[0].is_matroid();
        const auto r = mech_rotation(inst);
        const std::string at = ", trial " + std::to_string(t);
        for (std::size_t i = 1; i < inst.n; ++i)
            if (r.pi.row_vector(i) != r.pi.row_vector(0)) return fail("rows differ" + at);
        ItemSet best;
        for (const auto& x : oracle::assignments(inst))
            if (oracle::lex_greater(inst.prefs[0], x.assigned(), best)) best = x.assigned();
        if (r.lottery->support.front().assignment.assigned() != best) return fail("union not lexicographically maximal" + at);
        if (!is_sd_efficient(inst, r.pi).efficient) return fail("not efficient" + at);
    }
    return {true, std::to_string(non_matroid) + " of 100 families are not matroids"};
}

Outcome partition_reduction() {
    auto half = [](const Instance& inst) {
        FractionalAssignment pi(2, inst.m());
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t e = 0; e < inst.m(); ++e) pi(i, e) = q(1, 2);
        return pi;
    };
    const Instance yes = build_partition_reduction({1, 2, 3});
    const auto fy = check_feasible(yes, half(yes));
    if (!fy.feasible || !cert::check(yes, cert::Decomposition{half(yes), *fy.decomposition}).ok)
        return fail("yes-instance not decomposed");
    const Instance no = build_partition_reduction({1, 1, 3});
    const auto fn = check_feasible(no, half(no));
    if (fn.feasible || !fn.separation) return fail("no-instance accepted");
    if (!cert::check(no, cert::Separation{half(no), fn.separation->y, fn.separation->y0}).ok)
        return fail("separation does not re-check");
    return {};
}

Outcome anonymous_mechanism() {
    Instance one;
    one.n = 2;
    one.items = make_items({"x"});
    one.prefs = {Preference::identity(1), Preference::identity(1)};
    one.constraints = {ConstraintFamily::free(1), ConstraintFamily::free(1)};
    const auto fw = frank_wolfe_qp(one);
    if (std::abs(fw.at(0, 0) - 0.5) > 1e-6 || std::abs(fw.at(1, 0) - 0.5) > 1e-6) return fail("not (1/2, 1/2)");

    const Instance ex1 = gallery("ex1").instance;
    const auto a = mech_anonymous(ex1);
    if (!a.snapped) return fail("ex1 snap rejected");
    if (!is_sd_efficient(ex1, a.result.pi).efficient) return fail("ex1 snapped output not efficient");

    // Agents with identical data swapped: the optimum must not move.
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        RandomParams p;
        p.n = 3;
        p.m = 4;
        p.families = FamilyMix::Laminar;
        Instance inst = random_instance(p, rng());
        inst.prefs[1] = inst.prefs[0];
        inst.constraints[1] = inst.constraints[0];
        Instance swapped = inst;
        std::swap(swapped.prefs[0], swapped.prefs[2]);
        std::swap(swapped.constraints[0], swapped.constraints[2]);
        const double v1 = frank_wolfe_qp(inst).objective, v2 = frank_wolfe_qp(swapped).objective;
        if (std::abs(v1 - v2) >= 2e-9) return fail("objective moved under a permutation");
    }
    return {};
}

Outcome cross_oracles() {
    std::mt19937_64 rng(19);
    for (int t = 0; t < 500; ++t) {
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const auto f = detail::random_laminar(m, rng);
        const auto pref = detail::random_pref(m, rng);
        Vector x(m);
        for (auto& v : x) v = q(std::uniform_int_distribution<int>(0, 6)(rng), 6);
        const auto got = choice(RankOracle(f), pref, x);
        if (got != choice_oracle_lex_lp(f, pref, x) || got != oracle::choice(f, pref, x))
            return fail("choice oracles disagree, trial " + std::to_string(t));
    }
    for (int t = 0; t < 200; ++t) {
        const std::size_t vars = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        lp::LinearProgram prog(vars, lp::Sense::Maximize);
        std::vector<Vector> a;
        Vector b, c(vars);
        for (auto& v : c) v = std::uniform_int_distribution<int>(-3, 5)(rng);
        for (std::size_t k = 0; k < vars; ++k) prog.set_objective(k, c[k]);
        auto add = [&](Vector row, Rational rhs, lp::Relation rel) {
            std::vector<lp::Term> terms;
            for (std::size_t k = 0; k < vars; ++k)
                if (row[k] != 0) terms.push_back({k, row[k]});
            prog.add_constraint(terms, rel, rhs);
            if (rel == lp::Relation::GreaterEqual) {
                for (auto& v : row) v = -v;
                rhs = -rhs;
            }
            a.push_back(row);
            b.push_back(rhs);
        };
        for (std::size_t r = 0; r < rows; ++r) {
            Vector row(vars);
            for (auto& v : row) v = std::uniform_int_distribution<int>(-2, 4)(rng);
            const bool ge = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
            add(row, std::uniform_int_distribution<int>(ge ? -2 : 0, 8)(rng), ge ? lp::Relation::GreaterEqual : lp::Relation::LessEqual);
        }
        // A box keeps the region bounded.
        Vector box(vars, Rational(1));
        add(box, 10, lp::Relation::LessEqual);
        const auto res = lp::simplex(prog);
        const auto brute = oracle::brute_lp_max(a, b, c);
        if (res.status == lp::Status::Infeasible) {
            if (brute) return fail("simplex infeasible, brute force feasible");
            if (!lp::verify_farkas(prog, res.farkas)) return fail("Farkas certificate rejected");
        } else if (res.status != lp::Status::Optimal || !brute || res.value != *brute) {
            return fail("LP optimum disagrees, trial " + std::to_string(t));
        }
    }
    for (std::size_t m = 1; m <= 8; ++m)
        for (int t = 0; t < 8; ++t) {
            const auto f = detail::random_laminar(m, rng);
            const RankOracle oracle(f);
            std::vector<std::size_t> r(std::size_t{1} << m);
            for (std::uint64_t s = 0; s < r.size(); ++s) {
                r[s] = oracle.rank(ItemSet(s));
                if (r[s] != oracle::rank(f, ItemSet(s))) return fail("rank differs from brute force");
            }
            for (std::uint64_t s = 0; s < r.size(); ++s)
                for (std::size_t e = 0; e < m; ++e) {
                    const std::uint64_t se = s | (std::uint64_t{1} << e);
                    if (r[se] < r[s] || r[se] > r[s] + 1) return fail("rank not monotone unit-increase");
                    for (std::size_t g = e + 1; g < m; ++g) {
                        const std::uint64_t sg = s | (std::uint64_t{1} << g), seg = se | sg;
                        if (s & (std::uint64_t{1} << e) || s & (std::uint64_t{1} << g)) continue;
                        if (r[se] + r[sg] < r[seg] + r[s]) return fail("rank not submodular");
                    }
                }
        }
    return {};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"naive PS on the nested-caps example", naive_ps_example},
        {"simultaneous eating on the nested-caps example", eating_example},
        {"worked choice function", choice_example},
        {"ex post vs sd-efficiency classification", example_one},
        {"two-agent non-matroid nonexistence certificate", thm4_certificate},
        {"three-agent matroid vertex and sampling evidence", thm5_evidence},
        {"two-agent LP mechanism property suite", two_agent_suite},
        {"eating mechanism property suite", eating_suite},
        {"rotation mechanism property suite", rotation_suite},
        {"PARTITION reduction", partition_reduction},
        {"anonymous mechanism", anonymous_mechanism},
        {"cross-oracle invariants", cross_oracles},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1) << ". " << criteria[k].first;
        if (!o.note.empty()) std::cout << " -- " << o.note;
        std::cout << " [" << std::fixed;
        std::cout.precision(1);
        std::cout << secs << "s]" << std::endl;
    }
    return failures;
}
