#include <gtest/gtest.h>

#include <random>

#include "fairmat/fairmat.hpp"
#include "oracles.hpp"

using namespace fairmat;
using oracle::q;

namespace {

FractionalAssignment halves(std::size_t n, std::size_t m) {
    FractionalAssignment pi(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t e = 0; e < m; ++e) pi(i, e) = q(1, 2);
    return pi;
}

}  // namespace

// Feasibility and decomposition -------------------------------------------------

TEST(CheckFeasible, DecompositionsInduceThePoint) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 40; ++t) {
        RandomParams p;
        p.n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        p.m = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        p.families = t % 2 ? FamilyMix::Laminar : FamilyMix::Explicit;
        const Instance inst = random_instance(p, rng());
        // A random lottery over feasible assignments gives a point of P.
        const auto all = oracle::assignments(inst);
        Lottery l;
        Rational total = 0;
        for (int k = 0; k < 3; ++k) {
            const Rational w = std::uniform_int_distribution<int>(1, 5)(rng);
            l.support.push_back({w, all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)]});
            total += w;
        }
        for (auto& entry : l.support) entry.probability /= total;
        const auto pi = induced_fractional(inst, l);
        const auto r = check_feasible(inst, pi);
        ASSERT_TRUE(r.feasible);
        EXPECT_EQ(induced_fractional(inst, *r.decomposition), pi);
        EXPECT_LE(r.decomposition->support.size(), inst.n * inst.m() + 1);
        EXPECT_TRUE(cert::check(inst, cert::Decomposition{pi, *r.decomposition}).ok);
    }
}

TEST(CheckFeasible, SeparationsAreValid) {
    const Instance ex1 = gallery("ex1").instance;
    FractionalAssignment over(2, 4);
    over(0, 2) = q(3, 4);
    over(0, 3) = q(3, 4);  // breaks |X ∩ {c,d}| ≤ 1 in expectation
    const auto r = check_feasible(ex1, over);
    ASSERT_FALSE(r.feasible);
    EXPECT_TRUE(cert::check(ex1, cert::Separation{over, r.separation->y, r.separation->y0}).ok);

    FractionalAssignment negative(2, 4);
    negative(1, 1) = q(-1, 3);
    const auto n = check_feasible(ex1, negative);
    ASSERT_FALSE(n.feasible);
    EXPECT_TRUE(cert::check(ex1, cert::Separation{negative, n.separation->y, n.separation->y0}).ok);

    const Instance no = build_partition_reduction({1, 1, 3});
    const auto h = check_feasible(no, halves(2, 3));
    ASSERT_FALSE(h.feasible);
    EXPECT_TRUE(cert::check(no, cert::Separation{halves(2, 3), h.separation->y, h.separation->y0}).ok);
    EXPECT_THROW(decompose(no, halves(2, 3)), InfeasiblePoint);
}

TEST(CheckFeasible, ShapeMismatchIsRejected) {
    EXPECT_THROW(check_feasible(gallery("ex1").instance, halves(3, 4)), InvalidInstance);
}

TEST(ChoiceOracle, LexLpMatchesClosedForm) {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 60; ++t) {
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        const auto f = detail::random_laminar(m, rng);
        const auto pref = detail::random_pref(m, rng);
        Vector x(m);
        for (auto& v : x) v = q(std::uniform_int_distribution<int>(0, 4)(rng), 4);
        EXPECT_EQ(choice_oracle_lex_lp(f, pref, x), choice(RankOracle(f), pref, x));
    }
}

TEST(BruteForceSearch, FindsEfficientEnvyFreeLotteryOnExampleOne) {
    const Instance inst = gallery("ex1").instance;
    const auto l = brute_force_search(inst);
    ASSERT_TRUE(l);
    const auto pi = induced_fractional(inst, *l);
    EXPECT_TRUE(is_sd_efficient(inst, pi).efficient);
    EXPECT_TRUE(is_sd_envy_free(inst, *l).all_satisfied());
}

TEST(BruteForceSearch, FindsNothingOnTheNonMatroidCounterexample) {
    EXPECT_FALSE(brute_force_search(gallery("thm4").instance));
}

// Certificates -----------------------------------------------------------------

TEST(Certificates, TamperedDecompositionIsRejected) {
    const Instance inst = gallery("ex2").instance;
    const auto pi = mech_eating(inst).pi;
    auto l = decompose(inst, pi);
    EXPECT_TRUE(cert::check(inst, cert::Decomposition{pi, l}).ok);
    l.support.front().probability += q(1, 10);
    EXPECT_FALSE(cert::check(inst, cert::Decomposition{pi, l}).ok);
}

TEST(Certificates, DominatingPointMustDominate) {
    const Instance inst = gallery("ex1").instance;
    const auto pi = halves(2, 4);
    EXPECT_FALSE(cert::check(inst, cert::DominatingPoint{pi, pi, std::nullopt}).ok);
    FractionalAssignment better = pi;
    better(0, 0) = 1;  // column a over-allocated
    EXPECT_FALSE(cert::check(inst, cert::DominatingPoint{pi, better, std::nullopt}).ok);
}

TEST(Certificates, EnvyWitnessNeedsTheActualGap) {
    const Instance inst = gallery("ex2").instance;
    const auto pi = mech_naive_ps(inst).pi;
    const auto l = decompose(inst, pi);
    const auto report = is_sd_envy_free(inst, l);
    const auto* v = report.find(0, 1);
    ASSERT_TRUE(v && !v->satisfied);
    EXPECT_TRUE(cert::check(inst, cert::EnvyWitness{l, 0, 1, *v->witness, v->lhs, v->rhs}).ok);
    EXPECT_FALSE(cert::check(inst, cert::EnvyWitness{l, 0, 1, *v->witness, v->rhs, v->rhs}).ok);
    EXPECT_FALSE(cert::check(inst, cert::EnvyWitness{l, 1, 0, 0, q(0), q(1)}).ok);
}

TEST(Certificates, JsonRoundTripPreservesValidity) {
    const Instance inst = gallery("ex1").instance;
    FractionalAssignment mid(2, 4);
    mid(0, 0) = mid(0, 1) = mid(0, 2) = mid(1, 0) = mid(1, 1) = mid(1, 2) = q(1, 2);
    const auto r = is_sd_efficient(inst, mid);
    ASSERT_FALSE(r.efficient);
    const cert::Certificate c = cert::DominatingPoint{mid, *r.dominating, std::nullopt};
    const auto back = cert::from_json(inst, cert::to_json(inst, c));
    EXPECT_EQ(cert::kind_name(back), "DominatingPoint");
    EXPECT_TRUE(cert::check(inst, back).ok);
    EXPECT_THROW(cert::from_json(inst, io::json::parse(R"({"kind": "Nonsense"})")), ParseError);
}

// Impossibility producers ------------------------------------------------------

TEST(NonMatroidPair, CertificatesRecheck) {
    const auto c = certify_thm4_nonexistence();
    EXPECT_EQ(c.infeasibility.variables.size(), 6u);
    EXPECT_TRUE(c.forced_rows_implied);
    EXPECT_TRUE(cert::check_nonexistence(c.instance, c.support, c.infeasibility).ok);
    for (const auto& v : c.infeasibility.variables) EXPECT_EQ(v.assigned(), ItemSet::full(4));
}

TEST(NonMatroidPair, TamperedMultipliersFail) {
    auto c = certify_thm4_nonexistence();
    auto broken = c.infeasibility;
    for (auto& y : broken.y) y = 0;
    EXPECT_FALSE(cert::check(c.instance, broken).ok);
    // Leaning on a forced row is not allowed.
    auto leaning = c.infeasibility;
    leaning.y.back() = 1;
    EXPECT_FALSE(cert::check_nonexistence(c.instance, c.support, leaning).ok);
    // Dropping a restricted assignment leaves a hole in the cover.
    auto sr = c.support;
    sr.dominated.pop_back();
    EXPECT_FALSE(cert::check_nonexistence(c.instance, sr, c.infeasibility).ok);
}

TEST(ThreeAgentMatroid, RestrictedPolytopeMatchesPrintedParametrisation) {
    const auto r = certify_thm5_sampling(100, 3);
    EXPECT_EQ(r.undominated, 0u);
    EXPECT_EQ(r.parametric_mismatches, 0u);
    EXPECT_EQ(r.directions_uncovered, 0u);
    EXPECT_TRUE(r.bounds_confirmed);
    EXPECT_EQ(r.gamma_min, q(1, 3));
    EXPECT_EQ(r.alpha_max, q(1, 2));
    EXPECT_LE(r.beta_max, q(3, 4));
    for (const auto& v : r.vertices) EXPECT_TRUE(check_feasible(thm5_instance(), v).feasible);
}

TEST(ThreeAgentMatroid, FourAgentExtension) {
    const auto r = certify_thm5_sampling(50, 5, 4);
    EXPECT_FALSE(r.vertices.empty());
    EXPECT_EQ(r.undominated, 0u);
    EXPECT_TRUE(r.bounds_confirmed);
    const Instance inst = thm5_general(4);
    for (const auto& c : r.vertex_certificates) EXPECT_TRUE(cert::check(inst, c).ok);
}

TEST(ThreeAgentMatroid, NoEfficientEnvyFreeAssignmentFoundBySearch) {
    EXPECT_FALSE(brute_force_search(thm5_instance(), SearchOptions{3, 1}));
}

TEST(VertexEnumeration, UnitSquare) {
    std::vector<detail::DenseRow> rows{{{q(1), q(0)}, q(1), false}, {{q(0), q(1)}, q(1), false}};
    std::size_t dim = 0;
    const auto v = detail::enumerate_vertices(rows, 2, dim);
    EXPECT_EQ(dim, 2u);
    EXPECT_EQ(v.size(), 4u);
}

TEST(VertexEnumeration, SegmentFromImplicitEquality) {
    // x + y ≤ 1 and x + y ≥ 1 together: the segment between (1,0) and (0,1).
    std::vector<detail::DenseRow> rows{{{q(1), q(1)}, q(1), false}, {{q(-1), q(-1)}, q(-1), false}};
    std::size_t dim = 0;
    const auto v = detail::enumerate_vertices(rows, 2, dim);
    EXPECT_EQ(dim, 1u);
    EXPECT_EQ(v.size(), 2u);
}
