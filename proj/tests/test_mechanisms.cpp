#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fairmat/fairmat.hpp"
#include "oracles.hpp"

using namespace fairmat;
using oracle::q;

namespace {

FractionalAssignment uniform_matrix(std::size_t n, std::size_t m, Rational v) {
    FractionalAssignment pi(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t e = 0; e < m; ++e) pi(i, e) = v;
    return pi;
}

}  // namespace

// Stochastic dominance ------------------------------------------------------

TEST(SdCompare, Relations) {
    const auto pref = Preference::identity(3);
    EXPECT_EQ(sd_compare(pref, Vector{q(1), q(0), q(0)}, Vector{q(0), q(1), q(0)}).relation, Dominance::StrictlyDominates);
    EXPECT_EQ(sd_compare(pref, Vector{q(0), q(1), q(0)}, Vector{q(1), q(0), q(0)}).relation, Dominance::DominatedStrictly);
    EXPECT_EQ(sd_compare(pref, Vector{q(1), q(0), q(0)}, Vector{q(1), q(0), q(0)}).relation, Dominance::Equal);
    EXPECT_EQ(sd_compare(pref, Vector{q(1), q(0), q(0)}, Vector{q(0), q(1), q(1)}).relation, Dominance::Incomparable);
}

TEST(SdEfficiency, ZeroAssignmentIsDominated) {
    const Instance inst = gallery("ex1").instance;
    const auto r = is_sd_efficient(inst, FractionalAssignment(2, 4));
    EXPECT_FALSE(r.efficient);
    ASSERT_TRUE(r.dominating);
    EXPECT_TRUE(cert::check(inst, cert::DominatingPoint{FractionalAssignment(2, 4), *r.dominating, std::nullopt}).ok);
}

TEST(SdEfficiency, NonMatroidUsesVertexRepresentation) {
    const Instance inst = gallery("thm4").instance;
    // Agent 2 takes everything: efficient, agent 1 cannot gain without harming 2.
    FractionalAssignment all(2, 4);
    for (std::size_t e = 0; e < 4; ++e) all(1, e) = 1;
    EXPECT_TRUE(is_sd_efficient(inst, all).efficient);
    FractionalAssignment partial = all;
    partial(1, 3) = 0;
    EXPECT_FALSE(is_sd_efficient(inst, partial).efficient);
}

TEST(SdEnvy, FractionalNeedsIdenticalConstraints) {
    EXPECT_THROW(is_sd_envy_free_fractional(gallery("ex2").instance, uniform_matrix(2, 5, q(1, 2))), ConstraintsNotIdentical);
}

TEST(SdEnvy, SufficientConditionImpliesLotteryEnvyFreeness) {
    std::mt19937_64 rng(21);
    int checked = 0;
    for (int t = 0; t < 60; ++t) {
        RandomParams p;
        p.n = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
        p.m = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        p.identical_preferences = true;
        const Instance inst = random_instance(p, rng());
        const auto pi = mech_eating(inst).pi;
        if (!all_hold(ef_sufficient_matroid(inst, pi))) continue;
        ++checked;
        EXPECT_TRUE(is_sd_envy_free(inst, decompose(inst, pi)).all_satisfied());
    }
    EXPECT_GT(checked, 30);
}

TEST(SdProportional, ImpliesSufficientEnvyForTwoAgents) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 40; ++t) {
        RandomParams p;
        p.m = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        const Instance inst = random_instance(p, rng());
        const auto pi = mech_two_agent(inst).pi;
        ASSERT_TRUE(is_sd_proportional(inst, pi));
        EXPECT_TRUE(all_hold(ef_sufficient_matroid(inst, pi)));
    }
}

TEST(Borda, WeightsAreDescending) {
    const Instance inst = gallery("sec41-caution").instance;
    const auto w = borda_weights(inst);
    EXPECT_EQ(w(0, 2), q(3));
    EXPECT_EQ(w(0, 0), q(1));
    EXPECT_EQ(w(1, 1), q(3));
}

// Mechanisms ------------------------------------------------------------------

TEST(Eating, NestedCapsExample) {
    const Instance inst = gallery("ex2").instance;
    const auto r = mech_eating(inst);
    EXPECT_EQ(r.pi, oracle::matrix({{q(1, 2), q(1, 2), q(1), q(1, 2), q(0)}, {q(1, 2), q(1, 2), q(0), q(1, 2), q(1)}}));
    EXPECT_TRUE(check_feasible(inst, r.pi).feasible);
}

TEST(Eating, RequiresIdenticalPreferencesAndMatroids) {
    EXPECT_THROW(mech_eating(gallery("sec41-caution").instance), PreferencesNotIdentical);
    EXPECT_THROW(mech_eating(gallery("thm4").instance), NotAMatroid);
}

TEST(NaivePs, NestedCapsExampleEnvies) {
    const Instance inst = gallery("ex2").instance;
    const auto r = mech_naive_ps(inst);
    EXPECT_EQ(r.pi, oracle::matrix({{q(1, 2), q(1, 2), q(1), q(0), q(0)}, {q(1, 2), q(1, 2), q(0), q(1), q(1)}}));
    const auto report = is_sd_envy_free(inst, decompose(inst, r.pi));
    ASSERT_NE(report.find(0, 1), nullptr);
    EXPECT_FALSE(report.find(0, 1)->satisfied);
    EXPECT_FALSE(all_hold(ef_sufficient_matroid(inst, r.pi)));
}

TEST(NaivePs, SevenItemVariantKeepsTheFiveItemPrefix) {
    // Agent 1 is capped out of e5 at t = 2, eats e6 alone until t = 3, and
    // both then split e7.
    const auto r = mech_naive_ps(gallery("ex2-e7").instance);
    EXPECT_EQ(r.pi, oracle::matrix({{q(1, 2), q(1, 2), q(1), q(0), q(0), q(1), q(1, 2)},
                                    {q(1, 2), q(1, 2), q(0), q(1), q(1), q(0), q(1, 2)}}));
}

TEST(NaivePs, CoincidesWithEatingWhenUnconstrained) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        Instance inst;
        inst.n = n;
        inst.items = make_items(detail::numbered("e", m));
        const auto pref = detail::random_pref(m, rng);
        inst.prefs.assign(n, pref);
        inst.constraints.assign(n, ConstraintFamily::free(m));
        EXPECT_EQ(mech_naive_ps(inst).pi, mech_eating(inst).pi);
    }
}

TEST(TwoAgent, CautionExampleIsProportional) {
    const Instance inst = gallery("sec41-caution").instance;
    const auto r = mech_two_agent(inst);
    EXPECT_TRUE(is_sd_efficient(inst, r.pi).efficient);
    EXPECT_TRUE(is_sd_proportional(inst, r.pi));
    EXPECT_TRUE(all_hold(ef_sufficient_matroid(inst, r.pi)));
    EXPECT_THROW(mech_two_agent(gallery("thm5").instance), WrongAgentCount);
}

TEST(Rotation, IdenticalAgentsGetEqualRows) {
    const Instance inst = gallery("thm4").instance;
    Instance identical = inst;
    identical.constraints[1] = identical.constraints[0];
    const auto r = mech_rotation(identical);
    ASSERT_TRUE(r.lottery);
    EXPECT_EQ(r.pi.row_vector(0), r.pi.row_vector(1));
    EXPECT_TRUE(is_sd_efficient(identical, r.pi).efficient);
    EXPECT_TRUE(is_sd_envy_free(identical, *r.lottery).all_satisfied());
    EXPECT_THROW(mech_rotation(inst), NotIdenticalAgents);
}

TEST(Rotation, PartitionReductionCoversEverything) {
    const Instance inst = build_partition_reduction({1, 2, 3});
    const auto r = mech_rotation(inst);
    EXPECT_EQ(r.pi, uniform_matrix(2, 3, q(1, 2)));
}

TEST(Anonymous, SingleItemSplitsEvenly) {
    Instance inst;
    inst.n = 2;
    inst.items = make_items({"x"});
    inst.prefs.assign(2, Preference::identity(1));
    inst.constraints.assign(2, ConstraintFamily::free(1));
    const auto a = mech_anonymous(inst);
    EXPECT_EQ(a.result.pi, uniform_matrix(2, 1, q(1, 2)));
    EXPECT_TRUE(a.snapped);
}

TEST(Anonymous, OutputIsEfficientOnSmallInstances) {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 10; ++t) {
        RandomParams p;
        p.n = 2;
        p.m = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const Instance inst = random_instance(p, rng());
        const auto a = mech_anonymous(inst);
        EXPECT_TRUE(check_feasible(inst, a.result.pi).feasible);
        if (a.snapped) {
            EXPECT_TRUE(is_sd_efficient(inst, a.result.pi).efficient);
        }
    }
}

TEST(FrankWolfe, ObjectiveMatchesDefinition) {
    const Instance inst = gallery("ex1").instance;
    const auto fw = frank_wolfe_qp(inst);
    // Direct evaluation of Σ_i Σ_e (Σ_{e' ⪰ e} (1 − x_ie'))².
    double direct = 0;
    for (std::size_t i = 0; i < inst.n; ++i) {
        double acc = 0;
        for (std::size_t e : inst.prefs[i].order()) {
            acc += 1 - fw.at(i, e);
            direct += acc * acc;
        }
    }
    EXPECT_NEAR(fw.objective, direct, 1e-9);
    EXPECT_LE(fw.gap, 1e-9);
}

TEST(NearestFraction, SmallDenominators) {
    EXPECT_EQ(nearest_fraction(0.3333333333), q(1, 3));
    EXPECT_EQ(nearest_fraction(0.25), q(1, 4));
    EXPECT_EQ(nearest_fraction(1.0), q(1));
}

// Gallery and generators --------------------------------------------------------

TEST(Gallery, EveryIdLoadsAndValidates) {
    for (const auto& id : gallery_ids()) {
        const auto g = gallery(id);
        EXPECT_TRUE(validate_instance(g.instance).empty()) << id;
        EXPECT_FALSE(g.notes.empty());
    }
    EXPECT_THROW(gallery("nope"), UnknownId);
    EXPECT_EQ(gallery("thm5-general-5").instance.n, 5u);
    EXPECT_EQ(gallery("thm5-general-5").instance.m(), 10u);
    EXPECT_EQ(gallery("thm5").instance.m(), 5u);
    EXPECT_THROW(thm5_general(2), BadN);
    EXPECT_EQ(gallery("npc-2,2").instance.m(), 2u);
}

TEST(Gallery, PartitionReductionBudget) {
    const Instance inst = build_partition_reduction({1, 2, 4});
    EXPECT_TRUE(inst.constraints[0].contains(ItemSet::singleton(0).with(1)));
    EXPECT_FALSE(inst.constraints[0].contains(ItemSet::singleton(2).with(0)));
    EXPECT_TRUE(identical_constraints(inst));
    EXPECT_THROW(build_partition_reduction({}), InvalidInstance);
}

TEST(Random, DeterministicInSeed) {
    RandomParams p;
    p.n = 3;
    p.m = 5;
    p.families = FamilyMix::Mixed;
    EXPECT_EQ(random_instance(p, 42), random_instance(p, 42));
    p.identical_constraints = true;
    EXPECT_TRUE(identical_constraints(random_instance(p, 7)));
}
