#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftk/coupling.hpp"

using namespace ftk;
using namespace ftk::cpl;
using brick::FamilyKind;

namespace {

Rat frac(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// depth-1 law with overlapping but distinct conditionals:
// from 0 -> uniform{0,1}, from 1 -> uniform{1,2}
FiniteProcessLaw tiny_law() {
    FiniteProcessLaw law;
    law.states = {{0, 1, 2}, {0, 1}};
    law.initial = Dist::uniform({0, 1});
    law.kernels.resize(1);
    law.kernels[0].emplace(0, Dist::uniform(std::vector<uint64_t>{0, 1}));
    law.kernels[0].emplace(1, Dist::uniform(std::vector<uint64_t>{1, 2}));
    return law;
}

} // namespace

TEST_CASE("chain law of a glued chain is exactly stochastic") {
    auto chain = brick::glue_constant_q(FamilyKind::Quartic, 5, 1);
    auto law = chain_law(chain);
    CHECK(law.depth() == 2);
    CHECK(law.states[0].size() == 25);
    CHECK(law.states[1].size() == 3125);
    CHECK(law.states[2].size() == 625);
    std::string why;
    INFO(why);
    CHECK(law.validate(&why));
    // odd step appends a uniform J; even step is uniform on the block
    CHECK(law.kernels[1].at(17).atoms().size() == 5);
    CHECK(law.kernels[0].at(17 * 5 + 2).atoms().size() == 5);
    CHECK(law.kernels[0].at(88).mass(law.kernels[0].at(88).atoms()[0].first) ==
          frac(1, 5));

    auto big = brick::glue_constant_q(FamilyKind::Matrix, 8, 1);
    CHECK_THROWS_AS(chain_law(big), sw::ExplicitBudgetError);
}

TEST_CASE("greedy maximal joint kernel: exact meet and residual") {
    auto law = tiny_law();
    // pair (from 0, from 1): meet at state 1 with mass 1/2, residual (0, 2)
    auto joint = strategy_joint_kernel(law, StrategyKind::GreedyMaximal, 0, 0, 1);
    // pair codes ia * 3 + ib over state indices
    CHECK(joint.mass(1 * 3 + 1) == frac(1, 2));
    CHECK(joint.mass(0 * 3 + 2) == frac(1, 2));
    CHECK(joint.atoms().size() == 2);
    // identical conditionals couple on the diagonal with full mass
    auto same = strategy_joint_kernel(law, StrategyKind::GreedyMaximal, 0, 1, 1);
    CHECK(same.mass(1 * 3 + 1) == frac(1, 2));
    CHECK(same.mass(2 * 3 + 2) == frac(1, 2));
}

TEST_CASE("strategies have the exact conditional marginals") {
    auto law = tiny_law();
    for (auto kind : {StrategyKind::GreedyMaximal, StrategyKind::Diagonal,
                      StrategyKind::IndependentProduct}) {
        auto chk = verify_strategy(law, kind);
        INFO(chk.witness);
        CHECK(chk.consistent);
        CHECK(chk.pairs_checked == 4);
    }
}

TEST_CASE("meet mass of uniform block kernels is the overlap") {
    auto fam = brick::quartic_partition_family(5);
    auto rng = derive(4, "test-overlap-tv");
    for (int t = 0; t < 50; ++t) {
        uint64_t za = rng.below(fam.f0_size), zb = rng.below(fam.f0_size);
        uint64_t ia = rng.below(fam.r1), ib = rng.below(fam.r1);
        auto A = Dist::uniform(fam.block(za, ia));
        auto B = Dist::uniform(fam.block(zb, ib));
        Rat k(fam.intersection_size(za, ia, zb, ib), fam.r2);
        k.canonicalize();
        CHECK(overlap(A, B) == k);
        CHECK(tv(A, B) == Rat(1) - k);
    }
}

TEST_CASE("per-step separation bounds") {
    auto quintic = brick::assemble_strong_brick(brick::quartic_partition_family(5));
    auto rq = step_separation_bound(quintic);
    CHECK(rq.ok);
    CHECK(rq.exhaustive);
    CHECK(rq.worst_separation == frac(1, 5));

    auto mat = brick::assemble_strong_brick(brick::matrix_partition_family(2));
    auto rm = step_separation_bound(mat);
    CHECK(rm.ok);
    CHECK_FALSE(rm.exhaustive);
    CHECK(rm.worst_separation >= frac(1, 2));
}

TEST_CASE("wilson 99% intervals") {
    auto iv = wilson99(500, 1000);
    CHECK(iv.point == doctest::Approx(0.5));
    CHECK(iv.low < 0.5);
    CHECK(iv.high > 0.5);
    CHECK(iv.high - iv.low < 0.09);
    CHECK(wilson99(0, 1000).low == 0.0);
    CHECK(wilson99(1000, 1000).high == doctest::Approx(1.0));
    CHECK(wilson99(0, 0).point == 0.0);
}

TEST_CASE("immersion checker: three canonical cases") {
    SUBCASE("greedy coupling of the tiny law is immersed") {
        auto oc = coupled_chain(tiny_law(), StrategyKind::GreedyMaximal,
                                StartMode::IndependentAtDeepest);
        auto rep = immersion_check(oc);
        INFO(rep.witness);
        CHECK(rep.immersed);
    }
    SUBCASE("independent product is immersed") {
        auto oc = coupled_chain(tiny_law(), StrategyKind::IndependentProduct,
                                StartMode::IndependentAtDeepest, true);
        auto rep = immersion_check(oc);
        INFO(rep.witness);
        CHECK(rep.immersed);
    }
    SUBCASE("observing the wrong coordinate breaks immersion") {
        // W_{-1} = (e_{-1}, e_0) uniform on 4 states, W_0 = e_0; the
        // observed component is e_{-1} at the deep level, so its past says
        // nothing about the e_0 delivered at level 0
        ObservedChain oc;
        oc.sizes = {2, 4};
        oc.initial = Dist::uniform({0, 1, 2, 3});
        oc.kernel = [](uint32_t, uint64_t s) { return Dist::point(s % 2); };
        oc.component = [](uint32_t d, uint64_t s) { return d == 1 ? s / 2 : s; };
        auto rep = immersion_check(oc);
        CHECK_FALSE(rep.immersed);
        CHECK_FALSE(rep.witness.empty());
    }
}

TEST_CASE("coupling run: greedy on the depth-2 quartic chain") {
    auto chain = brick::glue_constant_q(FamilyKind::Quartic, 5, 1);
    auto rep = run_coupling(chain, StrategyKind::GreedyMaximal,
                            StartMode::IndependentAtDeepest, 20000, 42, 0.01);
    CHECK(rep.replicates == 20000);
    REQUIRE(rep.levels.size() == 3);
    CHECK(rep.levels[0].d == 2);
    CHECK(rep.levels[2].d == 0);
    CHECK(rep.analytic_bound == frac(1, 10));
    // deepest level: independent uniform on 625 states
    CHECK(rep.levels[0].p_neq.point == doctest::Approx(624.0 / 625).epsilon(0.01));
    // distinct even states force distinct odd states
    CHECK(rep.levels[1].neq >= rep.levels[0].neq);
    CHECK(rep.final_p_neq.low > 0.1);
    CHECK(rep.final_bound_ok);
    CHECK(rep.per_step_ok);
}

TEST_CASE("coupling run: diagonal from an identical start never separates") {
    auto chain = brick::glue_constant_q(FamilyKind::Quartic, 5, 1);
    auto rep = run_coupling(chain, StrategyKind::Diagonal, StartMode::Identical,
                            2000, 42);
    for (const auto& lvl : rep.levels) CHECK(lvl.neq == 0);
    CHECK(rep.final_p_neq.point == 0.0);
}

TEST_CASE("coupling run: independent product meets the necessity bound") {
    auto chain = brick::glue_constant_q(FamilyKind::Quartic, 5, 1);
    auto rep = run_coupling(chain, StrategyKind::IndependentProduct,
                            StartMode::IndependentAtDeepest, 20000, 42);
    CHECK(rep.necessity_checked);
    CHECK(rep.necessity_bound == frac(3124, 3125) * frac(1, 5));
    CHECK(rep.necessity_ok);
    // deepest odd level: distinct with probability 1 - 1/3125
    CHECK(rep.all_odd_neq.point > 0.99);
}

TEST_CASE("coupling run: matrix q=8 depth-6 chain (smoke)") {
    auto chain = brick::glue_constant_q(FamilyKind::Matrix, 8, 3);
    CHECK(chain.depth() == 6);
    Rat bound = frac(1, 2) * frac(7, 8) * frac(7, 8) * frac(7, 8);
    CHECK(bound == frac(343, 1024));
    auto rep = run_coupling(chain, StrategyKind::GreedyMaximal,
                            StartMode::IndependentAtDeepest, 2000, 42, 0.05);
    CHECK(rep.analytic_bound == bound);
    CHECK(rep.final_bound_ok);
}

TEST_CASE("icosiness probe") {
    auto chain = brick::glue_constant_q(FamilyKind::Quartic, 5, 1);
    auto probe = icosiness_probe(
        chain, 0.05, {StrategyKind::GreedyMaximal, StrategyKind::Diagonal}, 5000, 42);
    CHECK(probe.analytic_bound == frac(1, 10));
    CHECK(probe.negates_icosiness);
    CHECK(probe.per_strategy.size() == 2);
    CHECK(probe.min_p_neq > 0.09);

    auto no = icosiness_probe(chain, 0.5, {StrategyKind::GreedyMaximal}, 2000, 42);
    CHECK_FALSE(no.negates_icosiness);
}

TEST_CASE("split-words probe: first letters decouple") {
    auto spec = sw::SplitWordsSpec::from_lengths(2, {1, 2, 4});
    double p = split_words_probe(spec, 20000, 42);
    CHECK(p == doctest::Approx(0.5).epsilon(0.05));
}
