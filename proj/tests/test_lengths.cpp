#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftk/lengths.hpp"

using namespace ftk;
using namespace ftk::len;

TEST_CASE("dyadic lengths: 1, 2, 4, 8, 16") {
    auto s = generate_dyadic(4);
    REQUIRE(s.depth() == 4);
    for (uint64_t d = 0; d <= 4; ++d) {
        CHECK(s.levels[d].exponent == Int((unsigned long)d));
        CHECK(s.levels[d].exact);
        CHECK(s.levels[d].value == pow2((unsigned long)d));
    }
    CHECK(check_shape(s));
    CHECK_FALSE(s.truncated);
}

TEST_CASE("example1 lengths: 1, 2, 8, 128, 2^49, then symbolic") {
    auto s = generate_example1(8);
    REQUIRE(s.depth() >= 5);
    CHECK(s.levels[0].value == 1);
    CHECK(s.levels[1].value == 2);
    CHECK(s.levels[2].value == 8);
    CHECK(s.levels[3].value == 128);
    CHECK(s.levels[4].exponent == 49);
    // e_{-5} = 49 + floor(2^49 / 4) = 49 + 2^47
    CHECK(s.levels[5].exponent == Int(49) + pow2(47));
    CHECK_FALSE(s.levels[5].exact);
    CHECK(s.truncated);   // the recursion needs the materialized value
    CHECK(check_shape(s));
    CHECK(check_example1_bounds(s).empty());
}

TEST_CASE("theorem3 with alpha = 1: seeds and 2^11 -> 2^64 -> 2^2048") {
    auto s = generate_theorem3(AlphaSequence::constant(Rat(1)), 12);
    REQUIRE(s.depth() == 8);
    CHECK(s.truncated);
    std::vector<unsigned long> seed = {0, 1, 3, 6, 11};
    for (size_t d = 0; d < seed.size(); ++d) CHECK(s.levels[d].exponent == Int(seed[d]));
    CHECK(s.levels[5].exponent == 64);
    CHECK(s.levels[6].exponent == 2048);
    CHECK(s.levels[7].exponent == pow2(64));
    CHECK(s.levels[8].exponent == pow2(2048));
    CHECK(s.levels[6].exact);
    CHECK_FALSE(s.levels[7].exact);
    CHECK(check_shape(s));
    CHECK(check_minorations(s).empty());
    CHECK(check_estimates(s).empty());
}

TEST_CASE("theorem3 prefix lemmas hold for the preset alpha families") {
    for (auto a : {AlphaSequence::constant(Rat(1, 2)), AlphaSequence::even_odd(Rat(0), Rat(1)),
                   AlphaSequence::summable(), AlphaSequence::harmonic()}) {
        auto s = generate_theorem3(a, 10);
        CHECK(check_shape(s));
        CHECK(check_minorations(s).empty());
        CHECK(check_estimates(s).empty());
    }
}

TEST_CASE("alpha clamping") {
    auto a = AlphaSequence::summable();
    CHECK(a.at_depth(5) == Rat(1, 32));
    CHECK(a.clamped_at_depth(5) == Rat(1, 9));    // max(1/32, 1/(5-2)^2)
    CHECK(a.clamped_at_depth(3) == Rat(1));       // max(1/8, 1/1) capped at 1
    auto h = AlphaSequence::harmonic();
    CHECK(h.clamped_at_depth(10) == Rat(1, 10));  // 1/10 > 1/64
    auto z = AlphaSequence::constant(Rat(0));
    CHECK(z.clamped_at_depth(6) == Rat(1, 16));
    CHECK_THROWS(AlphaSequence::constant(Rat(3, 2)));
}

TEST_CASE("delta verdicts with exact partial sums") {
    SUBCASE("dyadic converges, partial = 2 - 2^{-9}") {
        auto v = delta_verdict(generate_dyadic(10));
        CHECK(v.kind == VerdictKind::ConvergesByCertificate);
        CHECK(v.partial_lo == Rat(1023, 512));
        CHECK(v.exact_sum);
    }
    SUBCASE("example1 diverges, partial = 197/64 over 5 terms") {
        auto v = delta_verdict(generate_example1(5));
        CHECK(v.kind == VerdictKind::DivergesByCertificate);
        // 1 + 1 + 1/2 + 21/64 + 1/4
        CHECK(v.partial_lo == Rat(197, 64));
    }
    SUBCASE("theorem3 converges for every preset alpha") {
        for (auto a : {AlphaSequence::constant(Rat(1)), AlphaSequence::even_odd(Rat(0), Rat(1)),
                       AlphaSequence::summable(), AlphaSequence::harmonic()}) {
            auto v = delta_verdict(generate_theorem3(a, 10));
            CHECK(v.kind == VerdictKind::ConvergesByCertificate);
            CHECK(v.partial_lo > 0);
        }
    }
    SUBCASE("theorem3 alpha=1 partial matches an independent recomputation") {
        auto s = generate_theorem3(AlphaSequence::constant(Rat(1)), 12);
        // exponents frozen above; recompute the 7 window terms directly
        std::vector<Int> e = {0, 1, 3, 6, 11, 64, 2048, pow2(64), pow2(2048)};
        Rat sum(0);
        for (size_t d = 0; d < 7; ++d) {
            Rat t(e[d + 1] - e[d], pow2((unsigned long)e[d].get_ui()));
            t.canonicalize();
            sum += t;
        }
        CHECK(delta_verdict(s).partial_lo == sum);
    }
}

TEST_CASE("box condition") {
    CHECK(box_verdict(generate_dyadic(8)).kind == VerdictKind::ConvergesByCertificate);
    CHECK(box_verdict(generate_example1(6)).kind == VerdictKind::ConvergesByCertificate);
    CHECK(box_verdict(generate_theorem3(AlphaSequence::constant(Rat(1)), 8)).kind ==
          VerdictKind::ConvergesByCertificate);
}

TEST_CASE("star verdicts") {
    SUBCASE("dyadic fails: terms vanish") {
        CHECK(star_verdict(generate_dyadic(10)).kind == StarKind::FailsByCertificate);
    }
    SUBCASE("example1 holds with window min 3") {
        auto r = star_verdict(generate_example1(6));
        CHECK(r.kind == StarKind::HoldsByCertificate);
        CHECK(r.window_min == 3);
        REQUIRE(r.tail_lower_bound.has_value());
        CHECK(*r.tail_lower_bound > 0);
    }
    SUBCASE("theorem3 alpha=1 holds; window min 29/32 at n=-3") {
        auto r = star_verdict(generate_theorem3(AlphaSequence::constant(Rat(1)), 12));
        CHECK(r.kind == StarKind::HoldsByCertificate);
        CHECK(r.window_min == Rat(29, 32));
        REQUIRE(r.tail_lower_bound.has_value());
        CHECK(*r.tail_lower_bound > 0);
        CHECK(*r.tail_lower_bound <= Rat(1, 2));   // alpha/2 ceiling minus correction
    }
    SUBCASE("theorem3 fails when alpha vanishes along a parity or in the limit") {
        CHECK(star_verdict(generate_theorem3(AlphaSequence::even_odd(Rat(0), Rat(1)), 10)).kind ==
              StarKind::FailsByCertificate);
        CHECK(star_verdict(generate_theorem3(AlphaSequence::summable(), 10)).kind ==
              StarKind::FailsByCertificate);
        CHECK(star_verdict(generate_theorem3(AlphaSequence::harmonic(), 10)).kind ==
              StarKind::FailsByCertificate);
    }
}

TEST_CASE("threshold classification") {
    CHECK(threshold_verdict(generate_dyadic(10)).kind == ThresholdVerdict::Kind::NotAtThreshold);
    CHECK(threshold_verdict(generate_example1(6)).kind == ThresholdVerdict::Kind::NotAtThreshold);
    CHECK(threshold_verdict(generate_theorem3(AlphaSequence::constant(Rat(1)), 12)).kind ==
          ThresholdVerdict::Kind::AtThreshold);
    CHECK(threshold_verdict(generate_theorem3(AlphaSequence::summable(), 10)).kind ==
          ThresholdVerdict::Kind::NotAtThreshold);
}

TEST_CASE("extraction sets") {
    auto ev = ExtractionSet::evens();
    CHECK(ev.contains(0));
    CHECK_FALSE(ev.contains(3));
    CHECK(ev.members(6) == std::vector<uint32_t>{0, 2, 4, 6});
    CHECK(ev.gap_after(2) == 2);
    CHECK_FALSE(ev.complement_has_two_consecutive());
    CHECK(ev.max_gap() == 2);

    auto sparse = ExtractionSet::periodic(4, {1});
    CHECK(sparse.complement_has_two_consecutive());
    CHECK(sparse.max_gap() == 4);

    ExtractionSet mixed = ExtractionSet::periodic(3, {0});
    mixed.tail_start = 5;
    mixed.explicit_depths = {0, 1, 4};
    CHECK(mixed.contains(1));
    CHECK_FALSE(mixed.contains(3));
    CHECK(mixed.contains(6));
    CHECK_FALSE(mixed.contains(7));

    CHECK_THROWS(ExtractionSet::periodic(2, {}));
    CHECK_THROWS(ExtractionSet::periodic(2, {5}));
}

TEST_CASE("extraction analysis: theorem3 alpha=1 (at the threshold)") {
    auto s = generate_theorem3(AlphaSequence::constant(Rat(1)), 12);
    SUBCASE("full set reproduces the plain verdicts") {
        auto a = extraction_analysis(s, ExtractionSet::all());
        CHECK(a.extracted_delta.kind == VerdictKind::ConvergesByCertificate);
        CHECK(a.extracted_star.kind == StarKind::HoldsByCertificate);
        CHECK(a.extracted_threshold.kind == ThresholdVerdict::Kind::AtThreshold);
        CHECK(a.r_identity_b1);
        CHECK(a.extracted_delta.partial_lo == delta_verdict(s).partial_lo);
    }
    SUBCASE("every strict periodic extraction is standard") {
        for (auto b : {ExtractionSet::evens(), ExtractionSet::odds(),
                       ExtractionSet::periodic(3, {0, 1})}) {
            auto a = extraction_analysis(s, b);
            CHECK(a.extracted_delta.kind == VerdictKind::DivergesByCertificate);
            CHECK(a.extracted_threshold.kind == ThresholdVerdict::Kind::NotAtThreshold);
        }
    }
    SUBCASE("evens partial sum matches a direct recomputation") {
        auto a = extraction_analysis(s, ExtractionSet::evens());
        // members 0,2,4,6,8: terms (e2-e0)/l0 + (e4-e2)/l2 + (e6-e4)/l4 + (e8-e6)/l6
        Rat expect = Rat(3) + Rat(1) + Rat(Int(2048 - 11), pow2(11));
        Rat last(pow2(2048) - 2048, pow2(2048));
        last.canonicalize();
        expect += last;
        CHECK(a.extracted_delta.partial_lo == expect);
        CHECK(a.r_identity_b2);
        CHECK(a.b2_identity_applies);
    }
}

TEST_CASE("extraction analysis: even/odd alpha splits the parities") {
    auto s = generate_theorem3(AlphaSequence::even_odd(Rat(0), Rat(1)), 12);
    auto even = extraction_analysis(s, ExtractionSet::evens());
    CHECK(even.extracted_delta.kind == VerdictKind::DivergesByCertificate);   // standard
    auto odd = extraction_analysis(s, ExtractionSet::odds());
    CHECK(odd.extracted_delta.kind == VerdictKind::ConvergesByCertificate);   // not standard
    CHECK(odd.extracted_star.kind == StarKind::HoldsByCertificate);
    CHECK(odd.extracted_threshold.kind == ThresholdVerdict::Kind::AtThreshold);
}

TEST_CASE("extraction analysis: summable alpha puts both parities at the threshold") {
    auto s = generate_theorem3(AlphaSequence::summable(), 12);
    for (auto b : {ExtractionSet::evens(), ExtractionSet::odds()}) {
        auto a = extraction_analysis(s, b);
        CHECK(a.extracted_delta.kind == VerdictKind::ConvergesByCertificate);
        CHECK(a.extracted_star.kind == StarKind::HoldsByCertificate);
        CHECK(a.extracted_threshold.kind == ThresholdVerdict::Kind::AtThreshold);
    }
    // the full filtration itself is non-standard but not at the threshold
    CHECK(threshold_verdict(s).kind == ThresholdVerdict::Kind::NotAtThreshold);
}

TEST_CASE("extraction analysis: dyadic and example1") {
    auto dy = extraction_analysis(generate_dyadic(12), ExtractionSet::evens());
    CHECK(dy.extracted_delta.kind == VerdictKind::ConvergesByCertificate);
    CHECK(dy.extracted_star.kind == StarKind::FailsByCertificate);
    CHECK(dy.extracted_threshold.kind == ThresholdVerdict::Kind::NotAtThreshold);

    auto ex = extraction_analysis(generate_example1(6), ExtractionSet::odds());
    CHECK(ex.extracted_delta.kind == VerdictKind::DivergesByCertificate);
    CHECK(ex.extracted_threshold.kind == ThresholdVerdict::Kind::NotAtThreshold);
}

TEST_CASE("explicit sequences: shape checks and interval enclosures") {
    auto s = make_explicit({Int(1), Int(2), Int(6), Int(24)});
    CHECK(check_shape(s));
    CHECK_FALSE(s.power_of_two);
    auto v = delta_verdict(s);
    CHECK(v.kind == VerdictKind::Undetermined);
    // true sum = 1 + log2(3)/2 + 1/3; check the enclosure brackets it tightly
    CHECK(v.partial_lo < v.partial_hi);
    CHECK(v.partial_hi - v.partial_lo < Rat(1, 1000000000));
    Rat mid = (v.partial_lo + v.partial_hi) / 2;
    CHECK(mid > Rat(212, 100));
    CHECK(mid < Rat(213, 100));

    std::string why;
    CHECK_FALSE(check_shape(make_explicit({Int(2), Int(4)}), &why));   // l_0 != 1
    CHECK_FALSE(check_shape(make_explicit({Int(1), Int(3), Int(4)}), &why));  // 4 % 3 != 0
    CHECK_THROWS(make_explicit({}));
}

TEST_CASE("budget truncation is flagged") {
    Budgets tight;
    tight.exact_bits = 10;
    auto s = generate_example1(8, tight);
    CHECK(s.truncated);
    CHECK(s.depth() < 8);
    auto t = generate_theorem3(AlphaSequence::constant(Rat(1)), 12, tight);
    CHECK(t.truncated);
}

TEST_CASE("slowing map: repeated interlinking") {
    auto m = SlowingMap::repeated_interlinking(9);
    CHECK(m.phi_depth == std::vector<uint64_t>{0, 1, 2, 3, 4, 5, 8, 9, 16, 17});
    CHECK(m.valid());

    // G at depth 6 is F at depth 5; G at depth 10..15 is F at depth 7
    CHECK(slow_induced(m, {6}) == std::vector<uint64_t>{5});
    CHECK(slow_induced(m, {10, 12, 14}) == std::vector<uint64_t>{7});
    CHECK(slow_induced(m, {0, 2, 4, 6, 8, 10, 12, 14, 16}) ==
          std::vector<uint64_t>{0, 2, 4, 5, 6, 7, 8});
    CHECK_THROWS(slow_induced(m, {18}));

    auto id = SlowingMap::identity(5);
    CHECK(slow_induced(id, {0, 3, 5}) == std::vector<uint64_t>{0, 3, 5});

    SlowingMap bad;
    bad.phi_depth = {0, 2, 2};
    CHECK_FALSE(bad.valid());
}
