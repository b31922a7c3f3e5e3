#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "ftk/bricks.hpp"
#include "ftk/geometry.hpp"
#include "ftk/glue.hpp"

using namespace ftk;
using namespace ftk::brick;

namespace {

Rat frac(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

std::vector<uint64_t> brute_intersection(const PartitionFamily& fam, uint64_t za,
                                         uint64_t ia, uint64_t zb, uint64_t ib) {
    auto A = fam.block(za, ia), B = fam.block(zb, ib);
    std::vector<uint64_t> out;
    std::set_intersection(A.begin(), A.end(), B.begin(), B.end(),
                          std::back_inserter(out));
    return out;
}

} // namespace

TEST_CASE("quartic family q=5: sizes, partitions, transversality") {
    auto fam = quartic_partition_family(5);
    CHECK(fam.f0_size == 625);
    CHECK(fam.f2_size == 25);
    CHECK(fam.r1 == 5);
    CHECK(fam.r2 == 5);
    CHECK(fam.alpha == frac(4, 5));
    CHECK(fam.materialized);

    // every partition covers F2 with disjoint blocks of size r2
    for (uint64_t z0 : {uint64_t(0), uint64_t(17), uint64_t(624)}) {
        std::set<uint64_t> seen;
        for (uint64_t i = 0; i < fam.r1; ++i) {
            auto blk = fam.block(z0, i);
            CHECK(blk.size() == 5);
            CHECK(std::is_sorted(blk.begin(), blk.end()));
            for (uint64_t z2 : blk) {
                CHECK(fam.block_index(z0, z2) == i);
                CHECK(fam.in_block(z0, i, z2));
                seen.insert(z2);
            }
        }
        CHECK(seen.size() == fam.f2_size);
    }

    // block_element enumerates the graph points x = t
    for (uint64_t t = 0; t < 5; ++t) {
        uint64_t z2 = fam.block_element(3, 2, t);
        CHECK(z2 / 5 == t);   // x coordinate
        CHECK(fam.in_block(3, 2, z2));
    }

    auto rep = verify_partition_family(fam);
    CHECK(rep.all_pass());
    CHECK(rep.max_intersection_ratio == frac(4, 5));
    for (const auto& cl : rep.clauses) {
        INFO(cl.name, ": ", cl.witness);
        CHECK(cl.pass);
    }
}

TEST_CASE("quartic family needs q >= 5") {
    CHECK_THROWS_AS(quartic_partition_family(3), std::invalid_argument);
    CHECK_THROWS_AS(quartic_partition_family(4), std::invalid_argument);
    CHECK_NOTHROW(quartic_partition_family(7));
    CHECK_NOTHROW(quartic_partition_family(8));
}

TEST_CASE("quartic q=5 exact intersections vs brute force") {
    auto fam = quartic_partition_family(5);
    auto rng = derive(99, "test-quartic-pairs");
    for (int t = 0; t < 300; ++t) {
        uint64_t za = rng.below(fam.f0_size), zb = rng.below(fam.f0_size);
        uint64_t ia = rng.below(fam.r1), ib = rng.below(fam.r1);
        auto want = brute_intersection(fam, za, ia, zb, ib);
        CHECK(fam.intersection_size(za, ia, zb, ib) == want.size());
        if (!want.empty()) {
            uint64_t s = fam.sample_intersection(za, ia, zb, ib, rng);
            CHECK(std::binary_search(want.begin(), want.end(), s));
        }
        if (want.size() < fam.r2) {
            uint64_t s = fam.sample_block_excluding(za, ia, zb, ib, rng);
            CHECK(fam.in_block(za, ia, s));
            CHECK_FALSE(fam.in_block(zb, ib, s));
        }
    }
}

TEST_CASE("matrix family q=2: rank formula and extreme pairs") {
    auto fam = matrix_partition_family(2);
    CHECK(fam.f0_size == 65536);
    CHECK(fam.f2_size == 256);
    CHECK(fam.r1 == 16);
    CHECK(fam.r2 == 16);
    CHECK(fam.alpha == frac(1, 2));

    // identity matrix code: row-major digits, A[0][0] least significant
    uint64_t id_code = 1 + (1u << 5) + (1u << 10) + (1u << 15);
    CHECK(id_code == 33825);
    // A' - A'' = I has rank 4: blocks of the two partitions meet in exactly
    // q^{4-4} = 1 point
    CHECK(fam.intersection_size(0, 0, id_code, 0) == 1);
    // same matrix, different offsets: disjoint
    CHECK(fam.intersection_size(id_code, 3, id_code, 5) == 0);
    CHECK(fam.intersection_size(id_code, 3, id_code, 3) == 16);

    auto rng = derive(99, "test-matrix-pairs");
    Rat worst(0);
    for (int t = 0; t < 250; ++t) {
        uint64_t za = rng.below(fam.f0_size), zb = rng.below(fam.f0_size);
        uint64_t ia = rng.below(fam.r1), ib = rng.below(fam.r1);
        auto want = brute_intersection(fam, za, ia, zb, ib);
        CHECK(fam.intersection_size(za, ia, zb, ib) == want.size());
        if (za != zb || ia != ib) {
            Rat ratio = frac(long(want.size()), long(fam.r2));
            if (ratio > worst) worst = ratio;
        }
    }
    CHECK(worst <= fam.alpha);

    auto rep = verify_partition_family(fam);
    CHECK(rep.all_pass());
}

TEST_CASE("strong brick assembly: quartic q=5") {
    auto fam = quartic_partition_family(5);
    auto b = assemble_strong_brick(fam);
    CHECK(b.f0_size == 625);
    CHECK(b.f1_size == 3125);
    CHECK(b.f2_size == 25);
    CHECK(b.r1 == 5);
    CHECK(b.r2 == 5);
    // r2 >= 1/alpha: 5 >= 5/4
    CHECK(Rat(b.r2) * b.alpha >= 1);

    // f and g invert each other along the chain rule
    for (uint64_t z1 : {uint64_t(0), uint64_t(1234), uint64_t(3124)}) {
        uint64_t z0 = b.f(z1);
        CHECK(z0 < b.f0_size);
        for (uint64_t z2 : b.S(z1)) CHECK(b.g(z0, z2) == z1);
    }

    auto rep = verify_strong_brick(b);
    for (const auto& cl : rep.clauses) {
        INFO(cl.name, ": ", cl.witness);
        CHECK(cl.pass);
    }
    CHECK(rep.all_pass());
    CHECK(rep.exhaustive_overlap);
    CHECK(rep.max_overlap == frac(4, 5));
}

TEST_CASE("strong brick on a restricted index range: matrix q=2, F0 = K^8") {
    auto fam = matrix_partition_family(2);
    auto b = assemble_strong_brick(fam, 256);
    CHECK(b.f0_size == 256);
    CHECK(b.f1_size == 256 * 16);
    auto rep = verify_strong_brick(b);
    for (const auto& cl : rep.clauses) {
        INFO(cl.name, ": ", cl.witness);
        CHECK(cl.pass);
    }
    CHECK(rep.all_pass());
    CHECK(rep.max_overlap <= frac(1, 2));
    CHECK_THROWS_AS(assemble_strong_brick(fam, 70000), std::invalid_argument);
}

TEST_CASE("geometric brick p=2: exact counts and kernels") {
    auto b = build_geometric_brick(2);
    CHECK(b.point_count == 32);
    // Gaussian binomial [5 choose 2]_2 = (2^5-1)(2^4-1) / ((2^2-1)(2-1))
    CHECK(b.plane_count() == 155);
    CHECK(b.lines.size() == 496);   // 31 directions x 16 anchors
    for (uint64_t pl : {uint64_t(0), uint64_t(77), uint64_t(154)})
        CHECK(b.plane_line_ids(pl).size() == 48);   // (p+1) p^4

    // parallel lines {0,1} and {2,3}: rho1 = 1
    uint64_t la = b.line_id((uint64_t(1) << 32) | 0);
    uint64_t lb = b.line_id((uint64_t(1) << 32) | 2);
    CHECK(b.line_points(la) == std::vector<uint64_t>{0, 1});
    CHECK(b.line_points(lb) == std::vector<uint64_t>{2, 3});
    CHECK(rho1(b, la, lb) == Rat(1));
    // intersecting lines {0,1} and {0,2}: rho1 = 1/2
    uint64_t lc = b.line_id((uint64_t(2) << 32) | 0);
    CHECK(rho1(b, la, lc) == frac(1, 2));
    CHECK(rho1(b, la, la) == Rat(0));
}

TEST_CASE("geometric brick p=2: full verification") {
    auto b = build_geometric_brick(2);
    auto rep = verify_geometric_brick(b);
    CHECK(rep.x2_uniform);
    CHECK(rep.x0_x2_independent);
    CHECK(rep.rho1_ok);
    CHECK(rep.rho0_ok);
    CHECK(rep.exhaustive_planes);
    CHECK(rep.plane_pairs_checked == 155 * 154 / 2);
    CHECK(rep.rho0_min >= frac(1, 3));
    CHECK(rep.all_pass());
}

TEST_CASE("geometric brick p=3: counts") {
    auto b = build_geometric_brick(3);
    CHECK(b.point_count == 243);
    CHECK(b.plane_count() == 1210);
    CHECK(b.lines.size() == 121 * 81);
    CHECK(b.plane_line_ids(0).size() == 4 * 81);
}

TEST_CASE("gluing: constant-q quartic chain of depth 4") {
    auto chain = glue_constant_q(FamilyKind::Quartic, 5, 2);
    CHECK(chain.depth() == 4);
    CHECK(chain.level_size(0) == 25);
    CHECK(chain.level_size(1) == 125);
    CHECK(chain.level_size(2) == 25);
    CHECK(chain.level_size(3) == 3125);
    CHECK(chain.level_size(4) == 625);
    for (uint32_t d = 0; d < 4; ++d) CHECK(chain.adicity(d) == 5);
    CHECK(chain.alphas == std::vector<Rat>{frac(4, 5), frac(4, 5)});

    for (uint64_t t = 0; t < 200; ++t) {
        auto rng = derive(7, "test-glue-paths", t);
        auto p = sample_chain(chain, rng);
        std::string why;
        INFO(why);
        CHECK(path_consistent(chain, p, &why));
    }
}

TEST_CASE("gluing: constant-q matrix chain and compatibility checks") {
    auto chain = glue_constant_q(FamilyKind::Matrix, 2, 2);
    CHECK(chain.level_size(0) == 256);
    CHECK(chain.level_size(1) == 256 * 16);
    CHECK(chain.level_size(2) == 256);
    CHECK(chain.level_size(3) == 65536 * 16);
    CHECK(chain.level_size(4) == 65536);

    auto fam = quartic_partition_family(5);
    auto full = assemble_strong_brick(fam);
    CHECK_THROWS_AS(glue({full, full}), std::invalid_argument);
}

TEST_CASE("gluing: tower mode") {
    auto chain = glue_tower(FamilyKind::Quartic, 5, 2);
    CHECK(chain.bricks[0].f2_size == 25);
    CHECK(chain.bricks[0].f0_size == 625);
    CHECK(chain.bricks[1].f2_size == 625);      // K_1^2 = K_0^4
    CHECK(chain.bricks[1].f0_size == 390625);   // 25^4
    CHECK(chain.alphas == std::vector<Rat>{frac(4, 5), frac(4, 25)});
    CHECK_THROWS_AS(glue_tower(FamilyKind::Quartic, 5, 3), std::invalid_argument);

    auto rng = derive(7, "test-tower-path");
    auto p = sample_chain(chain, rng);
    std::string why;
    INFO(why);
    CHECK(path_consistent(chain, p, &why));
}

TEST_CASE("product-type witness: depth-4 quartic chain") {
    auto chain = glue_constant_q(FamilyKind::Quartic, 5, 2);

    SUBCASE("D = evens: entrance values only") {
        auto rep = product_type_witness(chain, len::ExtractionSet::evens(),
                                        uint64_t(1) << 22, 500, 11);
        REQUIRE(rep.levels.size() == 3);
        for (const auto& lvl : rep.levels) CHECK(lvl.is_state);
        CHECK(rep.levels[0].domain == 25);
        CHECK(rep.levels[1].domain == 25);
        CHECK(rep.levels[2].domain == 625);
        CHECK(rep.checked_exactly);
        CHECK(rep.outcomes == 25 * 25 * 625);
        CHECK(rep.independent_uniform);
        CHECK(rep.reconstruction_ok);
    }

    SUBCASE("D = all: one entrance value, innovations above") {
        auto rep = product_type_witness(chain, len::ExtractionSet::all(),
                                        uint64_t(1) << 22, 500, 11);
        REQUIRE(rep.levels.size() == 5);
        for (size_t i = 0; i + 1 < rep.levels.size(); ++i) {
            CHECK_FALSE(rep.levels[i].is_state);
            CHECK(rep.levels[i].domain == 5);
        }
        CHECK(rep.levels.back().is_state);
        CHECK(rep.levels.back().domain == 625);
        CHECK(rep.independent_uniform);
        CHECK(rep.reconstruction_ok);
    }

    SUBCASE("D must contain the even levels") {
        CHECK_THROWS_AS(product_type_witness(chain, len::ExtractionSet::odds()),
                        std::invalid_argument);
    }
}

TEST_CASE("witness round trip on explicit paths") {
    auto chain = glue_constant_q(FamilyKind::Quartic, 5, 1);
    auto D = len::ExtractionSet::all();
    for (uint64_t t = 0; t < 50; ++t) {
        auto rng = derive(13, "test-witness-rt", t);
        auto p = sample_chain(chain, rng);
        auto y = witness_values(chain, D, p);
        auto z = reconstruct_from_witness(chain, D, y);
        REQUIRE(z.size() == 3);
        CHECK(z[0] == p.z[0]);
        CHECK(z[1] == p.z[1]);
        CHECK(z[2] == p.z[2]);
    }
}
