#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ftk/gf.hpp"
#include "ftk/rng.hpp"

using namespace ftk;
using namespace ftk::gf;

TEST_CASE("prime fields behave like integers mod p") {
    auto f2 = FieldSpec::make(2, 1);
    CHECK(f2.q() == 2);
    CHECK(f2.add(1, 1) == 0);

    auto f5 = FieldSpec::make(5, 1);
    CHECK(f5.mul(3, 4) == 2);
    CHECK(f5.inv(2) == 3);
}

TEST_CASE("GF(4): multiplicative group has order 3") {
    auto f4 = FieldSpec::make(2, 2);
    CHECK(f4.q() == 4);
    for (Elem x = 1; x < 4; ++x) CHECK(f4.pow(x, 3) == 1);
}

TEST_CASE("make_field rejects bad input") {
    CHECK_THROWS(FieldSpec::make(4, 1));
    CHECK_THROWS(FieldSpec::make(6, 2));
    CHECK_THROWS(FieldSpec::make(2, 0));
}

static void check_axioms_exhaustive(const FieldSpec& F) {
    uint64_t q = F.q();
    for (Elem a = 0; a < q; ++a)
        for (Elem b = 0; b < q; ++b) {
            CHECK(F.add(a, b) == F.add(b, a));
            CHECK(F.mul(a, b) == F.mul(b, a));
            for (Elem c = 0; c < q; ++c) {
                CHECK(F.add(F.add(a, b), c) == F.add(a, F.add(b, c)));
                CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
                CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
            }
        }
    for (Elem a = 1; a < q; ++a) CHECK(F.mul(a, F.inv(a)) == 1);
}

TEST_CASE("field axioms, exhaustive for q <= 8") {
    check_axioms_exhaustive(FieldSpec::make(2, 2));
    check_axioms_exhaustive(FieldSpec::make(2, 3));
    check_axioms_exhaustive(FieldSpec::make(5, 1));
    check_axioms_exhaustive(FieldSpec::make(7, 1));
}

TEST_CASE("field axioms, random triples for q = 16 and q = 256") {
    for (auto [p, k] : {std::pair<uint32_t, uint32_t>{2, 4}, {2, 8}, {3, 4}}) {
        auto F = FieldSpec::make(p, k);
        auto rng = derive(7, "gf-axioms", k);
        for (int t = 0; t < 2000; ++t) {
            Elem a = Elem(rng.below(F.q())), b = Elem(rng.below(F.q())), c = Elem(rng.below(F.q()));
            CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
            CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
            if (a != 0) CHECK(F.mul(a, F.inv(a)) == 1);
        }
    }
}

TEST_CASE("Frobenius: (a+b)^p == a^p + b^p, exhaustive for q <= 16") {
    for (auto [p, k] : {std::pair<uint32_t, uint32_t>{2, 4}, {3, 2}, {2, 3}, {13, 1}}) {
        auto F = FieldSpec::make(p, k);
        for (Elem a = 0; a < F.q(); ++a)
            for (Elem b = 0; b < F.q(); ++b)
                CHECK(F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p)));
    }
}

TEST_CASE("modulus is monic irreducible and reproducible") {
    auto f8 = FieldSpec::make(2, 3);
    CHECK(f8.modulus() == std::vector<uint32_t>{1, 1, 0, 1});   // x^3 + x + 1
    CHECK(poly_irreducible(2, f8.modulus()));
    CHECK_FALSE(poly_irreducible(2, {1, 0, 1}));                // x^2+1 = (x+1)^2
    auto again = FieldSpec::make(2, 3);
    CHECK(again.modulus() == f8.modulus());
}

TEST_CASE("rank: zero and identity") {
    auto F = FieldSpec::make(2, 1);
    Mat z(4, 4);
    CHECK(rank(F, z) == 0);
    Mat id(4, 4);
    for (uint32_t i = 0; i < 4; ++i) id.at(i, i) = 1;
    CHECK(rank(F, id) == 4);
}

TEST_CASE("rank matches brute-force row-space enumeration over GF(2)") {
    auto F = FieldSpec::make(2, 1);
    auto rng = derive(7, "gf-rank");
    for (int t = 0; t < 50; ++t) {
        Mat m(4, 4);
        for (auto& x : m.e) x = Elem(rng.below(2));
        // enumerate all 2^4 row combinations; row space size = 2^rank
        std::set<std::vector<Elem>> span;
        for (uint32_t mask = 0; mask < 16; ++mask) {
            std::vector<Elem> v(4, 0);
            for (uint32_t i = 0; i < 4; ++i)
                if (mask >> i & 1)
                    for (uint32_t j = 0; j < 4; ++j) v[j] = F.add(v[j], m.at(i, j));
            span.insert(v);
        }
        CHECK(span.size() == (size_t(1) << rank(F, m)));
    }
}

TEST_CASE("rank is stable under row and column permutation") {
    auto F = FieldSpec::make(3, 1);
    auto rng = derive(7, "gf-rank-perm");
    for (int t = 0; t < 30; ++t) {
        Mat m(4, 4);
        for (auto& x : m.e) x = Elem(rng.below(3));
        uint32_t r = rank(F, m);
        Mat sw = m;
        for (uint32_t j = 0; j < 4; ++j) std::swap(sw.at(0, j), sw.at(2, j));
        for (uint32_t i = 0; i < 4; ++i) std::swap(sw.at(i, 1), sw.at(i, 3));
        CHECK(rank(F, sw) == r);
    }
}

TEST_CASE("affine solve agrees with exhaustive solution count") {
    auto F = FieldSpec::make(2, 1);
    auto rng = derive(7, "gf-solve");
    for (int t = 0; t < 60; ++t) {
        Mat a(4, 4);
        for (auto& x : a.e) x = Elem(rng.below(2));
        std::vector<Elem> b(4);
        for (auto& x : b) x = Elem(rng.below(2));
        auto sol = solve(F, a, b);
        size_t count = 0;
        for (uint32_t code = 0; code < 16; ++code) {
            std::vector<Elem> x(4);
            for (uint32_t i = 0; i < 4; ++i) x[i] = code >> i & 1;
            if (mat_apply(F, a, x) == b) ++count;
        }
        if (!sol.consistent) {
            CHECK(count == 0);
        } else {
            CHECK(count == (size_t(1) << sol.null_basis.size()));
            CHECK(mat_apply(F, a, sol.particular) == b);
        }
    }
}

TEST_CASE("quadratic extension: bijection and arithmetic") {
    auto K = FieldSpec::make(2, 2);   // GF(4)
    QuadExt L(K);                     // GF(16)

    CHECK(L.lift(0, 0) == 0);

    // image of all q^2 pairs is q^2 distinct elements; round-trip is identity
    std::set<Elem> image;
    for (Elem a0 = 0; a0 < K.q(); ++a0)
        for (Elem a1 = 0; a1 < K.q(); ++a1) {
            Elem x = L.lift(a0, a1);
            image.insert(x);
            auto [b0, b1] = L.drop(x);
            CHECK(b0 == a0);
            CHECK(b1 == a1);
        }
    CHECK(image.size() == L.order());

    // L is a field: multiplicative group of order q^2 - 1
    for (Elem x = 1; x < L.order(); ++x) {
        Elem y = L.inv(x);
        CHECK(L.mul(x, y) == 1);
    }
    // associativity and distributivity spot checks over all triples
    for (Elem a = 0; a < L.order(); ++a)
        for (Elem b = 0; b < L.order(); ++b) {
            CHECK(L.mul(a, b) == L.mul(b, a));
            Elem c = Elem((a * 7 + b * 3 + 1) % L.order());
            CHECK(L.mul(L.mul(a, b), c) == L.mul(a, L.mul(b, c)));
            CHECK(L.mul(a, L.add(b, c)) == L.add(L.mul(a, b), L.mul(a, c)));
        }
}
