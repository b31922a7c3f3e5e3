#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "ftk/dist.hpp"
#include "ftk/rng.hpp"

using namespace ftk;

namespace {

Dist random_dist(Rng& rng, uint64_t universe, int max_den) {
    // random rational masses, normalized exactly
    std::vector<std::pair<uint64_t, Rat>> atoms;
    Rat total(0);
    for (uint64_t s = 0; s < universe; ++s) {
        long num = long(rng.below(uint64_t(max_den)));
        if (num == 0) continue;
        Rat w(num, max_den);
        atoms.emplace_back(s, w);
        total += w;
    }
    if (atoms.empty()) atoms.emplace_back(0, total = Rat(1));
    for (auto& [s, w] : atoms) w /= total;
    return Dist(std::move(atoms));
}

// brute-force min-cost transport over integer matrices, for tiny instances
Int brute_transport(const std::vector<int64_t>& supply, const std::vector<int64_t>& demand,
                    const std::vector<int64_t>& cost) {
    size_t m = supply.size(), n = demand.size();
    std::vector<int64_t> x(m * n, 0);
    Int best = -1;
    std::function<void(size_t, std::vector<int64_t>, std::vector<int64_t>)> rec =
        [&](size_t cell, std::vector<int64_t> s, std::vector<int64_t> d) {
            if (cell == m * n) {
                for (auto v : s) if (v != 0) return;
                for (auto v : d) if (v != 0) return;
                Int obj = 0;
                for (size_t k = 0; k < m * n; ++k) obj += Int((long)x[k]) * Int((long)cost[k]);
                if (best < 0 || obj < best) best = obj;
                return;
            }
            size_t i = cell / n, j = cell % n;
            int64_t cap = std::min(s[i], d[j]);
            for (int64_t v = 0; v <= cap; ++v) {
                x[cell] = v;
                auto s2 = s, d2 = d;
                s2[i] -= v;
                d2[j] -= v;
                rec(cell + 1, s2, d2);
            }
            x[cell] = 0;
        };
    rec(0, supply, demand);
    return best;
}

} // namespace

TEST_CASE("overlap basics") {
    Dist a = Dist::uniform({0, 1, 2, 3});
    CHECK(overlap(a, a) == 1);
    Dist b = Dist::uniform({4, 5});
    CHECK(overlap(a, b) == 0);
    Dist c = Dist::uniform({3, 4});
    CHECK(overlap(a, c) == Rat(1, 4));
}

TEST_CASE("overlap + tv == 1 on random probability pairs") {
    auto rng = derive(11, "dist-overlap");
    for (int t = 0; t < 100; ++t) {
        Dist a = random_dist(rng, 8, 7);
        Dist b = random_dist(rng, 8, 5);
        REQUIRE(a.is_probability());
        REQUIRE(b.is_probability());
        CHECK(overlap(a, b) + tv(a, b) == 1);
    }
}

TEST_CASE("kr with discrete ground metric equals tv") {
    auto discrete = [](uint64_t x, uint64_t y) { return Rat(x == y ? 0 : 1); };
    auto rng = derive(11, "dist-kr-discrete");
    for (int t = 0; t < 40; ++t) {
        Dist a = random_dist(rng, 6, 5);
        Dist b = random_dist(rng, 6, 4);
        CHECK(kr_distance(a, b, discrete) == tv(a, b));
    }
    Dist a = Dist::uniform({0, 1, 2});
    CHECK(kr_distance(a, a, discrete) == 0);
}

TEST_CASE("transport simplex matches brute force on tiny integer instances") {
    auto rng = derive(11, "dist-transport");
    for (int t = 0; t < 30; ++t) {
        size_t m = 2 + rng.below(2), n = 2 + rng.below(2);
        std::vector<int64_t> supply(m), demand(n);
        int64_t total = 0;
        for (auto& s : supply) { s = 1 + int64_t(rng.below(3)); total += s; }
        for (size_t j = 0; j + 1 < n; ++j) {
            demand[j] = std::min<int64_t>(int64_t(rng.below(4)), total);
            total -= demand[j];
        }
        demand[n - 1] = total;
        std::vector<int64_t> cost(m * n);
        for (auto& c : cost) c = int64_t(rng.below(9));
        CHECK(transport_min_cost(supply, demand, cost) == brute_transport(supply, demand, cost));
    }
}

TEST_CASE("kr respects a line metric") {
    // masses on a path graph: moving 2 units of distance costs twice as much
    auto line = [](uint64_t x, uint64_t y) {
        return Rat(x > y ? long(x - y) : long(y - x));
    };
    Dist a = Dist::point(0);
    Dist b = Dist::point(3);
    CHECK(kr_distance(a, b, line) == 3);
    Dist c = Dist::uniform({0, 2});
    Dist d = Dist::uniform({1, 3});
    CHECK(kr_distance(c, d, line) == 1);
}
