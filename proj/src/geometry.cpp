#include "ftk/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "ftk/dist.hpp"
#include "ftk/rng.hpp"

namespace ftk::brick {

namespace {

constexpr uint32_t DIM = 5;

uint64_t ipow(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

struct Space {
    uint32_t p;
    uint64_t npoints;
    std::array<uint64_t, DIM> weight;   // p^i

    explicit Space(uint32_t prime) : p(prime), npoints(ipow(prime, DIM)) {
        for (uint32_t i = 0; i < DIM; ++i) weight[i] = ipow(prime, i);
    }
    uint32_t digit(uint64_t code, uint32_t i) const { return uint32_t(code / weight[i] % p); }
    uint64_t add(uint64_t a, uint64_t b) const {
        uint64_t r = 0;
        for (uint32_t i = 0; i < DIM; ++i)
            r += uint64_t((digit(a, i) + digit(b, i)) % p) * weight[i];
        return r;
    }
    uint64_t scale(uint64_t a, uint32_t c) const {
        uint64_t r = 0;
        for (uint32_t i = 0; i < DIM; ++i)
            r += uint64_t(digit(a, i) * c % p) * weight[i];
        return r;
    }
    // projective representative: first non-zero digit (lowest index) = 1
    bool canonical_dir(uint64_t v) const {
        for (uint32_t i = 0; i < DIM; ++i) {
            uint32_t d = digit(v, i);
            if (d != 0) return d == 1;
        }
        return false;
    }
    uint64_t canonicalize_dir(uint64_t v) const {
        for (uint32_t i = 0; i < DIM; ++i) {
            uint32_t d = digit(v, i);
            if (d != 0) {
                // multiply by d^{-1} mod p
                uint32_t inv = 1;
                for (uint32_t c = 1; c < p; ++c)
                    if (c * d % p == 1) { inv = c; break; }
                return scale(v, inv);
            }
        }
        return 0;
    }
    // smallest point code on the line through pt with direction dir
    uint64_t anchor(uint64_t pt, uint64_t dir) const {
        uint64_t best = pt, cur = pt;
        for (uint32_t t = 1; t < p; ++t) {
            cur = add(cur, dir);
            best = std::min(best, cur);
        }
        return best;
    }
};

uint64_t line_key(uint64_t dir, uint64_t anchor) { return (dir << 32) | anchor; }

} // namespace

uint64_t GeometricBrick::line_id(uint64_t key) const {
    auto it = std::lower_bound(lines.begin(), lines.end(), key);
    if (it == lines.end() || *it != key) throw std::logic_error("unknown line key");
    return uint64_t(it - lines.begin());
}

std::vector<uint64_t> GeometricBrick::line_points(uint64_t id) const {
    return {line_pts.begin() + id * p, line_pts.begin() + (id + 1) * p};
}

std::vector<uint64_t> GeometricBrick::plane_line_ids(uint64_t plane_idx) const {
    Space sp(p);
    const auto& pl = planes[plane_idx];
    // the p+1 projective directions inside the plane
    std::vector<uint64_t> dirs;
    for (uint32_t l1 = 0; l1 < p; ++l1)
        for (uint32_t l2 = 0; l2 < p; ++l2) {
            if (l1 == 0 && l2 == 0) continue;
            uint64_t v = sp.add(sp.scale(pl[0], l1), sp.scale(pl[1], l2));
            dirs.push_back(sp.canonicalize_dir(v));
        }
    std::sort(dirs.begin(), dirs.end());
    dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());
    std::vector<uint64_t> ids;
    for (uint64_t dir : dirs)
        for (uint64_t pt = 0; pt < sp.npoints; ++pt)
            if (sp.anchor(pt, dir) == pt) ids.push_back(line_id(line_key(dir, pt)));
    std::sort(ids.begin(), ids.end());
    return ids;
}

GeometricBrick build_geometric_brick(uint32_t p) {
    if (p != 2 && p != 3 && p != 5)
        throw std::invalid_argument("geometric brick enumeration supports p in {2, 3, 5}");
    GeometricBrick b;
    b.p = p;
    Space sp(p);
    b.point_count = sp.npoints;

    // planes: reduced row-echelon 2x5 bases, pivots j1 < j2
    for (uint32_t j1 = 0; j1 < DIM; ++j1)
        for (uint32_t j2 = j1 + 1; j2 < DIM; ++j2) {
            std::vector<uint32_t> free1, free2;
            for (uint32_t c = j1 + 1; c < DIM; ++c)
                if (c != j2) free1.push_back(c);
            for (uint32_t c = j2 + 1; c < DIM; ++c) free2.push_back(c);
            uint64_t n1 = ipow(p, uint32_t(free1.size()));
            uint64_t n2 = ipow(p, uint32_t(free2.size()));
            for (uint64_t a = 0; a < n1; ++a)
                for (uint64_t bcode = 0; bcode < n2; ++bcode) {
                    uint64_t r1 = sp.weight[j1], r2 = sp.weight[j2];
                    uint64_t av = a;
                    for (uint32_t c : free1) { r1 += (av % p) * sp.weight[c]; av /= p; }
                    uint64_t bv = bcode;
                    for (uint32_t c : free2) { r2 += (bv % p) * sp.weight[c]; bv /= p; }
                    b.planes.push_back({uint32_t(r1), uint32_t(r2)});
                }
        }

    // all affine lines, keyed by canonical (direction, anchor)
    for (uint64_t dir = 1; dir < sp.npoints; ++dir) {
        if (!sp.canonical_dir(dir)) continue;
        for (uint64_t pt = 0; pt < sp.npoints; ++pt)
            if (sp.anchor(pt, dir) == pt) b.lines.push_back(line_key(dir, pt));
    }
    std::sort(b.lines.begin(), b.lines.end());

    b.line_pts.resize(b.lines.size() * p);
    for (size_t id = 0; id < b.lines.size(); ++id) {
        uint64_t dir = b.lines[id] >> 32, pt = b.lines[id] & 0xffffffffULL;
        std::vector<uint64_t> pts;
        pts.push_back(pt);
        for (uint32_t t = 1; t < p; ++t) pts.push_back(sp.add(pts.back(), dir));
        std::sort(pts.begin(), pts.end());
        std::copy(pts.begin(), pts.end(), b.line_pts.begin() + id * p);
    }
    return b;
}

Rat rho1(const GeometricBrick& b, uint64_t line_a, uint64_t line_b) {
    if (line_a == line_b) return Rat(0);
    auto ia = b.line_pts.begin() + line_a * b.p;
    auto ib = b.line_pts.begin() + line_b * b.p;
    uint32_t common = 0;
    uint32_t x = 0, y = 0;
    while (x < b.p && y < b.p) {
        if (ia[x] == ib[y]) { ++common; ++x; ++y; }
        else if (ia[x] < ib[y]) ++x;
        else ++y;
    }
    Rat r(uint64_t(b.p - common), uint64_t(b.p));
    r.canonicalize();
    return r;
}

Rat rho0(const GeometricBrick& b, uint64_t plane_a, uint64_t plane_b) {
    auto la = b.plane_line_ids(plane_a);
    auto lb = b.plane_line_ids(plane_b);
    Dist da = Dist::uniform(la), db = Dist::uniform(lb);
    return kr_distance(da, db, [&](uint64_t x, uint64_t y) { return rho1(b, x, y); });
}

GeometricReport verify_geometric_brick(const GeometricBrick& b,
                                       uint64_t plane_pair_budget,
                                       uint64_t line_pair_budget, uint64_t seed) {
    GeometricReport rep;
    uint64_t np = b.plane_count(), nl = b.lines.size();

    // X2 kernel aggregated over each plane's line family: every point must
    // be hit by exactly p+1 of the (p+1)p^4 lines, which makes the
    // conditional law of X2 given X0 uniform for every plane -- that is
    // both the uniformity of X2 and its independence from X0, exactly.
    {
        bool all_planes = np <= 2000;
        std::vector<uint64_t> idxs;
        if (all_planes)
            for (uint64_t i = 0; i < np; ++i) idxs.push_back(i);
        else {
            auto rng = derive(seed, "geom-plane-sample");
            for (int t = 0; t < 50; ++t) idxs.push_back(rng.below(np));
        }
        bool ok = true;
        std::vector<uint32_t> hits(b.point_count);
        for (uint64_t pi : idxs) {
            std::fill(hits.begin(), hits.end(), 0);
            for (uint64_t id : b.plane_line_ids(pi))
                for (uint64_t z : b.line_points(id)) ++hits[z];
            for (uint64_t z = 0; z < b.point_count; ++z)
                if (hits[z] != b.p + 1) ok = false;
        }
        rep.x2_uniform = ok;
        rep.x0_x2_independent = ok;
    }

    // rho1 >= (p-1)/p, i.e. two distinct lines meet in at most one point
    {
        Rat bound(uint64_t(b.p - 1), uint64_t(b.p));
        bound.canonicalize();
        bool ok = true;
        if (nl * (nl - 1) / 2 <= line_pair_budget) {
            rep.exhaustive_lines = true;
            for (uint64_t x = 0; x < nl && ok; ++x)
                for (uint64_t y = x + 1; y < nl; ++y) {
                    ++rep.line_pairs_checked;
                    if (rho1(b, x, y) < bound) { ok = false; break; }
                }
        } else {
            auto rng = derive(seed, "geom-line-sample");
            for (uint64_t t = 0; t < line_pair_budget; ++t) {
                uint64_t x = rng.below(nl), y = rng.below(nl);
                if (x == y) continue;
                ++rep.line_pairs_checked;
                if (rho1(b, x, y) < bound) { ok = false; break; }
            }
        }
        rep.rho1_ok = ok;
    }

    // rho0 >= 1 - 2/(p+1) over distinct plane pairs (exact transport)
    {
        Rat bound = Rat(1) - Rat(2, uint64_t(b.p + 1));
        bound.canonicalize();
        bool first = true;
        bool ok = true;
        auto consider = [&](uint64_t a, uint64_t c) {
            Rat d = rho0(b, a, c);
            ++rep.plane_pairs_checked;
            if (first || d < rep.rho0_min) {
                rep.rho0_min = d;
                rep.rho0_witness_a = a;
                rep.rho0_witness_b = c;
                first = false;
            }
            if (d < bound) ok = false;
        };
        if (np * (np - 1) / 2 <= plane_pair_budget) {
            rep.exhaustive_planes = true;
            for (uint64_t a = 0; a < np; ++a)
                for (uint64_t c = a + 1; c < np; ++c) consider(a, c);
        } else {
            auto rng = derive(seed, "geom-rho0-sample");
            uint64_t samples = b.p <= 3 ? 60 : 3;
            for (uint64_t t = 0; t < samples; ++t) {
                uint64_t a = rng.below(np), c = rng.below(np);
                if (a == c) continue;
                consider(a, c);
            }
        }
        rep.rho0_ok = ok;
    }
    return rep;
}

} // namespace ftk::brick
