#include "ftk/bricks.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace ftk::brick {

namespace {

gf::FieldSpec field_for_order(uint64_t q) {
    if (q < 2) throw std::invalid_argument("field order must be at least 2");
    uint64_t p = 2;
    while (q % p != 0) {
        ++p;
        if (p * p > q) { p = q; break; }
    }
    uint32_t k = 0;
    uint64_t m = q;
    while (m % p == 0) { m /= p; ++k; }
    if (m != 1) throw std::invalid_argument("field order must be a prime power");
    return gf::FieldSpec::make(uint32_t(p), k);
}

uint64_t ipow(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

std::vector<gf::Elem> decode_digits(uint64_t code, uint64_t q, uint32_t n) {
    std::vector<gf::Elem> d(n);
    for (uint32_t i = 0; i < n; ++i) { d[i] = gf::Elem(code % q); code /= q; }
    return d;
}

uint64_t encode_digits(const std::vector<gf::Elem>& d, uint64_t q) {
    uint64_t code = 0;
    for (size_t i = d.size(); i-- > 0;) code = code * q + d[i];
    return code;
}

// ---- Matrix family helpers -------------------------------------------------

gf::Mat decode_matrix(const gf::FieldSpec& K, uint64_t z0) {
    gf::Mat a(4, 4);
    uint64_t q = K.q();
    for (uint32_t t = 0; t < 16; ++t) { a.at(t / 4, t % 4) = gf::Elem(z0 % q); z0 /= q; }
    return a;
}

// a x^4 + b x^3 + c x^2 + d x with z0 coded ((a q + b) q + c) q + d
gf::Elem quartic_eval(const gf::FieldSpec& K, uint64_t z0, gf::Elem x) {
    uint64_t q = K.q();
    gf::Elem d = gf::Elem(z0 % q), c = gf::Elem(z0 / q % q),
             b = gf::Elem(z0 / (q * q) % q), a = gf::Elem(z0 / (q * q * q) % q);
    gf::Elem acc = a;
    acc = K.add(K.mul(acc, x), b);
    acc = K.add(K.mul(acc, x), c);
    acc = K.add(K.mul(acc, x), d);
    return K.mul(acc, x);
}

} // namespace

uint64_t PartitionFamily::block_index(uint64_t z0, uint64_t z2) const {
    uint64_t q = K.q();
    if (kind == Kind::Quartic) {
        gf::Elem x = gf::Elem(z2 / q), y = gf::Elem(z2 % q);
        return K.sub(y, quartic_eval(K, z0, x));
    }
    uint64_t q4 = r2;   // q^4
    auto A = decode_matrix(K, z0);
    auto x = decode_digits(z2 % q4, q, 4);
    auto y = decode_digits(z2 / q4, q, 4);
    auto Ax = gf::mat_apply(K, A, x);
    std::vector<gf::Elem> b(4);
    for (int i = 0; i < 4; ++i) b[i] = K.sub(y[i], Ax[i]);
    return encode_digits(b, q);
}

bool PartitionFamily::in_block(uint64_t z0, uint64_t i, uint64_t z2) const {
    return block_index(z0, z2) == i;
}

std::vector<uint64_t> PartitionFamily::block(uint64_t z0, uint64_t i) const {
    uint64_t q = K.q();
    std::vector<uint64_t> out;
    if (kind == Kind::Quartic) {
        out.reserve(q);
        for (uint64_t x = 0; x < q; ++x) {
            gf::Elem y = K.add(quartic_eval(K, z0, gf::Elem(x)), gf::Elem(i));
            out.push_back(x * q + y);
        }
    } else {
        uint64_t q4 = r2;
        auto A = decode_matrix(K, z0);
        auto b = decode_digits(i, q, 4);
        out.reserve(q4);
        for (uint64_t xc = 0; xc < q4; ++xc) {
            auto x = decode_digits(xc, q, 4);
            auto y = gf::mat_apply(K, A, x);
            for (int t = 0; t < 4; ++t) y[t] = K.add(y[t], b[t]);
            out.push_back(xc + encode_digits(y, q) * q4);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

uint64_t PartitionFamily::block_element(uint64_t z0, uint64_t i, uint64_t t) const {
    uint64_t q = K.q();
    if (kind == Kind::Quartic) {
        gf::Elem y = K.add(quartic_eval(K, z0, gf::Elem(t)), gf::Elem(i));
        return t * q + y;
    }
    uint64_t q4 = r2;
    auto A = decode_matrix(K, z0);
    auto b = decode_digits(i, q, 4);
    auto x = decode_digits(t, q, 4);
    auto y = gf::mat_apply(K, A, x);
    for (int s = 0; s < 4; ++s) y[s] = K.add(y[s], b[s]);
    return t + encode_digits(y, q) * q4;
}

uint64_t PartitionFamily::sample_block(uint64_t z0, uint64_t i, Rng& rng) const {
    return block_element(z0, i, rng.below(r2));
}

uint64_t PartitionFamily::intersection_size(uint64_t za, uint64_t ia,
                                            uint64_t zb, uint64_t ib) const {
    uint64_t q = K.q();
    if (za == zb) return ia == ib ? r2 : 0;
    if (kind == Kind::Quartic) {
        uint64_t count = 0;
        for (uint64_t x = 0; x < q; ++x) {
            gf::Elem ya = K.add(quartic_eval(K, za, gf::Elem(x)), gf::Elem(ia));
            gf::Elem yb = K.add(quartic_eval(K, zb, gf::Elem(x)), gf::Elem(ib));
            if (ya == yb) ++count;
        }
        return count;
    }
    auto M = gf::mat_sub(K, decode_matrix(K, za), decode_matrix(K, zb));
    auto ba = decode_digits(ia, q, 4), bb = decode_digits(ib, q, 4);
    std::vector<gf::Elem> rhs(4);
    for (int t = 0; t < 4; ++t) rhs[t] = K.sub(bb[t], ba[t]);
    auto sol = gf::solve(K, M, rhs);
    if (!sol.consistent) return 0;
    return ipow(q, uint32_t(sol.null_basis.size()));
}

uint64_t PartitionFamily::sample_intersection(uint64_t za, uint64_t ia,
                                              uint64_t zb, uint64_t ib, Rng& rng) const {
    uint64_t q = K.q();
    if (za == zb) {
        if (ia != ib) throw std::logic_error("empty intersection");
        return sample_block(za, ia, rng);
    }
    if (kind == Kind::Quartic) {
        std::vector<uint64_t> pts;
        for (uint64_t x = 0; x < q; ++x) {
            gf::Elem ya = K.add(quartic_eval(K, za, gf::Elem(x)), gf::Elem(ia));
            gf::Elem yb = K.add(quartic_eval(K, zb, gf::Elem(x)), gf::Elem(ib));
            if (ya == yb) pts.push_back(x * q + ya);
        }
        if (pts.empty()) throw std::logic_error("empty intersection");
        return pts[rng.below(pts.size())];
    }
    auto A = decode_matrix(K, za);
    auto M = gf::mat_sub(K, A, decode_matrix(K, zb));
    auto ba = decode_digits(ia, q, 4), bb = decode_digits(ib, q, 4);
    std::vector<gf::Elem> rhs(4);
    for (int t = 0; t < 4; ++t) rhs[t] = K.sub(bb[t], ba[t]);
    auto sol = gf::solve(K, M, rhs);
    if (!sol.consistent) throw std::logic_error("empty intersection");
    auto x = sol.particular;
    for (const auto& v : sol.null_basis) {
        gf::Elem c = gf::Elem(rng.below(q));
        for (int t = 0; t < 4; ++t) x[t] = K.add(x[t], K.mul(c, v[t]));
    }
    auto y = gf::mat_apply(K, A, x);
    for (int t = 0; t < 4; ++t) y[t] = K.add(y[t], ba[t]);
    return encode_digits(x, q) + encode_digits(y, q) * r2;
}

uint64_t PartitionFamily::sample_block_excluding(uint64_t za, uint64_t ia,
                                                 uint64_t zb, uint64_t ib,
                                                 Rng& rng) const {
    // rejection against the other block; its share of S_{za,ia} is at most
    // alpha < 1 except in the degenerate identical-block case
    if (za == zb && ia == ib) throw std::logic_error("blocks coincide");
    for (;;) {
        uint64_t z2 = sample_block(za, ia, rng);
        if (!in_block(zb, ib, z2)) return z2;
    }
}

PartitionFamily matrix_partition_family(uint64_t q) {
    PartitionFamily fam{PartitionFamily::Kind::Matrix, field_for_order(q)};
    fam.r1 = fam.r2 = ipow(q, 4);
    fam.f2_size = fam.r1 * fam.r2;
    fam.f0_size = ipow(q, 16);
    fam.alpha = Rat(1, (unsigned long)q);
    fam.alpha.canonicalize();
    fam.materialized = fam.f2_size <= 10000;   // q in {2, 3}
    return fam;
}

PartitionFamily quartic_partition_family(uint64_t q) {
    if (q < 5)
        throw std::invalid_argument(
            "quartic family needs q >= 5 (otherwise alpha = 4/q >= 1)");
    PartitionFamily fam{PartitionFamily::Kind::Quartic, field_for_order(q)};
    fam.r1 = fam.r2 = q;
    fam.f2_size = q * q;
    fam.f0_size = ipow(q, 4);
    fam.alpha = Rat(4, (unsigned long)q);
    fam.alpha.canonicalize();
    fam.materialized = fam.f2_size <= 10000;
    return fam;
}

bool FamilyReport::all_pass() const {
    for (const auto& c : clauses)
        if (!c.pass) return false;
    return true;
}

bool BrickReport::all_pass() const {
    for (const auto& c : clauses)
        if (!c.pass) return false;
    return true;
}

namespace {

std::vector<uint64_t> z0_sample(uint64_t f0_limit, uint64_t z0_budget, uint64_t seed) {
    std::vector<uint64_t> z0s;
    if (f0_limit <= z0_budget) {
        z0s.resize(f0_limit);
        for (uint64_t i = 0; i < f0_limit; ++i) z0s[i] = i;
        return z0s;
    }
    auto rng = derive(seed, "family-z0");
    z0s.push_back(0);
    z0s.push_back(f0_limit - 1);
    for (uint64_t t = 2; t < z0_budget; ++t) z0s.push_back(rng.below(f0_limit));
    std::sort(z0s.begin(), z0s.end());
    z0s.erase(std::unique(z0s.begin(), z0s.end()), z0s.end());
    return z0s;
}

ClauseReport check_partition(const PartitionFamily& fam,
                             const std::vector<uint64_t>& z0s, bool exhaustive_z0,
                             uint64_t seed) {
    ClauseReport cl;
    cl.name = "blocks-partition";
    cl.exhaustive = exhaustive_z0 && fam.materialized;
    cl.pass = true;
    if (fam.materialized) {
        std::vector<uint64_t> owner(fam.f2_size);
        for (uint64_t z0 : z0s) {
            std::fill(owner.begin(), owner.end(), fam.r1);
            uint64_t covered = 0;
            for (uint64_t i = 0; i < fam.r1; ++i) {
                auto blk = fam.block(z0, i);
                if (blk.size() != fam.r2) {
                    cl.pass = false;
                    cl.witness = "block (" + std::to_string(z0) + "," +
                                 std::to_string(i) + ") has size " +
                                 std::to_string(blk.size());
                    return cl;
                }
                for (uint64_t z2 : blk) {
                    if (owner[z2] != fam.r1 || fam.block_index(z0, z2) != i) {
                        cl.pass = false;
                        cl.witness = "point " + std::to_string(z2) +
                                     " misassigned in partition " + std::to_string(z0);
                        return cl;
                    }
                    owner[z2] = i;
                    ++covered;
                }
            }
            if (covered != fam.f2_size) {
                cl.pass = false;
                cl.witness = "partition " + std::to_string(z0) + " covers " +
                             std::to_string(covered) + " of " +
                             std::to_string(fam.f2_size) + " points";
                return cl;
            }
        }
        cl.witness = std::to_string(z0s.size()) + " partitions scanned";
    } else {
        // parametrized blocks: each block is the graph of an affine map on
        // q^4 distinct arguments, so sizes and disjointness are structural;
        // spot-check the index map on sampled points
        auto rng = derive(seed, "family-partition-spot");
        for (uint64_t z0 : z0s) {
            for (int t = 0; t < 64; ++t) {
                uint64_t z2 = rng.below(fam.f2_size);
                uint64_t i = fam.block_index(z0, z2);
                if (i >= fam.r1 || !fam.in_block(z0, i, z2)) {
                    cl.pass = false;
                    cl.witness = "index map inconsistent at (" + std::to_string(z0) +
                                 "," + std::to_string(z2) + ")";
                    return cl;
                }
                uint64_t back = fam.sample_block(z0, i, rng);
                if (fam.block_index(z0, back) != i) {
                    cl.pass = false;
                    cl.witness = "block sampler escaped block " + std::to_string(i);
                    return cl;
                }
            }
        }
        cl.witness = "graph blocks of affine maps; index spot checks on " +
                     std::to_string(z0s.size()) + " partitions";
    }
    return cl;
}

struct OverlapScan {
    ClauseReport clause;
    Rat max_ratio;          // max |S∩S'|/r2
    uint64_t worst_a = 0, worst_b = 0;   // block codes z0*r1 + i
    uint64_t pairs = 0;
    bool exhaustive = false;
};

// Scans distinct block pairs with z0 < f0_limit; cap = alpha * r2 (an
// integer for both families).
OverlapScan scan_transversality(const PartitionFamily& fam, uint64_t f0_limit,
                                uint64_t pair_budget, uint64_t seed) {
    OverlapScan s;
    s.clause.name = "transversality";
    s.clause.pass = true;
    s.max_ratio = Rat(0);
    Rat capr = fam.alpha * Rat((unsigned long)fam.r2);
    capr.canonicalize();
    uint64_t cap = capr.get_num().get_ui();
    uint64_t nblocks = f0_limit * fam.r1;
    bool bitmask_ok = fam.kind == PartitionFamily::Kind::Quartic && fam.f2_size <= 64;
    if (bitmask_ok && nblocks <= (uint64_t(1) << 20) &&
        nblocks * (nblocks - 1) / 2 <= pair_budget) {
        std::vector<uint64_t> masks(nblocks);
        for (uint64_t z0 = 0; z0 < f0_limit; ++z0)
            for (uint64_t i = 0; i < fam.r1; ++i) {
                uint64_t m = 0;
                for (uint64_t z2 : fam.block(z0, i)) m |= uint64_t(1) << z2;
                masks[z0 * fam.r1 + i] = m;
            }
        uint64_t best = 0;
        for (uint64_t a = 0; a < nblocks; ++a) {
            uint64_t ma = masks[a];
            for (uint64_t b = a + 1; b < nblocks; ++b) {
                uint64_t c = uint64_t(std::popcount(ma & masks[b]));
                ++s.pairs;
                // same-partition pairs must be disjoint
                if (a / fam.r1 == b / fam.r1 && c != 0) {
                    s.clause.pass = false;
                    s.clause.witness = "same-partition blocks overlap";
                    return s;
                }
                if (c > best) { best = c; s.worst_a = a; s.worst_b = b; }
            }
        }
        s.max_ratio = Rat((unsigned long)best, (unsigned long)fam.r2);
        s.max_ratio.canonicalize();
        s.exhaustive = s.clause.exhaustive = true;
        if (best > cap) {
            s.clause.pass = false;
            s.clause.witness = "blocks " + std::to_string(s.worst_a) + ", " +
                               std::to_string(s.worst_b) + " meet in " +
                               std::to_string(best) + " > " + std::to_string(cap) +
                               " points";
        } else {
            s.clause.witness = "exhaustive max intersection " + std::to_string(best) +
                               " <= " + std::to_string(cap);
        }
        return s;
    }
    // certified route: for the matrix family two blocks with different A
    // solve (A'-A'')x = b''-b', a system of rank >= 1, so the solution set
    // has at most q^3 = alpha*r2 points; spot-check the closed form against
    // brute force on random pairs
    auto rng = derive(seed, "family-transversality-spot");
    uint64_t best = 0;
    for (int t = 0; t < 200; ++t) {
        uint64_t za = rng.below(f0_limit), zb = rng.below(f0_limit);
        uint64_t ia = rng.below(fam.r1), ib = rng.below(fam.r1);
        if (za == zb && ia == ib) continue;
        uint64_t k = fam.intersection_size(za, ia, zb, ib);
        ++s.pairs;
        if (k > cap) {
            s.clause.pass = false;
            s.clause.witness = "sampled pair exceeds the cap";
            return s;
        }
        if (k > best) {
            best = k;
            s.worst_a = za * fam.r1 + ia;
            s.worst_b = zb * fam.r1 + ib;
        }
        if (fam.materialized || fam.f2_size <= (uint64_t(1) << 24)) {
            // brute-force recount via block enumeration
            auto A = fam.block(za, ia), B = fam.block(zb, ib);
            std::vector<uint64_t> common;
            std::set_intersection(A.begin(), A.end(), B.begin(), B.end(),
                                  std::back_inserter(common));
            if (common.size() != k) {
                s.clause.pass = false;
                s.clause.witness = "closed-form intersection " + std::to_string(k) +
                                   " != brute force " + std::to_string(common.size());
                return s;
            }
        }
    }
    s.max_ratio = Rat((unsigned long)best, (unsigned long)fam.r2);
    s.max_ratio.canonicalize();
    s.clause.witness =
        fam.kind == PartitionFamily::Kind::Matrix
            ? "rank certificate: A' != A'' gives |S∩S'| <= q^3 = alpha*r2; " +
                  std::to_string(s.pairs) + " spot checks"
            : "sampled pairs only (" + std::to_string(s.pairs) + ")";
    return s;
}

} // namespace

FamilyReport verify_partition_family(const PartitionFamily& fam, uint64_t pair_budget,
                                     uint64_t z0_budget, uint64_t seed) {
    FamilyReport rep;
    bool exhaustive_z0 = fam.f0_size <= z0_budget;
    auto z0s = z0_sample(fam.f0_size, z0_budget, seed);
    rep.clauses.push_back(check_partition(fam, z0s, exhaustive_z0, seed));
    auto scan = scan_transversality(fam, fam.f0_size, pair_budget, seed);
    rep.clauses.push_back(scan.clause);
    rep.max_intersection_ratio = scan.max_ratio;
    rep.pairs_checked = scan.pairs;
    return rep;
}

StrongBrick assemble_strong_brick(const PartitionFamily& fam, uint64_t f0_size) {
    if (f0_size == 0) f0_size = fam.f0_size;
    if (f0_size < 1 || f0_size > fam.f0_size)
        throw std::invalid_argument("f0_size outside the family index range");
    auto rep = verify_partition_family(fam);
    for (const auto& c : rep.clauses)
        if (!c.pass)
            throw std::invalid_argument("partition family rejected (" + c.name +
                                        "): " + c.witness);
    StrongBrick b{fam};
    b.f0_size = f0_size;
    b.r1 = fam.r1;
    b.r2 = fam.r2;
    b.f1_size = f0_size * fam.r1;
    b.f2_size = fam.f2_size;
    b.alpha = fam.alpha;
    return b;
}

BrickReport verify_strong_brick(const StrongBrick& b, uint64_t pair_budget,
                                uint64_t z0_budget, uint64_t seed) {
    BrickReport rep;
    const auto& fam = b.fam;

    ClauseReport card;
    card.name = "cardinalities";
    card.exhaustive = true;
    card.pass = b.f1_size == b.r1 * b.f0_size && b.f2_size == b.r1 * b.r2;
    card.witness = "|F1| = " + std::to_string(b.f1_size) + ", |F2| = " +
                   std::to_string(b.f2_size);
    rep.clauses.push_back(card);

    bool exhaustive_z0 = b.f0_size <= z0_budget;
    auto z0s = z0_sample(b.f0_size, z0_budget, seed);
    rep.clauses.push_back(check_partition(fam, z0s, exhaustive_z0, seed));

    ClauseReport fproj;
    fproj.name = "f-projection";
    fproj.exhaustive = true;
    fproj.pass = true;
    for (uint64_t z0 : z0s)
        for (uint64_t j = 0; j < std::min<uint64_t>(b.r1, 64); ++j)
            if (b.f(z0 * b.r1 + j) != z0 || b.j_of(z0 * b.r1 + j) != j) fproj.pass = false;
    fproj.witness = "f(z0*r1 + j) = z0 on the coded range; each fibre has r1 points";
    rep.clauses.push_back(fproj);

    ClauseReport gfib;
    gfib.name = "g-fibres";
    gfib.pass = true;
    gfib.exhaustive = exhaustive_z0 && fam.materialized;
    {
        auto rng = derive(seed, "brick-g-spot");
        for (uint64_t z0 : z0s) {
            if (fam.materialized) {
                for (uint64_t j = 0; j < b.r1; ++j) {
                    auto S = b.S(z0 * b.r1 + j);
                    if (S.size() != b.r2) gfib.pass = false;
                    for (uint64_t z2 : S)
                        if (b.g(z0, z2) != z0 * b.r1 + j) {
                            gfib.pass = false;
                            gfib.witness = "g disagrees with the block map at z0 = " +
                                           std::to_string(z0);
                        }
                }
            } else {
                for (int t = 0; t < 32; ++t) {
                    uint64_t j = rng.below(b.r1);
                    uint64_t z2 = fam.sample_block(z0, j, rng);
                    if (b.g(z0, z2) != z0 * b.r1 + j) {
                        gfib.pass = false;
                        gfib.witness = "g disagrees with the block map at z0 = " +
                                       std::to_string(z0);
                    }
                }
            }
        }
        if (gfib.pass)
            gfib.witness = "g^{-1}(z1) = {f(z1)} x S(z1), |S(z1)| = r2, over " +
                           std::to_string(z0s.size()) + " indices";
    }
    rep.clauses.push_back(gfib);

    ClauseReport joint;
    joint.name = "joint-law";
    joint.pass = true;
    joint.exhaustive = exhaustive_z0 && fam.materialized;
    {
        // with Z0 and Z2 independent uniform, J = block index: each (z0, j)
        // receives exactly r2 of the f2 points, so J is uniform and
        // independent of Z0, and Z2 given (Z0, J) is uniform on the block
        std::vector<uint64_t> perj(b.r1);
        for (uint64_t z0 : z0s) {
            std::fill(perj.begin(), perj.end(), 0);
            if (fam.materialized) {
                for (uint64_t z2 = 0; z2 < b.f2_size; ++z2) ++perj[fam.block_index(z0, z2)];
                for (uint64_t j = 0; j < b.r1; ++j)
                    if (perj[j] != b.r2) {
                        joint.pass = false;
                        joint.witness = "conditional mass of J = " + std::to_string(j) +
                                        " given z0 = " + std::to_string(z0) +
                                        " is not 1/r1";
                    }
            }
        }
        if (joint.pass)
            joint.witness = fam.materialized
                                ? "exact counts: P(J = j | Z0) = 1/r1, Z2 | (Z0,J) "
                                  "uniform on the block, Z0 independent of Z2"
                                : "structural: each partition splits the uniform law "
                                  "on F2 into r1 equal blocks";
    }
    rep.clauses.push_back(joint);

    auto scan = scan_transversality(fam, b.f0_size, pair_budget, seed);
    ClauseReport ov = scan.clause;
    ov.name = "overlap-cap";
    rep.clauses.push_back(ov);
    rep.max_overlap = scan.max_ratio;
    rep.worst_z1a = scan.worst_a;
    rep.worst_z1b = scan.worst_b;
    rep.pairs_checked = scan.pairs;
    rep.exhaustive_overlap = scan.exhaustive;

    ClauseReport r2b;
    r2b.name = "r2-bound";
    r2b.exhaustive = true;
    Rat prod = b.alpha * Rat((unsigned long)b.r2);
    prod.canonicalize();
    r2b.pass = b.f0_size < 2 || prod >= 1;
    r2b.witness = "r2 * alpha = " + rat_str(prod);
    rep.clauses.push_back(r2b);
    return rep;
}

} // namespace ftk::brick
