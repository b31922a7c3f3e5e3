#include "ftk/glue.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ftk::brick {

uint64_t GluedChain::level_size(uint32_t d) const {
    if (d > depth()) throw std::out_of_range("depth outside the window");
    if (d == depth()) return bricks.back().f0_size;
    size_t j = d / 2;
    return d % 2 == 0 ? bricks[j].f2_size : bricks[j].f1_size;
}

uint64_t GluedChain::adicity(uint32_t d) const {
    if (d >= depth()) throw std::out_of_range("no step into this depth");
    size_t j = d / 2;
    return d % 2 == 0 ? bricks[j].r2 : bricks[j].r1;
}

GluedChain glue(std::vector<StrongBrick> bricks) {
    if (bricks.empty()) throw std::invalid_argument("no bricks to glue");
    for (size_t j = 0; j + 1 < bricks.size(); ++j)
        if (bricks[j].f0_size != bricks[j + 1].f2_size)
            throw std::invalid_argument(
                "incompatible state sets between bricks " + std::to_string(j) +
                " and " + std::to_string(j + 1));
    GluedChain c;
    for (const auto& b : bricks) c.alphas.push_back(b.alpha);
    c.bricks = std::move(bricks);
    return c;
}

GluedChain glue_constant_q(FamilyKind fam, uint64_t q, uint32_t nbricks) {
    if (nbricks == 0) throw std::invalid_argument("need at least one brick");
    PartitionFamily base = fam == FamilyKind::Matrix ? matrix_partition_family(q)
                                                     : quartic_partition_family(q);
    std::vector<StrongBrick> bricks;
    for (uint32_t j = 0; j < nbricks; ++j) {
        bool deepest = j + 1 == nbricks;
        // inner bricks index partitions by the previous even-level state
        // set (an initial sub-range of the index codes); the deepest brick
        // keeps the full index set
        uint64_t f0 = deepest ? base.f0_size : base.f2_size;
        bricks.push_back(assemble_strong_brick(base, f0));
    }
    return glue(std::move(bricks));
}

GluedChain glue_tower(FamilyKind fam, uint64_t q, uint32_t nbricks) {
    if (nbricks == 0) throw std::invalid_argument("need at least one brick");
    if (nbricks > 2)
        throw std::invalid_argument(
            "tower mode capped at 2 bricks: the field sizes q^{2^j} explode");
    std::vector<StrongBrick> bricks;
    uint64_t qj = q;
    for (uint32_t j = 0; j < nbricks; ++j) {
        PartitionFamily f = fam == FamilyKind::Matrix ? matrix_partition_family(qj)
                                                      : quartic_partition_family(qj);
        bricks.push_back(assemble_strong_brick(f));
        qj *= qj;
    }
    // the full index set of brick j coincides with the next even level
    // (K_{j+1}^2 = K_j^4, resp. K_{j+1}^8 = M4(K_j)) through the quadratic
    // extension bijection, realized by the dense integer codes
    return glue(std::move(bricks));
}

GluedPath sample_chain(const GluedChain& chain, Rng& rng) {
    uint32_t M = chain.depth();
    GluedPath p;
    p.z.assign(M + 1, 0);
    p.z[M] = rng.below(chain.level_size(M));
    for (size_t j = chain.bricks.size(); j-- > 0;) {
        const auto& b = chain.bricks[j];
        uint32_t even = uint32_t(2 * j);
        uint64_t z2 = rng.below(b.f2_size);
        p.z[even] = z2;
        p.z[even + 1] = b.g(p.z[even + 2], z2);
    }
    return p;
}

bool path_consistent(const GluedChain& chain, const GluedPath& p, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (p.z.size() != chain.depth() + 1) return fail("path length mismatch");
    for (size_t j = 0; j < chain.bricks.size(); ++j) {
        const auto& b = chain.bricks[j];
        uint32_t even = uint32_t(2 * j);
        if (p.z[even] >= b.f2_size || p.z[even + 2] >= (j + 1 == chain.bricks.size()
                                                            ? b.f0_size
                                                            : chain.bricks[j + 1].f2_size))
            return fail("state out of range at brick " + std::to_string(j));
        if (p.z[even + 1] != b.g(p.z[even + 2], p.z[even]))
            return fail("odd level " + std::to_string(even + 1) +
                        " is not g(Z_deeper, Z_even)");
        if (b.f(p.z[even + 1]) != p.z[even + 2])
            return fail("f does not recover the deeper state at brick " +
                        std::to_string(j));
    }
    return true;
}

namespace {

// Y at depth d is the state itself iff depth d+1 lies outside D: Y_n = Z_n
// exactly when n-1 is NOT in D, so that Y_n is independent of the deeper
// D-levels; beyond the window the deepest member is an entrance value.
bool witness_is_state(const len::ExtractionSet& D, uint32_t d, uint32_t M) {
    return d + 1 > M || !D.contains(d + 1);
}

std::vector<uint32_t> window_members(const GluedChain& chain, const len::ExtractionSet& D) {
    std::string why;
    if (!D.valid(&why)) throw std::invalid_argument(why);
    uint32_t M = chain.depth();
    auto ms = D.members(M);
    for (uint32_t d = 0; d <= M; d += 2)
        if (!D.contains(d))
            throw std::invalid_argument(
                "extraction set must contain every even level of the window");
    return ms;
}

} // namespace

std::vector<uint64_t> witness_values(const GluedChain& chain,
                                     const len::ExtractionSet& D, const GluedPath& p) {
    uint32_t M = chain.depth();
    auto ms = window_members(chain, D);
    std::vector<uint64_t> y;
    for (uint32_t d : ms) {
        if (witness_is_state(D, d, M)) {
            y.push_back(p.z[d]);
        } else if (d % 2 == 1) {
            // innovation of the odd step: the block index J
            const auto& b = chain.bricks[d / 2];
            y.push_back(b.j_of(p.z[d]) + 1);
        } else {
            // innovation of the even step: rank inside the sorted block
            const auto& b = chain.bricks[d / 2];
            auto S = b.S(p.z[d + 1]);
            auto it = std::lower_bound(S.begin(), S.end(), p.z[d]);
            if (it == S.end() || *it != p.z[d])
                throw std::logic_error("state escapes its block");
            y.push_back(uint64_t(it - S.begin()) + 1);
        }
    }
    return y;
}

std::vector<uint64_t> reconstruct_from_witness(const GluedChain& chain,
                                               const len::ExtractionSet& D,
                                               const std::vector<uint64_t>& y) {
    uint32_t M = chain.depth();
    auto ms = window_members(chain, D);
    if (y.size() != ms.size()) throw std::invalid_argument("witness length mismatch");
    std::vector<uint64_t> z(ms.size());
    // deep to shallow: entrance values restart the recursion, innovations
    // extend it one level up
    for (size_t i = ms.size(); i-- > 0;) {
        uint32_t d = ms[i];
        if (witness_is_state(D, d, M)) {
            z[i] = y[i];
        } else {
            uint64_t deeper = z[i + 1];   // ms[i+1] == d+1 by construction
            if (d % 2 == 1) {
                const auto& b = chain.bricks[d / 2];
                z[i] = deeper * b.r1 + (y[i] - 1);
            } else {
                const auto& b = chain.bricks[d / 2];
                auto S = b.S(deeper);
                z[i] = S[y[i] - 1];
            }
        }
    }
    return z;
}

WitnessReport product_type_witness(const GluedChain& chain, const len::ExtractionSet& D,
                                   uint64_t enum_budget, uint64_t recon_paths,
                                   uint64_t seed) {
    uint32_t M = chain.depth();
    auto ms = window_members(chain, D);
    WitnessReport rep;

    std::vector<uint64_t> domains;
    for (uint32_t d : ms) {
        WitnessLevel lvl;
        lvl.n = -int64_t(d);
        lvl.is_state = witness_is_state(D, d, M);
        lvl.domain = lvl.is_state ? chain.level_size(d)
                                  : (d % 2 == 1 ? chain.bricks[d / 2].r1
                                                : chain.bricks[d / 2].r2);
        domains.push_back(lvl.domain);
        rep.levels.push_back(lvl);
    }

    // exact joint factorization: enumerate every assignment of the
    // independent even-level states and count witness tuples
    uint64_t total = 1;
    bool fits = true;
    for (uint32_t d = 0; d <= M; d += 2) {
        uint64_t s = chain.level_size(d);
        if (total > enum_budget / s) { fits = false; break; }
        total *= s;
    }
    if (fits) {
        std::map<std::vector<uint64_t>, uint64_t> counts;
        std::vector<uint64_t> evens(chain.bricks.size() + 1, 0);
        GluedPath p;
        p.z.assign(M + 1, 0);
        bool ok = true;
        for (uint64_t it = 0; it < total; ++it) {
            uint64_t rest = it;
            for (size_t j = 0; j <= chain.bricks.size(); ++j) {
                uint32_t d = uint32_t(2 * j);
                uint64_t s = chain.level_size(d);
                evens[j] = rest % s;
                rest /= s;
            }
            p.z[M] = evens[chain.bricks.size()];
            for (size_t j = chain.bricks.size(); j-- > 0;) {
                uint32_t even = uint32_t(2 * j);
                p.z[even] = evens[j];
                p.z[even + 1] = chain.bricks[j].g(p.z[even + 2], p.z[even]);
            }
            ++counts[witness_values(chain, D, p)];
        }
        uint64_t expected_tuples = 1;
        for (uint64_t dom : domains) expected_tuples *= dom;
        if (counts.size() != expected_tuples) ok = false;
        uint64_t per = total / expected_tuples;
        for (const auto& [tuple, c] : counts)
            if (c != per) ok = false;
        rep.independent_uniform = ok;
        rep.checked_exactly = true;
        rep.outcomes = total;
    }

    // reconstruction on sampled paths
    {
        bool ok = true;
        for (uint64_t t = 0; t < recon_paths; ++t) {
            auto rng = derive(seed, "witness-recon", t);
            auto p = sample_chain(chain, rng);
            auto y = witness_values(chain, D, p);
            auto z = reconstruct_from_witness(chain, D, y);
            for (size_t i = 0; i < ms.size(); ++i)
                if (z[i] != p.z[ms[i]]) ok = false;
        }
        rep.reconstruction_ok = ok;
        rep.paths_checked = recon_paths;
    }
    return rep;
}

} // namespace ftk::brick
