#pragma once
// Strong bricks from transversal partition families: the two algebraic
// families (affine-map blocks over K^4 x K^4 and quartic-graph blocks over
// K^2), assembly of (r1, r2)-adic alpha-bricks, and clause-by-clause
// verification.
//
// Encodings: every finite set is the integer range [0, size); field
// elements use the base-p digit codes of ftk::gf, and product sets use
// mixed-radix codes with the factor listed first as the most significant
// digit documented per type. Those codes double as the canonical total
// order used wherever the construction needs one.

#include <cstdint>
#include <string>
#include <vector>

#include "ftk/gf.hpp"
#include "ftk/rational.hpp"
#include "ftk/rng.hpp"

namespace ftk::brick {

// A family of partitions of F2, one per index z0 in F0, with r1 blocks of
// r2 elements each and pairwise block intersections capped by alpha*r2.
struct PartitionFamily {
    enum class Kind {
        // F2 = K^4 x K^4 (code = xcode + ycode * q^4), index A in M4(K)
        // (code digits row-major, A[0][0] least significant), blocks
        // {y = Ax + b} indexed by b in K^4. r1 = r2 = q^4, alpha = 1/q.
        Matrix,
        // F2 = K^2 (code = x*q + y), index (a,b,c,d) in K^4 (code
        // ((a*q+b)*q+c)*q+d), blocks {y = ax^4+bx^3+cx^2+dx+e} indexed by
        // e in K. r1 = r2 = q, alpha = 4/q; requires q >= 5.
        Quartic,
    };

    Kind kind;
    gf::FieldSpec K;
    uint64_t f0_size = 0, f2_size = 0, r1 = 0, r2 = 0;
    Rat alpha;
    bool materialized = false;   // F2 small enough for exhaustive scans

    // index of the block of partition z0 containing z2
    uint64_t block_index(uint64_t z0, uint64_t z2) const;
    bool in_block(uint64_t z0, uint64_t i, uint64_t z2) const;
    std::vector<uint64_t> block(uint64_t z0, uint64_t i) const;   // sorted
    // the element of block (z0, i) with parameter t in [0, r2): the graph
    // point with argument x = t
    uint64_t block_element(uint64_t z0, uint64_t i, uint64_t t) const;
    uint64_t sample_block(uint64_t z0, uint64_t i, Rng& rng) const;

    // exact |S_{za,ia} ∩ S_{zb,ib}| (closed form for Matrix, root count
    // for Quartic)
    uint64_t intersection_size(uint64_t za, uint64_t ia,
                               uint64_t zb, uint64_t ib) const;
    // uniform draw from the intersection (precondition: non-empty)
    uint64_t sample_intersection(uint64_t za, uint64_t ia,
                                 uint64_t zb, uint64_t ib, Rng& rng) const;
    // uniform draw from S_{za,ia} \ S_{zb,ib} (precondition: non-empty)
    uint64_t sample_block_excluding(uint64_t za, uint64_t ia,
                                    uint64_t zb, uint64_t ib, Rng& rng) const;
};

PartitionFamily matrix_partition_family(uint64_t q);
PartitionFamily quartic_partition_family(uint64_t q);   // q >= 5

struct ClauseReport {
    std::string name;
    bool pass = false;
    bool exhaustive = false;   // false: certified analytically + spot checks
    std::string witness;       // offending pair / block, or the certificate
};

struct FamilyReport {
    std::vector<ClauseReport> clauses;
    Rat max_intersection_ratio;   // max |S∩S'|/r2 over checked pairs
    uint64_t pairs_checked = 0;
    bool all_pass() const;
};

// Partition + transversality invariants. Exhaustive when the block count
// squared fits pair_budget and F2 is materialized; otherwise the Matrix
// rank certificate plus seeded brute-force spot checks.
FamilyReport verify_partition_family(const PartitionFamily& fam,
                                     uint64_t pair_budget = uint64_t(1) << 28,
                                     uint64_t z0_budget = 4096,
                                     uint64_t seed = 2026);

// f(z1) = z1 / r1, J(z1) = z1 % r1, g(z0, z2) = z0*r1 + block_index.
// F0 may be a sub-range [0, f0_size) of the family's index set: restricting
// the index family preserves the partition and transversality invariants.
struct StrongBrick {
    PartitionFamily fam;
    uint64_t f0_size = 0;   // <= fam.f0_size
    uint64_t f1_size = 0, f2_size = 0, r1 = 0, r2 = 0;
    Rat alpha;

    uint64_t f(uint64_t z1) const { return z1 / r1; }
    uint64_t j_of(uint64_t z1) const { return z1 % r1; }
    uint64_t g(uint64_t z0, uint64_t z2) const {
        return z0 * r1 + fam.block_index(z0, z2);
    }
    std::vector<uint64_t> S(uint64_t z1) const { return fam.block(f(z1), j_of(z1)); }
};

// Verifies the family invariants first (throws std::invalid_argument with
// the offending pair/block on violation). f0_size = 0 means the family's
// full index set.
StrongBrick assemble_strong_brick(const PartitionFamily& fam, uint64_t f0_size = 0);

struct BrickReport {
    std::vector<ClauseReport> clauses;
    Rat max_overlap;              // max over distinct z1 pairs of |S∩S'|/r2
    uint64_t worst_z1a = 0, worst_z1b = 0;
    uint64_t pairs_checked = 0;
    bool exhaustive_overlap = false;
    bool all_pass() const;
};

// All definition clauses: cardinalities, per-z0 partitions, fibre structure
// of f and g, independence/uniformity of the induced joint law, the
// overlap cap (bad-coupling bound), and r2 >= 1/alpha.
BrickReport verify_strong_brick(const StrongBrick& b,
                                uint64_t pair_budget = uint64_t(1) << 28,
                                uint64_t z0_budget = 4096,
                                uint64_t seed = 2026);

} // namespace ftk::brick
