#pragma once
// Gluing strong bricks into an adic Markov chain: independent uniform
// even-level states, odd levels filled deterministically by g, plus the
// product-type witness that re-expresses the chain through independent
// innovations along an extraction set.

#include <cstdint>
#include <string>
#include <vector>

#include "ftk/bricks.hpp"
#include "ftk/lengths.hpp"
#include "ftk/rng.hpp"

namespace ftk::brick {

// bricks[j] spans depths (2j, 2j+1, 2j+2): its F2 is the state set at
// depth 2j and its F0 the state set at depth 2j+2. Window depth M =
// 2 * bricks.size(), levels n = -M..0 stored as depths d = -n.
struct GluedChain {
    std::vector<StrongBrick> bricks;
    std::vector<Rat> alphas;   // alphas[j] = bound of bricks[j]

    uint32_t depth() const { return uint32_t(2 * bricks.size()); }
    uint64_t level_size(uint32_t d) const;   // |F_{-d}|
    // r_{-d}: innovation count of the step into depth d, for d < depth()
    uint64_t adicity(uint32_t d) const;
};

// Checks consecutive compatibility: bricks[j].f0_size == bricks[j+1].f2_size.
GluedChain glue(std::vector<StrongBrick> bricks);

enum class FamilyKind { Matrix, Quartic };

// All bricks over the same field K. Inner bricks index their partitions by
// the previous even-level state set (a sub-range of the full index set:
// K^8 inside M4(K), or K^2 inside K^4); the deepest brick keeps the full
// index set.
GluedChain glue_constant_q(FamilyKind fam, uint64_t q, uint32_t nbricks);

// Tower mode q_j = q^{2^j}: brick j lives over the field with q_j
// elements, and its full index set (of size q_j^2 squared, resp. q_j^16)
// coincides in cardinality with the next even level through the quadratic
// extension bijection K_{j+1} = K_j^2, realized here by the dense integer
// codes. Doubly exponential: capped at nbricks <= 2.
GluedChain glue_tower(FamilyKind fam, uint64_t q, uint32_t nbricks);

struct GluedPath {
    std::vector<uint64_t> z;   // z[d] = Z_{-d}, d = 0..depth
};

GluedPath sample_chain(const GluedChain& chain, Rng& rng);
// the splitting/gluing invariant: odd levels determined by g
bool path_consistent(const GluedChain& chain, const GluedPath& p, std::string* why = nullptr);

// Product-type witness along D (depths; must contain every even depth of
// the window). Y at depth d is Z_{-d} itself when depth d+1 is outside D
// (entrance values), and otherwise the innovation U_{-d}: the block index
// J at odd depths, the rank of Z_{-d} inside the sorted block S(Z_{-d-1})
// at even depths.
struct WitnessLevel {
    int64_t n = 0;
    bool is_state = false;     // Y = Z (else Y = U)
    uint64_t domain = 0;       // number of possible values
};

struct WitnessReport {
    std::vector<WitnessLevel> levels;   // members of D, shallow to deep
    bool independent_uniform = false;   // exact joint factorization
    bool checked_exactly = false;       // false when the budget was exceeded
    uint64_t outcomes = 0;              // enumerated even-state assignments
    bool reconstruction_ok = false;     // Z recovered from Y on sampled paths
    uint64_t paths_checked = 0;
};

// Witness values for one path, ordered like WitnessReport::levels.
std::vector<uint64_t> witness_values(const GluedChain& chain,
                                     const len::ExtractionSet& D,
                                     const GluedPath& p);
// Inverse: member states z[d], d in D, from the witness values.
std::vector<uint64_t> reconstruct_from_witness(const GluedChain& chain,
                                               const len::ExtractionSet& D,
                                               const std::vector<uint64_t>& y);

WitnessReport product_type_witness(const GluedChain& chain,
                                   const len::ExtractionSet& D,
                                   uint64_t enum_budget = uint64_t(1) << 22,
                                   uint64_t recon_paths = 10000,
                                   uint64_t seed = 2026);

} // namespace ftk::brick
