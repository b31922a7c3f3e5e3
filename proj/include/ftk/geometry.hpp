#pragma once
// The geometric brick over (F_p)^5: X0 a uniform 2-dimensional linear
// subspace, X1 a uniform affine line with direction inside X0, X2 a
// uniform point of X1. Exact enumeration, exact kernels, and the exact
// total-variation / Kantorovich-Rubinstein separation bounds.
//
// Points are 5-digit base-p codes. A line is keyed by
// (direction << 32) | anchor where the direction is the projective
// canonical representative (first non-zero digit scaled to 1) and the
// anchor is the smallest point code on the line.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ftk/rational.hpp"

namespace ftk::brick {

struct GeometricBrick {
    uint32_t p = 0;
    uint64_t point_count = 0;                      // p^5
    std::vector<std::array<uint32_t, 2>> planes;   // rref basis rows, each row
                                                   // a point code
    std::vector<uint64_t> lines;                   // sorted keys; id = index
    std::vector<uint64_t> line_pts;                // p sorted point codes per id

    uint64_t plane_count() const { return planes.size(); }
    uint64_t line_id(uint64_t key) const;          // index in `lines`
    std::vector<uint64_t> line_points(uint64_t id) const;   // p point codes
    // ids of the (p+1)p^4 lines whose direction lies in the plane, sorted
    std::vector<uint64_t> plane_line_ids(uint64_t plane_idx) const;
};

GeometricBrick build_geometric_brick(uint32_t p);   // p in {2, 3, 5}

// 1 - |l1 ∩ l2| / p : total variation between the two X2-kernels
Rat rho1(const GeometricBrick& b, uint64_t line_a, uint64_t line_b);
// exact optimal transport between the X1-kernels of two planes with rho1
// as ground metric
Rat rho0(const GeometricBrick& b, uint64_t plane_a, uint64_t plane_b);

struct GeometricReport {
    bool x2_uniform = false;            // X2 uniform on (F_p)^5, exactly
    bool x0_x2_independent = false;     // joint law factorizes, exactly
    bool rho1_ok = false;               // >= (p-1)/p for distinct lines
    bool rho0_ok = false;               // >= 1 - 2/(p+1) for distinct planes
    Rat rho0_min;
    uint64_t rho0_witness_a = 0, rho0_witness_b = 0;
    uint64_t plane_pairs_checked = 0;
    uint64_t line_pairs_checked = 0;
    bool exhaustive_planes = false;
    bool exhaustive_lines = false;
    bool all_pass() const {
        return x2_uniform && x0_x2_independent && rho1_ok && rho0_ok;
    }
};

GeometricReport verify_geometric_brick(const GeometricBrick& b,
                                       uint64_t plane_pair_budget = 20000,
                                       uint64_t line_pair_budget = 200000,
                                       uint64_t seed = 2026);

} // namespace ftk::brick
