#pragma once
// Finitely supported distributions with exact rational masses, and the
// exact optimal-transport distance between them.

#include <cstdint>
#include <functional>
#include <vector>

#include "ftk/rational.hpp"

namespace ftk {

// States are uint64 codes; support kept sorted by state.
class Dist {
public:
    Dist() = default;
    explicit Dist(std::vector<std::pair<uint64_t, Rat>> atoms);

    static Dist uniform(const std::vector<uint64_t>& states);
    static Dist point(uint64_t state);

    const std::vector<std::pair<uint64_t, Rat>>& atoms() const { return atoms_; }
    Rat mass(uint64_t state) const;
    bool is_probability() const;          // masses positive, total exactly 1

private:
    std::vector<std::pair<uint64_t, Rat>> atoms_;
};

// sum_z min(a(z), b(z)) == 1 - tv(a, b)
Rat overlap(const Dist& a, const Dist& b);
Rat tv(const Dist& a, const Dist& b);

// Minimal-cost transport from a to b under an exact symmetric ground
// metric, solved by an integer-scaled transportation simplex (the
// constraint matrix is totally unimodular, so scaling to integer supplies
// keeps every basic solution integral and the optimum exact).
Rat kr_distance(const Dist& a, const Dist& b,
                const std::function<Rat(uint64_t, uint64_t)>& ground_metric);

// Integer transportation problem: min sum c_ij x_ij with given row/column
// sums. supply and demand must balance. cost is row-major m*n.
Int transport_min_cost(const std::vector<int64_t>& supply,
                       const std::vector<int64_t>& demand,
                       const std::vector<int64_t>& cost);

} // namespace ftk
