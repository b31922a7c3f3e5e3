#pragma once
// Exact arithmetic in GF(p^k) and in quadratic extensions GF(q^2),
// plus dense linear algebra over these fields.
//
// Elements are coefficient vectors over GF(p), encoded as their integer
// rank when the vector is read as base-p digits (constant term = least
// significant digit). That encoding doubles as the canonical total order
// used everywhere a construction needs one.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ftk::gf {

using Elem = uint32_t;

class FieldSpec {
public:
    // Deterministically chosen modulus: the monic irreducible of degree k
    // whose non-leading coefficient vector has the smallest base-p encoding.
    static FieldSpec make(uint32_t p, uint32_t k);

    uint32_t p() const { return p_; }
    uint32_t degree() const { return k_; }
    uint64_t q() const { return q_; }
    // modulus coefficients, constant term first, length k+1, monic
    const std::vector<uint32_t>& modulus() const { return mod_; }

    Elem add(Elem a, Elem b) const;
    Elem sub(Elem a, Elem b) const;
    Elem neg(Elem a) const;
    Elem mul(Elem a, Elem b) const;
    Elem inv(Elem a) const;
    Elem pow(Elem a, uint64_t e) const;

    std::vector<uint32_t> coeffs(Elem a) const;
    Elem from_coeffs(const std::vector<uint32_t>& c) const;

private:
    FieldSpec() = default;
    Elem mul_slow(Elem a, Elem b) const;
    uint32_t p_ = 0, k_ = 0;
    uint64_t q_ = 0;
    std::vector<uint32_t> mod_;
    std::vector<Elem> mul_table_;   // cached when q small
    std::vector<Elem> inv_table_;
};

// Polynomial helpers over GF(p), coefficients constant-term first.
bool poly_irreducible(uint32_t p, const std::vector<uint32_t>& poly);

// L = K[t]/(t^2 + b t + c) for the smallest irreducible monic quadratic
// over K. Elements of L are encoded as a0 + a1*q in the basis {1, tbar},
// which realizes the bijection between K^2 and L.
class QuadExt {
public:
    explicit QuadExt(const FieldSpec& base);

    const FieldSpec& base() const { return *base_; }
    uint64_t order() const { return base_->q() * base_->q(); }
    Elem lift(Elem a0, Elem a1) const;              // (a0,a1) -> element of L
    std::pair<Elem, Elem> drop(Elem x) const;       // inverse bijection

    Elem add(Elem x, Elem y) const;
    Elem mul(Elem x, Elem y) const;
    Elem inv(Elem x) const;

    // modulus t^2 + b t + c
    Elem quad_b() const { return b_; }
    Elem quad_c() const { return c_; }

private:
    const FieldSpec* base_;
    Elem b_, c_;
};

struct Mat {
    uint32_t rows = 0, cols = 0;
    std::vector<Elem> e;   // row-major

    Mat() = default;
    Mat(uint32_t r, uint32_t c) : rows(r), cols(c), e(size_t(r) * c, 0) {}
    Elem& at(uint32_t i, uint32_t j) { return e[size_t(i) * cols + j]; }
    Elem at(uint32_t i, uint32_t j) const { return e[size_t(i) * cols + j]; }
};

Mat mat_sub(const FieldSpec& F, const Mat& a, const Mat& b);
std::vector<Elem> mat_apply(const FieldSpec& F, const Mat& a, const std::vector<Elem>& x);
uint32_t rank(const FieldSpec& F, Mat m);

// Solution set of A x = b: empty, or particular + null-space basis.
struct AffineSolution {
    bool consistent = false;
    std::vector<Elem> particular;
    std::vector<std::vector<Elem>> null_basis;
};
AffineSolution solve(const FieldSpec& F, Mat a, std::vector<Elem> b);

// Reduced row echelon form in place; returns rank.
uint32_t rref(const FieldSpec& F, Mat& m);

} // namespace ftk::gf
