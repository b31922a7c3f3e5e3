#include "ftk/gf.hpp"

#include <algorithm>
#include <cassert>

namespace ftk::gf {

namespace {

constexpr uint64_t kTableLimit = 512;   // cache mul/inv tables below this order

bool is_prime(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t d = 2; uint64_t(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

using Poly = std::vector<uint32_t>;   // over GF(p), constant term first

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul(uint32_t p, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = uint32_t((r[i + j] + uint64_t(a[i]) * b[j]) % p);
    trim(r);
    return r;
}

uint32_t inv_mod_p(uint32_t a, uint32_t p) {
    // p prime, a != 0
    int64_t t = 0, nt = 1, r = p, nr = a % p;
    while (nr != 0) {
        int64_t q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (t < 0) t += p;
    return uint32_t(t);
}

// a mod m, m non-constant
Poly poly_mod(uint32_t p, Poly a, const Poly& m) {
    trim(a);
    uint32_t lead_inv = inv_mod_p(m.back(), p);
    while (a.size() >= m.size()) {
        uint32_t c = uint32_t(uint64_t(a.back()) * lead_inv % p);
        size_t shift = a.size() - m.size();
        for (size_t i = 0; i < m.size(); ++i) {
            uint64_t sub = uint64_t(c) * m[i] % p;
            a[shift + i] = uint32_t((a[shift + i] + p - sub) % p);
        }
        trim(a);
    }
    return a;
}

Poly poly_gcd(uint32_t p, Poly a, Poly b) {
    trim(a); trim(b);
    while (!b.empty()) {
        Poly r = poly_mod(p, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

Poly decode_poly(uint32_t p, uint64_t code, uint32_t len) {
    Poly c(len, 0);
    for (uint32_t i = 0; i < len; ++i) { c[i] = uint32_t(code % p); code /= p; }
    return c;
}

} // namespace

bool poly_irreducible(uint32_t p, const std::vector<uint32_t>& poly) {
    Poly f = poly;
    trim(f);
    if (f.size() < 2) return false;
    uint32_t deg = uint32_t(f.size() - 1);
    if (deg == 1) return true;
    if (f[0] == 0) return false;                       // divisible by x
    // trial division by every monic polynomial of degree 1..deg/2
    for (uint32_t d = 1; d <= deg / 2; ++d) {
        uint64_t count = 1;
        for (uint32_t i = 0; i < d; ++i) count *= p;
        for (uint64_t code = 0; code < count; ++code) {
            Poly g = decode_poly(p, code, d);
            g.push_back(1);                            // monic
            if (poly_mod(p, f, g).empty()) return false;
        }
    }
    return true;
}

FieldSpec FieldSpec::make(uint32_t p, uint32_t k) {
    if (!is_prime(p)) throw std::invalid_argument("characteristic must be prime");
    if (k < 1 || k > 16) throw std::invalid_argument("degree out of range [1,16]");
    uint64_t q = 1;
    for (uint32_t i = 0; i < k; ++i) {
        q *= p;
        if (q > (uint64_t(1) << 17)) throw std::invalid_argument("field order exceeds 2^16 budget");
    }
    FieldSpec F;
    F.p_ = p;
    F.k_ = k;
    F.q_ = q;
    if (k == 1) {
        F.mod_ = {0, 1};                               // x
    } else {
        bool found = false;
        for (uint64_t code = 0; code < q && !found; ++code) {
            Poly f = decode_poly(p, code, k);
            f.push_back(1);
            if (poly_irreducible(p, f)) {
                F.mod_ = f;
                found = true;
            }
        }
        if (!found) throw std::logic_error("no irreducible polynomial found");
    }
    if (q <= kTableLimit) {
        F.mul_table_.assign(size_t(q) * q, 0);
        for (uint64_t a = 0; a < q; ++a)
            for (uint64_t b = a; b < q; ++b) {
                Elem v = F.mul_slow(Elem(a), Elem(b));
                F.mul_table_[a * q + b] = v;
                F.mul_table_[b * q + a] = v;
            }
        F.inv_table_.assign(size_t(q), 0);
        for (uint64_t a = 1; a < q; ++a)
            for (uint64_t b = 1; b < q; ++b)
                if (F.mul_table_[a * q + b] == 1) { F.inv_table_[a] = Elem(b); break; }
    }
    return F;
}

std::vector<uint32_t> FieldSpec::coeffs(Elem a) const {
    std::vector<uint32_t> c(k_, 0);
    for (uint32_t i = 0; i < k_; ++i) { c[i] = a % p_; a /= p_; }
    return c;
}

Elem FieldSpec::from_coeffs(const std::vector<uint32_t>& c) const {
    Elem a = 0;
    for (size_t i = c.size(); i-- > 0;) a = Elem(a * p_ + c[i] % p_);
    return a;
}

Elem FieldSpec::add(Elem a, Elem b) const {
    Elem r = 0, mult = 1;
    for (uint32_t i = 0; i < k_; ++i) {
        r += ((a + b) % p_) * mult;
        a /= p_; b /= p_;
        mult *= p_;
    }
    return r;
}

Elem FieldSpec::neg(Elem a) const {
    Elem r = 0, mult = 1;
    for (uint32_t i = 0; i < k_; ++i) {
        r += ((p_ - a % p_) % p_) * mult;
        a /= p_;
        mult *= p_;
    }
    return r;
}

Elem FieldSpec::sub(Elem a, Elem b) const { return add(a, neg(b)); }

Elem FieldSpec::mul_slow(Elem a, Elem b) const {
    Poly r = poly_mod(p_, poly_mul(p_, coeffs(a), coeffs(b)), mod_);
    r.resize(k_, 0);
    return from_coeffs(r);
}

Elem FieldSpec::mul(Elem a, Elem b) const {
    if (!mul_table_.empty()) return mul_table_[size_t(a) * q_ + b];
    return mul_slow(a, b);
}

Elem FieldSpec::inv(Elem a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    if (!inv_table_.empty()) return inv_table_[a];
    return pow(a, q_ - 2);
}

Elem FieldSpec::pow(Elem a, uint64_t e) const {
    Elem r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

QuadExt::QuadExt(const FieldSpec& base) : base_(&base), b_(0), c_(0) {
    const FieldSpec& K = *base_;
    bool found = false;
    // smallest (b,c) in encoding order with t^2 + b t + c root-free over K
    for (Elem b = 0; b < K.q() && !found; ++b)
        for (Elem c = 0; c < K.q() && !found; ++c) {
            bool has_root = false;
            for (Elem x = 0; x < K.q(); ++x) {
                Elem v = K.add(K.add(K.mul(x, x), K.mul(b, x)), c);
                if (v == 0) { has_root = true; break; }
            }
            if (!has_root) { b_ = b; c_ = c; found = true; }
        }
    if (!found) throw std::logic_error("no irreducible quadratic found");
}

Elem QuadExt::lift(Elem a0, Elem a1) const {
    return Elem(a0 + a1 * base_->q());
}

std::pair<Elem, Elem> QuadExt::drop(Elem x) const {
    return {Elem(x % base_->q()), Elem(x / base_->q())};
}

Elem QuadExt::add(Elem x, Elem y) const {
    auto [x0, x1] = drop(x);
    auto [y0, y1] = drop(y);
    return lift(base_->add(x0, y0), base_->add(x1, y1));
}

Elem QuadExt::mul(Elem x, Elem y) const {
    const FieldSpec& K = *base_;
    auto [x0, x1] = drop(x);
    auto [y0, y1] = drop(y);
    Elem hi = K.mul(x1, y1);                      // coefficient of t^2
    Elem mid = K.add(K.mul(x0, y1), K.mul(x1, y0));
    Elem lo = K.mul(x0, y0);
    // t^2 = -b t - c
    mid = K.sub(mid, K.mul(hi, b_));
    lo = K.sub(lo, K.mul(hi, c_));
    return lift(lo, mid);
}

Elem QuadExt::inv(Elem x) const {
    if (x == 0) throw std::domain_error("inverse of zero");
    // brute force is fine at these orders
    for (uint64_t y = 1; y < order(); ++y)
        if (mul(x, Elem(y)) == 1) return Elem(y);
    throw std::logic_error("no inverse found");
}

Mat mat_sub(const FieldSpec& F, const Mat& a, const Mat& b) {
    assert(a.rows == b.rows && a.cols == b.cols);
    Mat r(a.rows, a.cols);
    for (size_t i = 0; i < r.e.size(); ++i) r.e[i] = F.sub(a.e[i], b.e[i]);
    return r;
}

std::vector<Elem> mat_apply(const FieldSpec& F, const Mat& a, const std::vector<Elem>& x) {
    assert(x.size() == a.cols);
    std::vector<Elem> y(a.rows, 0);
    for (uint32_t i = 0; i < a.rows; ++i) {
        Elem s = 0;
        for (uint32_t j = 0; j < a.cols; ++j) s = F.add(s, F.mul(a.at(i, j), x[j]));
        y[i] = s;
    }
    return y;
}

uint32_t rref(const FieldSpec& F, Mat& m) {
    uint32_t r = 0;
    for (uint32_t col = 0; col < m.cols && r < m.rows; ++col) {
        uint32_t piv = r;
        while (piv < m.rows && m.at(piv, col) == 0) ++piv;
        if (piv == m.rows) continue;
        for (uint32_t j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(piv, j));
        Elem inv = F.inv(m.at(r, col));
        for (uint32_t j = 0; j < m.cols; ++j) m.at(r, j) = F.mul(m.at(r, j), inv);
        for (uint32_t i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, col) == 0) continue;
            Elem c = m.at(i, col);
            for (uint32_t j = 0; j < m.cols; ++j)
                m.at(i, j) = F.sub(m.at(i, j), F.mul(c, m.at(r, j)));
        }
        ++r;
    }
    return r;
}

uint32_t rank(const FieldSpec& F, Mat m) {
    return rref(F, m);
}

AffineSolution solve(const FieldSpec& F, Mat a, std::vector<Elem> b) {
    assert(b.size() == a.rows);
    Mat aug(a.rows, a.cols + 1);
    for (uint32_t i = 0; i < a.rows; ++i) {
        for (uint32_t j = 0; j < a.cols; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols) = b[i];
    }
    rref(F, aug);
    AffineSolution sol;
    std::vector<int> pivot_of_col(a.cols, -1);
    uint32_t row = 0;
    for (uint32_t col = 0; col < a.cols && row < a.rows; ++col) {
        if (aug.at(row, col) == 1) {
            bool is_pivot = true;
            for (uint32_t j = 0; j < col; ++j)
                if (aug.at(row, j) != 0) { is_pivot = false; break; }
            if (is_pivot) { pivot_of_col[col] = int(row); ++row; }
        }
    }
    for (uint32_t i = row; i < a.rows; ++i)
        if (aug.at(i, a.cols) != 0) return sol;        // inconsistent
    // also catch rows of the form [0 ... 0 | c] above `row`
    for (uint32_t i = 0; i < a.rows; ++i) {
        bool all_zero = true;
        for (uint32_t j = 0; j < a.cols; ++j)
            if (aug.at(i, j) != 0) { all_zero = false; break; }
        if (all_zero && aug.at(i, a.cols) != 0) return sol;
    }
    sol.consistent = true;
    sol.particular.assign(a.cols, 0);
    for (uint32_t col = 0; col < a.cols; ++col)
        if (pivot_of_col[col] >= 0)
            sol.particular[col] = aug.at(uint32_t(pivot_of_col[col]), a.cols);
    for (uint32_t col = 0; col < a.cols; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        std::vector<Elem> v(a.cols, 0);
        v[col] = 1;
        for (uint32_t c2 = 0; c2 < a.cols; ++c2)
            if (pivot_of_col[c2] >= 0)
                v[c2] = F.neg(aug.at(uint32_t(pivot_of_col[c2]), col));
        sol.null_basis.push_back(std::move(v));
    }
    return sol;
}

} // namespace ftk::gf
