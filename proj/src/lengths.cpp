#include "ftk/lengths.hpp"

#include <mpfr.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ftk::len {

namespace {

// 2^e >= v for exact big integers (v >= 1)
bool pow2_ge(const Int& e, const Int& v) {
    if (v <= 0) return true;
    size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);   // 2^{bits-1} <= v < 2^bits
    if (e >= Int((unsigned long)bits)) return true;
    if (e == Int((unsigned long)(bits - 1))) {
        // equality case: 2^{bits-1} >= v iff v is exactly that power
        return mpz_popcount(v.get_mpz_t()) == 1;
    }
    return false;
}

Rat term_over_pow2(const Int& num, const Level& lvl) {
    // num / l_n; level must be exact
    Rat r(num, lvl.value);
    r.canonicalize();
    return r;
}

// log2 of a positive big integer, enclosed in rationals via MPFR directed
// rounding. Exact when v is a power of two.
std::pair<Rat, Rat> log2_enclosure(const Int& v) {
    if (mpz_popcount(v.get_mpz_t()) == 1) {
        Rat e((unsigned long)mpz_sizeinbase(v.get_mpz_t(), 2) - 1);
        return {e, e};
    }
    mpfr_t x, l;
    mpfr_init2(x, mpz_sizeinbase(v.get_mpz_t(), 2) + 8);
    mpfr_init2(l, 128);
    mpfr_set_z(x, v.get_mpz_t(), MPFR_RNDN);
    Rat lo, hi;
    mpfr_log2(l, x, MPFR_RNDD);
    mpfr_get_q(lo.get_mpq_t(), l);
    mpfr_log2(l, x, MPFR_RNDU);
    mpfr_get_q(hi.get_mpq_t(), l);
    mpfr_clears(x, l, (mpfr_ptr)nullptr);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

std::string nstr(int64_t n) { return std::to_string(n); }

} // namespace

// ---------------------------------------------------------------- alpha ----

AlphaSequence AlphaSequence::constant(const Rat& c) {
    if (c < 0 || c > 1) throw std::invalid_argument("alpha must lie in [0,1]");
    AlphaSequence a;
    a.tail = AlphaTail::Constant;
    a.const_even = a.const_odd = c;
    return a;
}

AlphaSequence AlphaSequence::even_odd(const Rat& even_value, const Rat& odd_value) {
    if (even_value < 0 || even_value > 1 || odd_value < 0 || odd_value > 1)
        throw std::invalid_argument("alpha must lie in [0,1]");
    AlphaSequence a;
    a.tail = AlphaTail::EvenOdd;
    a.const_even = even_value;
    a.const_odd = odd_value;
    return a;
}

AlphaSequence AlphaSequence::summable() {
    AlphaSequence a;
    a.tail = AlphaTail::Summable;
    return a;
}

AlphaSequence AlphaSequence::harmonic() {
    AlphaSequence a;
    a.tail = AlphaTail::Harmonic;
    return a;
}

AlphaSequence AlphaSequence::explicit_values(std::vector<Rat> by_depth) {
    for (const auto& v : by_depth)
        if (v < 0 || v > 1) throw std::invalid_argument("alpha must lie in [0,1]");
    AlphaSequence a;
    a.tail = AlphaTail::Unspecified;
    a.values = std::move(by_depth);
    return a;
}

Rat AlphaSequence::at_depth(uint64_t d) const {
    if (d < values.size()) return values[d];
    switch (tail) {
        case AlphaTail::Constant: return const_even;
        case AlphaTail::EvenOdd: return d % 2 == 0 ? const_even : const_odd;
        case AlphaTail::Summable: {
            Rat r(Int(1), pow2((unsigned long)d));
            r.canonicalize();
            return r;
        }
        case AlphaTail::Harmonic:
            return d == 0 ? Rat(1) : Rat(1, (unsigned long)d);
        case AlphaTail::Unspecified:
            throw std::out_of_range("alpha value requested beyond the explicit horizon");
    }
    return Rat(0);
}

Rat AlphaSequence::clamped_at_depth(uint64_t d) const {
    Rat v = at_depth(d);
    if (d >= 3) {
        Rat lo(1, (unsigned long)((d - 2) * (d - 2)));
        if (v < lo) v = lo;
    }
    if (v > 1) v = 1;
    return v;
}

// ------------------------------------------------------------ sequences ----

Rat LengthSequence::delta_term(uint64_t d) const {
    if (!levels[d].exact || d + 1 > depth())
        throw std::out_of_range("delta term outside the exact window");
    return term_over_pow2(ratio_log2(d), levels[d]);
}

Rat LengthSequence::star_term(uint64_t d) const {
    if (!levels[d].exact || d + 2 > depth())
        throw std::out_of_range("star term outside the exact window");
    return term_over_pow2(levels[d + 2].exponent - levels[d].exponent, levels[d]);
}

static void push_level(LengthSequence& s, Int e, const Budgets& b) {
    Level lvl;
    lvl.exact = e >= 0 && e <= Int(b.exact_bits);
    if (lvl.exact) lvl.value = pow2(e.get_ui());
    lvl.exponent = std::move(e);
    s.levels.push_back(std::move(lvl));
}

LengthSequence generate_dyadic(uint64_t depth, const Budgets& b) {
    LengthSequence s;
    s.gen = Generator::Dyadic;
    s.requested_depth = depth;
    for (uint64_t d = 0; d <= depth; ++d) {
        push_level(s, Int((unsigned long)d), b);
        if (!s.levels.back().exact) {
            s.truncated = true;   // nobody asks for depth > 2^16, but stay honest
            break;
        }
    }
    return s;
}

LengthSequence generate_example1(uint64_t depth, const Budgets& b) {
    LengthSequence s;
    s.gen = Generator::Example1;
    s.requested_depth = depth;
    push_level(s, Int(0ul), b);
    // l_{n-1} = l_n * 2^{floor(l_n/|n|)} for n <= -1; l_{-1} = 2
    for (uint64_t d = 1; d <= depth; ++d) {
        const Level& prev = s.levels.back();
        if (!prev.exact) { s.truncated = true; break; }
        Int step = d == 1 ? Int(1) : rat_floor(Rat(prev.value, (unsigned long)(d - 1)));
        push_level(s, prev.exponent + step, b);
    }
    return s;
}

LengthSequence generate_theorem3(const AlphaSequence& alpha, uint64_t depth, const Budgets& b) {
    if (depth < 4) throw std::invalid_argument("theorem3 sequence needs depth >= 4 (fixed seeds)");
    LengthSequence s;
    s.gen = Generator::Theorem3;
    s.alpha = alpha;
    s.requested_depth = depth;
    for (unsigned long e : {0ul, 1ul, 3ul, 6ul, 11ul}) push_level(s, Int(e), b);
    // l_{n-2} = 2^{floor(alpha~_{n-1} l_n)} for n <= -3, i.e. depth D uses
    // alpha at depth D-1 and the length at depth D-2
    for (uint64_t D = 5; D <= depth; ++D) {
        const Level& src = s.levels[D - 2];
        if (!src.exact) { s.truncated = true; break; }
        if (alpha.tail == AlphaTail::Unspecified && D - 1 >= alpha.values.size()) {
            s.truncated = true;   // alpha horizon exhausted
            break;
        }
        Rat a = alpha.clamped_at_depth(D - 1);
        push_level(s, rat_floor(Rat(src.value) * a), b);
    }
    return s;
}

LengthSequence make_explicit(std::vector<Int> values) {
    if (values.empty()) throw std::invalid_argument("empty length sequence");
    LengthSequence s;
    s.gen = Generator::Explicit;
    s.requested_depth = values.size() - 1;
    s.power_of_two = true;
    for (const auto& v : values) {
        if (v < 1) throw std::invalid_argument("lengths must be positive");
        Level lvl;
        lvl.exact = true;
        lvl.value = v;
        if (mpz_popcount(v.get_mpz_t()) == 1) {
            lvl.exponent = Int((unsigned long)mpz_sizeinbase(v.get_mpz_t(), 2) - 1);
        } else {
            s.power_of_two = false;
            lvl.exponent = -1;
        }
        s.levels.push_back(std::move(lvl));
    }
    s.explicit_values = std::move(values);
    return s;
}

bool check_shape(const LengthSequence& seq, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (seq.levels.empty()) return fail("empty sequence");
    if (seq.gen == Generator::Explicit) {
        const auto& v = seq.explicit_values;
        if (v[0] != 1) return fail("l_0 must equal 1");
        for (size_t d = 0; d + 1 < v.size(); ++d) {
            if (v[d + 1] <= v[d]) return fail("lengths must strictly increase into the past at n=" + nstr(-int64_t(d + 1)));
            if (v[d + 1] % v[d] != 0) return fail("l_{n-1} must be a multiple of l_n at n=" + nstr(-int64_t(d)));
        }
        return true;
    }
    if (seq.levels[0].exponent != 0) return fail("l_0 must equal 1");
    for (size_t d = 0; d + 1 < seq.levels.size(); ++d)
        if (seq.levels[d + 1].exponent <= seq.levels[d].exponent)
            return fail("exponents must strictly increase into the past at n=" + nstr(-int64_t(d + 1)));
    return true;
}

// ------------------------------------------------------ prefix lemmas ------

std::vector<std::string> check_example1_bounds(const LengthSequence& seq) {
    std::vector<std::string> bad;
    if (seq.gen != Generator::Example1) {
        bad.push_back("not an example1 sequence");
        return bad;
    }
    for (uint64_t d = 0; d <= seq.depth(); ++d) {
        // l_n >= 2^{|n|}
        if (seq.levels[d].exponent < Int((unsigned long)d))
            bad.push_back("l_n < 2^|n| at n=" + nstr(-int64_t(d)));
        // r_n >= 2
        if (d + 1 <= seq.depth() && seq.ratio_log2(d) < 1)
            bad.push_back("r_n < 2 at n=" + nstr(-int64_t(d)));
        // log2(r_n)/l_n in [1/(2|n|), 1/|n|] for n <= -1
        if (d >= 1 && d + 1 <= seq.depth() && seq.levels[d].exact) {
            Rat t = term_over_pow2(seq.ratio_log2(d), seq.levels[d]);
            if (t < Rat(1, 2 * (unsigned long)d) || t > Rat(1, (unsigned long)d))
                bad.push_back("delta term outside [1/(2|n|),1/|n|] at n=" + nstr(-int64_t(d)));
        }
    }
    return bad;
}

std::vector<std::string> check_minorations(const LengthSequence& seq) {
    // l_n >= |n|^3 and l_n >= 2|n+1|^2 l_{n+1} for n <= -1
    std::vector<std::string> bad;
    for (uint64_t d = 1; d <= seq.depth(); ++d) {
        Int cube = Int((unsigned long)d);
        cube = cube * cube * cube;
        if (!pow2_ge(seq.levels[d].exponent, cube))
            bad.push_back("l_n < |n|^3 at n=" + nstr(-int64_t(d)));
        if (d >= 2) {   // at n = -1 the bound is 2*0^2*l_0 = 0, trivially true
            Int factor = 2 * Int((unsigned long)(d - 1)) * Int((unsigned long)(d - 1));
            if (!pow2_ge(seq.levels[d].exponent - seq.levels[d - 1].exponent, factor))
                bad.push_back("l_n < 2|n+1|^2 l_{n+1} at n=" + nstr(-int64_t(d)));
        }
    }
    return bad;
}

std::vector<std::string> check_estimates(const LengthSequence& seq) {
    // the three displayed inequalities, for every n <= -4 where both sides
    // are inside the horizon (exact values where the statement needs them)
    std::vector<std::string> bad;
    for (uint64_t d = 4; d <= seq.depth(); ++d) {
        const Level& ln = seq.levels[d];
        if (!ln.exact) continue;
        if (d + 1 <= seq.depth()) {
            // log2 l_{n-1} / l_n <= 1/(2|n+1|^2)
            Int lhs = seq.levels[d + 1].exponent * 2 * Int((unsigned long)((d - 1) * (d - 1)));
            if (lhs > ln.value) bad.push_back("first estimate fails at n=" + nstr(-int64_t(d)));
        }
        if (d + 2 <= seq.depth() && seq.gen == Generator::Theorem3) {
            Rat ratio = Rat(seq.levels[d + 2].exponent, ln.value);
            Rat a = seq.alpha.clamped_at_depth(d + 1);
            if (ratio < a / 2 || ratio > a)
                bad.push_back("second estimate fails at n=" + nstr(-int64_t(d)));
        }
        if (d + 3 <= seq.depth()) {
            // log2 l_{n-3} / l_n >= 1
            if (seq.levels[d + 3].exponent < ln.value)
                bad.push_back("third estimate fails at n=" + nstr(-int64_t(d)));
        }
    }
    return bad;
}

// ------------------------------------------------------------- verdicts ----

namespace {

// exact partial sum of delta terms over the computable window
Rat delta_partial(const LengthSequence& seq, uint64_t& last_d) {
    Rat sum(0);
    last_d = 0;
    for (uint64_t d = 0; d + 1 <= seq.depth(); ++d) {
        if (!seq.levels[d].exact) break;
        sum += seq.delta_term(d);
        last_d = d;
    }
    return sum;
}

} // namespace

SeriesVerdict delta_verdict(const LengthSequence& seq) {
    SeriesVerdict v;
    if (seq.gen == Generator::Explicit) {
        Rat lo(0), hi(0);
        for (uint64_t d = 0; d + 1 <= seq.depth(); ++d) {
            auto [a1, b1] = log2_enclosure(seq.explicit_values[d + 1]);
            auto [a0, b0] = log2_enclosure(seq.explicit_values[d]);
            lo += (a1 - b0) / Rat(seq.explicit_values[d]);
            hi += (b1 - a0) / Rat(seq.explicit_values[d]);
        }
        v.partial_lo = lo;
        v.partial_hi = hi;
        v.exact_sum = (lo == hi);
        v.kind = VerdictKind::Undetermined;
        v.boundary_flags.push_back("no tail certificate for user-supplied lengths");
        return v;
    }
    uint64_t last;
    v.partial_lo = v.partial_hi = delta_partial(seq, last);
    v.exact_sum = true;
    if (seq.depth() == 0) {
        v.boundary_flags.push_back("single-level horizon: no terms");
        return v;   // Undetermined, partial sum 0
    }
    switch (seq.gen) {
        case Generator::Dyadic:
            // terms are 2^{-|n|}; geometric tail
            v.kind = VerdictKind::ConvergesByCertificate;
            v.certificate = "term at n equals 2^{-|n|}; tail is geometric";
            break;
        case Generator::Example1:
            // terms >= 1/(2|n|); harmonic minorant
            v.kind = VerdictKind::DivergesByCertificate;
            v.certificate = "term at n lies in [1/(2|n|), 1/|n|]; harmonic minorant";
            break;
        case Generator::Theorem3:
            // log2 l_{n-1} <= l_{n+1} and l_n >= 2|n+1|^2 l_{n+1} give
            // term <= 1/(2|n+1|^2) for n <= -4, a summable majorant
            v.kind = VerdictKind::ConvergesByCertificate;
            v.certificate = "term at n <= 1/(2|n+1|^2) for n <= -4; summable majorant";
            break;
        default: break;
    }
    return v;
}

SeriesVerdict box_verdict(const LengthSequence& seq) {
    SeriesVerdict v;
    uint64_t last = 0;
    Rat last_term(0);
    for (uint64_t d = 0; d + 1 <= seq.depth(); ++d) {
        if (seq.gen != Generator::Explicit && !seq.levels[d].exact) break;
        if (seq.gen == Generator::Explicit) {
            auto [a1, b1] = log2_enclosure(seq.explicit_values[d + 1]);
            auto [a0, b0] = log2_enclosure(seq.explicit_values[d]);
            last_term = (b1 - a0) / Rat(seq.explicit_values[d]);
        } else {
            last_term = seq.delta_term(d);
        }
        last = d;
    }
    v.partial_lo = v.partial_hi = last_term;   // deepest computed term
    v.exact_sum = seq.gen != Generator::Explicit;
    switch (seq.gen) {
        case Generator::Dyadic:
            v.kind = VerdictKind::ConvergesByCertificate;
            v.certificate = "term at n equals 2^{-|n|} -> 0";
            break;
        case Generator::Example1:
            v.kind = VerdictKind::ConvergesByCertificate;
            v.certificate = "term at n <= 1/|n| -> 0";
            break;
        case Generator::Theorem3:
            v.kind = VerdictKind::ConvergesByCertificate;
            v.certificate = "term at n <= 1/(2|n+1|^2) -> 0 for n <= -4";
            break;
        default:
            v.kind = VerdictKind::Undetermined;
            v.boundary_flags.push_back("no tail certificate for user-supplied lengths");
            break;
    }
    (void)last;
    return v;
}

namespace {

// lower bound for example1 star terms at |n| = m >= 4:
// term >= 2^{floor(2^m/m)}/(m+1) - 2^{-m}. Computed exactly for small m;
// for m > 12, floor(2^m/m) >= m makes the expression exceed 1, so 1 is a
// valid floor there.
Rat example1_star_tail_bound() {
    Rat best(1);
    for (unsigned long m = 4; m <= 12; ++m) {
        Int exp2m = pow2(m) / m;
        Int num = pow2(exp2m.get_ui());
        Rat v = Rat(num, m + 1) - Rat(Int(1), pow2(m));
        v.canonicalize();
        if (v < best) best = v;
    }
    return best;
}

// uniform bound on the correction log2(l_n)/l_n over all n <= n0, where
// depth_n0 = |n0| >= 4: the term is 11/2048 at n = -4 and at most
// 1/(4|n+1|^2|n+2|^2) (decreasing) for n <= -5
Rat theorem3_correction(uint64_t depth_n0) {
    if (depth_n0 == 4) return std::max(Rat(11, 2048), theorem3_correction(5));
    unsigned long a = (unsigned long)(depth_n0 - 1), b = (unsigned long)(depth_n0 - 2);
    Rat c(1, 4 * a * a * b * b);
    c.canonicalize();
    return c;
}

struct TailAlphaProfile {
    // behaviour of clamped alpha at depth parities, as depth -> infinity
    bool even_positive = false, odd_positive = false;   // liminf > 0
    Rat even_bound, odd_bound;                          // eventual lower bound when positive
    bool known = false;
};

TailAlphaProfile alpha_profile(const AlphaSequence& a) {
    TailAlphaProfile p;
    switch (a.tail) {
        case AlphaTail::Constant:
            p.known = true;
            p.even_positive = p.odd_positive = a.const_even > 0;
            p.even_bound = p.odd_bound = a.const_even;
            break;
        case AlphaTail::EvenOdd:
            p.known = true;
            p.even_positive = a.const_even > 0;
            p.odd_positive = a.const_odd > 0;
            p.even_bound = a.const_even;
            p.odd_bound = a.const_odd;
            break;
        case AlphaTail::Summable:
        case AlphaTail::Harmonic:
            // values (after clamping) tend to 0 on both parities
            p.known = true;
            break;
        case AlphaTail::Unspecified:
            break;
    }
    return p;
}

} // namespace

StarReport star_verdict(const LengthSequence& seq) {
    StarReport r;
    bool have = false;
    Rat mn;
    uint64_t last_d = 0;
    for (uint64_t d = 0; d + 2 <= seq.depth(); ++d) {
        if (!seq.levels[d].exact) break;
        if (seq.gen == Generator::Explicit && !seq.power_of_two) break;
        Rat t = seq.star_term(d);
        if (!have || t < mn) mn = t;
        have = true;
        last_d = d;
    }
    r.any_term = have;
    if (have) r.window_min = mn;
    r.boundary_from_n = have ? -(int64_t)(last_d + 1) : 0;
    r.boundary_flags.push_back("terms at n <= " + nstr(r.boundary_from_n) +
                               " lie outside the computable window");
    if (!have) return r;   // empty report, boundary exclusion flagged

    switch (seq.gen) {
        case Generator::Dyadic:
            r.kind = StarKind::FailsByCertificate;
            r.certificate = "term at n equals 2^{1-|n|} -> 0";
            break;
        case Generator::Example1: {
            // tail n <= -4: term >= 2^{floor(l_n/|n|)}/|n-1| - 1/l_n and
            // l_n >= 2^{|n|} give the closed-form bound below
            Rat tail = example1_star_tail_bound();
            if (have && mn > 0) {
                r.kind = StarKind::HoldsByCertificate;
                r.tail_lower_bound = std::min(mn, tail);
                r.certificate = "window terms exact for n >= -3; tail terms >= "
                                "2^{floor(2^{|n|}/|n|)}/(|n|+1) - 2^{-|n|} for n <= -4";
            }
            break;
        }
        case Generator::Theorem3: {
            auto p = alpha_profile(seq.alpha);
            if (!p.known) break;
            if (!p.even_positive || !p.odd_positive) {
                // term at n <= alpha~_{n-1}, which tends to 0 along the
                // parity where alpha vanishes (clamp floor is 1/|n+2|^2)
                r.kind = StarKind::FailsByCertificate;
                r.certificate = "term at n <= clamped alpha_{n-1} -> 0 along one parity";
                break;
            }
            // closed-form tail needs n <= -4, so the window must reach -3
            if (!have || last_d < 3) break;
            Rat corr = theorem3_correction(last_d + 1);
            Rat bound = std::min(p.even_bound, p.odd_bound) / 2 - corr;
            if (bound > 0 && mn > 0) {
                r.kind = StarKind::HoldsByCertificate;
                r.tail_lower_bound = std::min(mn, bound);
                r.certificate = "term at n >= alpha~_{n-1}/2 - log2(l_n)/l_n beyond the "
                                "window, with log2(l_n)/l_n <= 1/(4|n+1|^2|n+2|^2)";
            } else if (bound <= 0) {
                r.boundary_flags.push_back("tail bound not positive at the window edge; "
                                           "alpha too small to certify from this horizon");
            }
            break;
        }
        default:
            r.boundary_flags.push_back("no tail certificate for user-supplied lengths");
            break;
    }
    return r;
}

ThresholdVerdict threshold_verdict(const LengthSequence& seq) {
    SeriesVerdict d = delta_verdict(seq);
    if (d.kind == VerdictKind::DivergesByCertificate)
        return {ThresholdVerdict::Kind::NotAtThreshold, "(delta) diverges: the filtration is standard"};
    StarReport s = star_verdict(seq);
    if (d.kind == VerdictKind::ConvergesByCertificate && s.kind == StarKind::HoldsByCertificate)
        return {ThresholdVerdict::Kind::AtThreshold,
                "(delta) converges and (star) holds with infimum >= " + rat_str(*s.tail_lower_bound)};
    if (d.kind == VerdictKind::ConvergesByCertificate && s.kind == StarKind::FailsByCertificate)
        return {ThresholdVerdict::Kind::NotAtThreshold,
                "(delta) converges (non-standard) but (star) fails"};
    return {ThresholdVerdict::Kind::Undetermined, "no certificate for (delta) or (star)"};
}

// ----------------------------------------------------------- extraction ----

ExtractionSet ExtractionSet::all() { return periodic(1, {0}); }
ExtractionSet ExtractionSet::evens() { return periodic(2, {0}); }
ExtractionSet ExtractionSet::odds() { return periodic(2, {1}); }

ExtractionSet ExtractionSet::periodic(uint32_t period, std::vector<uint32_t> residues) {
    ExtractionSet b;
    b.period = period;
    std::sort(residues.begin(), residues.end());
    residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
    b.residues = std::move(residues);
    std::string why;
    if (!b.valid(&why)) throw std::invalid_argument(why);
    return b;
}

bool ExtractionSet::valid(std::string* why) const {
    auto fail = [&](const char* m) {
        if (why) *why = m;
        return false;
    };
    if (period == 0) return fail("extraction period must be positive");
    if (residues.empty()) return fail("extraction set must be infinite (no tail residues)");
    for (uint32_t r : residues)
        if (r >= period) return fail("tail residue out of range");
    return true;
}

bool ExtractionSet::contains(uint32_t depth) const {
    if (depth < tail_start)
        return std::find(explicit_depths.begin(), explicit_depths.end(), depth) !=
               explicit_depths.end();
    return std::find(residues.begin(), residues.end(), depth % period) != residues.end();
}

std::vector<uint32_t> ExtractionSet::members(uint32_t max_depth) const {
    std::vector<uint32_t> out;
    for (uint32_t d = 0; d <= max_depth; ++d)
        if (contains(d)) out.push_back(d);
    return out;
}

uint32_t ExtractionSet::gap_after(uint32_t member_depth) const {
    for (uint32_t d = member_depth + 1;; ++d)
        if (contains(d)) return d - member_depth;
}

bool ExtractionSet::complement_has_two_consecutive(uint32_t probe_depth) const {
    for (uint32_t d = 0; d + 1 <= probe_depth; ++d)
        if (!contains(d) && !contains(d + 1)) return true;
    // periodic beyond the probe: two periods decide
    return false;
}

uint32_t ExtractionSet::max_gap(uint32_t probe_depth) const {
    uint32_t g = 0;
    auto ms = members(probe_depth + period * 2);
    for (size_t i = 0; i + 1 < ms.size(); ++i) g = std::max(g, ms[i + 1] - ms[i]);
    return g;
}

namespace {

// gap pairs (to m(n), then to m(m(n))) realized infinitely often in the tail
std::vector<std::pair<uint32_t, uint32_t>> tail_gap_pairs(const ExtractionSet& b) {
    uint32_t from = std::max(b.tail_start, b.period);
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (uint32_t d = from; d < from + b.period; ++d) {
        if (!b.contains(d)) continue;
        uint32_t g1 = b.gap_after(d);
        uint32_t g2 = b.gap_after(d + g1);
        out.emplace_back(g1, g2);
    }
    return out;
}

// parities of depth(n)-... for tail members with gap exactly 2, i.e. the
// parities of the skipped depth d+1 (alpha index n-1 has depth d+1)
std::vector<uint32_t> tail_b2_skip_parities(const ExtractionSet& b) {
    uint32_t from = std::max(b.tail_start, b.period);
    uint32_t span = b.period % 2 == 0 ? b.period : 2 * b.period;
    std::vector<uint32_t> out;
    for (uint32_t d = from; d < from + span; ++d)
        if (b.contains(d) && b.gap_after(d) == 2) out.push_back((d + 1) % 2);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

ExtractionAnalysis extraction_analysis(const LengthSequence& seq, const ExtractionSet& b) {
    std::string why;
    if (!b.valid(&why)) throw std::invalid_argument(why);
    ExtractionAnalysis a;

    auto ms = b.members((uint32_t)seq.depth());
    bool id1 = true, id2 = true;
    Rat partial(0);
    bool partial_exact_all = true;
    for (size_t i = 0; i + 1 < ms.size(); ++i) {
        ExtractionAnalysis::Entry e;
        uint32_t dn = ms[i], dm = ms[i + 1];
        e.n = -(int64_t)dn;
        e.m = -(int64_t)dm;
        e.big_ratio_log2 = seq.levels[dm].exponent - seq.levels[dn].exponent;
        uint32_t gap = dm - dn;
        e.cls = gap == 1 ? 1 : gap == 2 ? 2 : 3;
        if (e.cls == 1 && e.big_ratio_log2 != seq.ratio_log2(dn)) id1 = false;
        if (e.cls == 2 &&
            e.big_ratio_log2 != seq.ratio_log2(dn) + seq.ratio_log2(dn + 1)) id2 = false;
        if (seq.levels[dn].exact)
            partial += term_over_pow2(e.big_ratio_log2, seq.levels[dn]);
        else
            partial_exact_all = false;
        a.entries.push_back(std::move(e));
    }
    a.r_identity_b1 = id1;
    a.r_identity_b2 = id2;
    a.b2_identity_applies = !b.complement_has_two_consecutive((uint32_t)seq.depth() + 2 * b.period);

    // ---- extracted (delta) ----
    SeriesVerdict& dv = a.extracted_delta;
    dv.partial_lo = dv.partial_hi = partial;
    dv.exact_sum = partial_exact_all;
    auto pairs = tail_gap_pairs(b);
    uint32_t gmax = 0;
    bool has_b3 = false, has_b2 = false;
    for (auto [g1, g2] : pairs) {
        gmax = std::max(gmax, g1);
        if (g1 >= 3) has_b3 = true;
        if (g1 == 2) has_b2 = true;
    }
    switch (seq.gen) {
        case Generator::Dyadic:
            dv.kind = VerdictKind::ConvergesByCertificate;
            dv.certificate = "extracted term at n <= " + std::to_string(gmax) +
                             " * 2^{-|n|}; geometric majorant";
            break;
        case Generator::Example1:
            dv.kind = VerdictKind::DivergesByCertificate;
            dv.certificate = "extracted term at n >= log2(r_n)/l_n >= 1/(2|n|); "
                             "harmonic minorant over a positive-density set";
            break;
        case Generator::Theorem3: {
            if (has_b3) {
                dv.kind = VerdictKind::DivergesByCertificate;
                dv.certificate = "infinitely many n in B with m(n) <= n-3: terms >= "
                                 "1 - log2(l_n)/l_n, bounded away from 0";
                break;
            }
            // all tail gaps in {1,2}: the B1 part converges like the full
            // (delta); the B2 part behaves like sum of alpha~_{n-1}
            auto p = alpha_profile(seq.alpha);
            if (!p.known) { dv.kind = VerdictKind::Undetermined; break; }
            if (!has_b2) {
                dv.kind = VerdictKind::ConvergesByCertificate;
                dv.certificate = "tail of B has only unit gaps; extracted series tails the "
                                 "full (delta), which converges";
                break;
            }
            if (seq.alpha.tail == AlphaTail::Summable) {
                dv.kind = VerdictKind::ConvergesByCertificate;
                dv.certificate = "B2 part majorized by sum of clamped alpha (summable); "
                                 "B1 part converges";
                break;
            }
            if (seq.alpha.tail == AlphaTail::Harmonic) {
                dv.kind = VerdictKind::DivergesByCertificate;
                dv.certificate = "B2 part minorized by harmonic terms over a "
                                 "positive-density set";
                break;
            }
            // Constant / EvenOdd: diverges iff some realized skip parity
            // carries a positive constant
            auto parities = tail_b2_skip_parities(b);
            bool pos = false;
            for (uint32_t par : parities)
                if ((par == 0 && p.even_positive) || (par == 1 && p.odd_positive)) pos = true;
            if (pos) {
                dv.kind = VerdictKind::DivergesByCertificate;
                dv.certificate = "B2 part >= (alpha~_{n-1}/2 - corr) over a positive-density "
                                 "set with alpha bounded below";
            } else {
                dv.kind = VerdictKind::ConvergesByCertificate;
                dv.certificate = "every realized B2 skip lands on a vanishing alpha parity "
                                 "(clamp floor 1/|n+2|^2 is summable); B1 part converges";
            }
            break;
        }
        default:
            dv.kind = VerdictKind::Undetermined;
            dv.boundary_flags.push_back("no tail certificate for user-supplied lengths");
            break;
    }

    // ---- extracted (star) and threshold ----
    StarReport& sv = a.extracted_star;
    {
        bool have = false;
        Rat mn;
        uint32_t deepest_dn = 0;
        for (size_t i = 0; i + 2 < ms.size(); ++i) {
            uint32_t dn = ms[i], dmm = ms[i + 2];
            if (!seq.levels[dn].exact) break;
            Rat t = term_over_pow2(seq.levels[dmm].exponent - seq.levels[dn].exponent,
                                   seq.levels[dn]);
            if (!have || t < mn) mn = t;
            have = true;
            deepest_dn = dn;
            sv.boundary_from_n = -(int64_t)ms[i + 1];
        }
        sv.any_term = have;
        if (have) sv.window_min = mn;
        switch (seq.gen) {
            case Generator::Dyadic:
                sv.kind = StarKind::FailsByCertificate;
                sv.certificate = "extracted star term at n <= " + std::to_string(2 * gmax) +
                                 " * 2^{-|n|} -> 0";
                break;
            case Generator::Example1:
                if (have && mn > 0) {
                    sv.kind = StarKind::HoldsByCertificate;
                    sv.tail_lower_bound = std::min(mn, example1_star_tail_bound());
                    sv.certificate = "m(m(n)) <= n-2, so extracted star terms dominate the "
                                     "full star terms";
                }
                break;
            case Generator::Theorem3: {
                auto p = alpha_profile(seq.alpha);
                if (!p.known) break;
                bool comp2 = false;   // some tail member has m(m(n)) = n-2
                for (auto [g1, g2] : pairs)
                    if (g1 == 1 && g2 == 1) comp2 = true;
                // closed-form tail needs n <= -4: window must cover -3
                bool covered = have && deepest_dn >= 3;
                Rat corr = theorem3_correction(covered ? deepest_dn + 1 : 4);
                if (!comp2) {
                    // composite gaps >= 3: log2 l_{m(m(n))} >= l_n
                    if (covered && mn > 0) {
                        sv.kind = StarKind::HoldsByCertificate;
                        Rat one_minus = Rat(1) - corr;
                        sv.tail_lower_bound = std::min(mn, one_minus);
                        sv.certificate = "m(m(n)) <= n-3 in the tail: terms >= "
                                         "1 - log2(l_n)/l_n";
                    }
                    break;
                }
                // runs of three consecutive members: those terms track
                // alpha~_{n-1}; find the skipped-middle parities
                uint32_t from = std::max(b.tail_start, b.period);
                uint32_t span = b.period % 2 == 0 ? b.period : 2 * b.period;
                bool all_pos = true, any_vanish = false;
                Rat amin;
                bool amin_set = false;
                for (uint32_t d = from; d < from + span; ++d) {
                    if (!(b.contains(d) && b.contains(d + 1) && b.contains(d + 2))) continue;
                    uint32_t par = (d + 1) % 2;
                    bool positive = par == 0 ? p.even_positive : p.odd_positive;
                    Rat bd = par == 0 ? p.even_bound : p.odd_bound;
                    if (!positive) { any_vanish = true; all_pos = false; }
                    else if (!amin_set || bd < amin) { amin = bd; amin_set = true; }
                }
                if (any_vanish) {
                    sv.kind = StarKind::FailsByCertificate;
                    sv.certificate = "triple runs in B select a vanishing alpha parity; "
                                     "those terms <= clamped alpha_{n-1} -> 0";
                    break;
                }
                if (all_pos) {
                    Rat from_alpha = amin / 2 - corr;
                    Rat one_minus = Rat(1) - corr;
                    Rat bound = amin_set ? std::min(from_alpha, one_minus) : one_minus;
                    if (covered && bound > 0 && mn > 0) {
                        sv.kind = StarKind::HoldsByCertificate;
                        sv.tail_lower_bound = std::min(mn, bound);
                        sv.certificate = "tail terms >= min(alpha~/2, 1) - log2(l_n)/l_n "
                                         "with positive alpha on every selected parity";
                    }
                }
                break;
            }
            default:
                sv.boundary_flags.push_back("no tail certificate for user-supplied lengths");
                break;
        }
    }

    ThresholdVerdict& tv = a.extracted_threshold;
    if (dv.kind == VerdictKind::DivergesByCertificate)
        tv = {ThresholdVerdict::Kind::NotAtThreshold,
              "extracted (delta) diverges: the extracted filtration is standard"};
    else if (dv.kind == VerdictKind::ConvergesByCertificate &&
             sv.kind == StarKind::HoldsByCertificate)
        tv = {ThresholdVerdict::Kind::AtThreshold,
              "extracted (delta) converges and extracted (star) holds"};
    else if (dv.kind == VerdictKind::ConvergesByCertificate &&
             sv.kind == StarKind::FailsByCertificate)
        tv = {ThresholdVerdict::Kind::NotAtThreshold,
              "extracted (delta) converges (non-standard) but extracted (star) fails"};
    else
        tv = {ThresholdVerdict::Kind::Undetermined, "no certificate"};
    return a;
}

// -------------------------------------------------------------- slowing ----

SlowingMap SlowingMap::identity(uint32_t horizon) {
    SlowingMap m;
    for (uint32_t j = 0; j <= horizon; ++j) m.phi_depth.push_back(j);
    return m;
}

SlowingMap SlowingMap::repeated_interlinking(uint32_t horizon) {
    // phi(0) = 0, phi(-1) = -1 and, for k <= -1, phi(2k) = -2^{|k|},
    // phi(2k-1) = -2^{|k|} - 1; in depths: 0, 1, 2, 3, 4, 5, 8, 9, 16, 17, ...
    SlowingMap m;
    m.phi_depth.push_back(0);
    if (horizon >= 1) m.phi_depth.push_back(1);
    for (uint32_t j = 2; j <= horizon; ++j) {
        uint64_t base = uint64_t(1) << (j / 2);   // |k| = j/2 for even j = 2|k|
        m.phi_depth.push_back(j % 2 == 0 ? base : base + 1);
    }
    return m;
}

bool SlowingMap::valid(std::string* why) const {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (phi_depth.empty() || phi_depth[0] != 0) return fail("slowing map must fix 0");
    for (size_t j = 0; j + 1 < phi_depth.size(); ++j)
        if (phi_depth[j + 1] <= phi_depth[j]) return fail("slowing map must strictly increase");
    return true;
}

std::vector<uint64_t> slow_induced(const SlowingMap& phi, const std::vector<uint64_t>& query_depths) {
    std::string why;
    if (!phi.valid(&why)) throw std::invalid_argument(why);
    // G_n = F_k for phi(k-1)+1 <= n <= phi(k): in depths, the slowed
    // sigma-field at depth d equals the original one at the largest j with
    // phi_depth[j] <= d
    std::vector<uint64_t> out;
    for (uint64_t d : query_depths) {
        if (d > phi.phi_depth.back())
            throw std::out_of_range("query depth beyond the slowing horizon");
        auto it = std::upper_bound(phi.phi_depth.begin(), phi.phi_depth.end(), d);
        out.push_back(uint64_t(it - phi.phi_depth.begin()) - 1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace ftk::len
