#pragma once
// Length sequences of split-words processes, the standardness predicates
// (delta), (star), (box), extraction-set bookkeeping and the time-slowing
// construction.
//
// Index convention: arrays are indexed by depth d = -n >= 0; every report
// speaks in the non-positive indices n = -d. All generated lengths are
// powers of two, so l_n is stored as its exponent e_n (an exact big
// integer); the value itself is materialized only while it fits the
// configured bit budget. Series live in log2 units; terms are exact
// rationals with power-of-two denominators.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftk/rational.hpp"

namespace ftk::len {

enum class Generator { Dyadic, Example1, Theorem3, Explicit };

enum class AlphaTail {
    Unspecified,   // only horizon values known; tail-dependent verdicts stay open
    Constant,      // alpha_n = c for all n
    EvenOdd,       // alpha_n = c_even for even n, c_odd for odd n
    Summable,      // alpha_n = 2^{-|n|}
    Harmonic,      // alpha_n = 1/|n|  (alpha_0 = 1)
};

struct AlphaSequence {
    AlphaTail tail = AlphaTail::Unspecified;
    Rat const_even;             // Constant uses this slot for all n
    Rat const_odd;
    std::vector<Rat> values;    // explicit values by depth (overrides presets if set)

    static AlphaSequence constant(const Rat& c);
    static AlphaSequence even_odd(const Rat& even_value, const Rat& odd_value);
    static AlphaSequence summable();
    static AlphaSequence harmonic();
    static AlphaSequence explicit_values(std::vector<Rat> by_depth);

    Rat at_depth(uint64_t d) const;       // alpha_{-d}
    Rat clamped_at_depth(uint64_t d) const;  // min(max(alpha, 1/|n+2|^2), 1) for n <= -3
};

struct Level {
    Int exponent;        // e_n, always exact
    bool exact = false;  // true when l_n = 2^{e_n} is materialized below
    Int value;           // l_n when exact
};

struct Budgets {
    unsigned long exact_bits = 65536;   // materialize l_n while e_n <= exact_bits
};

struct LengthSequence {
    Generator gen = Generator::Explicit;
    std::vector<Level> levels;          // depth 0..depth()
    bool truncated = false;             // horizon cut short by the budgets
    uint64_t requested_depth = 0;
    AlphaSequence alpha;                // Theorem3 only
    std::vector<Int> explicit_values;   // Explicit only (not power-of-two in general)
    bool power_of_two = true;

    uint64_t depth() const { return levels.empty() ? 0 : levels.size() - 1; }
    const Int& exponent(uint64_t d) const { return levels[d].exponent; }
    // log2(r_n) for n = -d, defined for d+1 <= depth()
    Int ratio_log2(uint64_t d) const { return levels[d + 1].exponent - levels[d].exponent; }
    // log2(r_n)/l_n, requires level d exact
    Rat delta_term(uint64_t d) const;
    // log2(r_n r_{n-1})/l_n, requires level d exact and d+2 <= depth()
    Rat star_term(uint64_t d) const;
};

LengthSequence generate_dyadic(uint64_t depth, const Budgets& b = {});
LengthSequence generate_example1(uint64_t depth, const Budgets& b = {});
LengthSequence generate_theorem3(const AlphaSequence& alpha, uint64_t depth, const Budgets& b = {});
LengthSequence make_explicit(std::vector<Int> values);   // values[d] = l_{-d}

// Divisibility and monotonicity contract shared by every sequence.
bool check_shape(const LengthSequence& seq, std::string* why = nullptr);

// Paper-derived prefix inequalities (exact; empty result means all hold).
std::vector<std::string> check_example1_bounds(const LengthSequence& seq);
std::vector<std::string> check_minorations(const LengthSequence& seq);
std::vector<std::string> check_estimates(const LengthSequence& seq);

enum class VerdictKind { DivergesByCertificate, ConvergesByCertificate, Undetermined };

struct SeriesVerdict {
    VerdictKind kind = VerdictKind::Undetermined;
    Rat partial_lo, partial_hi;   // exact when equal; enclosure for Explicit input
    bool exact_sum = false;
    std::string certificate;      // closed-form justification; empty when none
    std::vector<std::string> boundary_flags;
};

enum class StarKind { HoldsByCertificate, FailsByCertificate, Undetermined };

struct StarReport {
    StarKind kind = StarKind::Undetermined;
    bool any_term = false;
    Rat window_min;               // min over computable window terms
    std::optional<Rat> tail_lower_bound;   // certified bound for the tail, when positive
    std::string certificate;
    int64_t boundary_from_n = 0;  // terms at n <= this were excluded
    std::vector<std::string> boundary_flags;
};

// condition (delta): sum log2(r_n)/l_n
SeriesVerdict delta_verdict(const LengthSequence& seq);
// condition (box): log2(r_n)/l_n -> 0
SeriesVerdict box_verdict(const LengthSequence& seq);
// condition (star): inf log2(r_n r_{n-1})/l_n > 0
StarReport star_verdict(const LengthSequence& seq);

struct ThresholdVerdict {
    enum class Kind { AtThreshold, NotAtThreshold, Undetermined } kind;
    std::string reason;
};
ThresholdVerdict threshold_verdict(const LengthSequence& seq);

// Ultimately periodic subset B of the non-positive integers, in depths.
struct ExtractionSet {
    std::vector<uint32_t> explicit_depths;   // members with depth < tail_start
    uint32_t tail_start = 0;
    uint32_t period = 1;
    std::vector<uint32_t> residues;          // d in tail iff d % period in residues

    static ExtractionSet all();
    static ExtractionSet evens();             // n even <=> depth even
    static ExtractionSet odds();
    static ExtractionSet periodic(uint32_t period, std::vector<uint32_t> residues);

    bool valid(std::string* why = nullptr) const;   // residues non-empty (B infinite)
    bool contains(uint32_t depth) const;
    std::vector<uint32_t> members(uint32_t max_depth) const;
    // depth gap from a member depth to the next deeper member (m(n))
    uint32_t gap_after(uint32_t member_depth) const;
    bool complement_has_two_consecutive(uint32_t probe_depth = 512) const;
    uint32_t max_gap(uint32_t probe_depth = 512) const;
};

struct ExtractionAnalysis {
    // per window member (shallow to deep, excluding the deepest member,
    // which has no m(n) inside the window)
    struct Entry {
        int64_t n;            // member index
        int64_t m;            // m(n)
        Int big_ratio_log2;   // log2 R_n = e_{m(n)} - e_n
        int cls;              // 1, 2 or 3 per the gap
    };
    std::vector<Entry> entries;
    bool r_identity_b1 = false;     // R_n = r_n on B1
    bool r_identity_b2 = false;     // R_n = r_n r_{n-1} on B2 (when it applies)
    bool b2_identity_applies = false;
    SeriesVerdict extracted_delta;
    StarReport extracted_star;      // for threshold-of-extraction questions
    ThresholdVerdict extracted_threshold;
};

ExtractionAnalysis extraction_analysis(const LengthSequence& seq, const ExtractionSet& b);

// Increasing map phi on the non-positive integers with phi(0) = 0,
// tabulated as depths: phi_depth[j] = -phi(-j).
struct SlowingMap {
    std::vector<uint64_t> phi_depth;

    static SlowingMap identity(uint32_t horizon);
    static SlowingMap repeated_interlinking(uint32_t horizon);

    bool valid(std::string* why = nullptr) const;
};

// For a query set of depths on the slowed axis, the induced depths on the
// original axis (G_n = F_k for phi(k-1)+1 <= n <= phi(k)).
std::vector<uint64_t> slow_induced(const SlowingMap& phi, const std::vector<uint64_t>& query_depths);

} // namespace ftk::len
