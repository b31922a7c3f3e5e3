#pragma once
// Split-words processes over a finite alphabet with the uniform measure:
// exact sampling, exact marginal enumeration, and path extraction.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftk/dist.hpp"
#include "ftk/lengths.hpp"
#include "ftk/rng.hpp"

namespace ftk::sw {

struct ExplicitBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SplitWordsSpec {
    uint32_t alphabet = 2;              // |A| >= 2
    std::vector<uint64_t> lengths;      // lengths[d] = l_{-d}; lengths[0] = 1

    static SplitWordsSpec from_lengths(uint32_t alphabet, std::vector<uint64_t> lengths);
    // take the exact window of a generated sequence, down to `horizon`
    static SplitWordsSpec from_sequence(uint32_t alphabet, const len::LengthSequence& seq,
                                        uint64_t horizon);

    uint64_t depth() const { return lengths.size() - 1; }
    // r_{-d} = l[d+1] / l[d], defined for d < depth()
    uint64_t ratio(uint64_t d) const { return lengths[d + 1] / lengths[d]; }
};

struct SplitWordsPath {
    // words[d] = X_{-d} (letters in 0..|A|-1, length l[d]);
    // u[d] = U_{-d} in {1..r_{-d}}, defined for d < depth()
    std::vector<std::vector<uint32_t>> words;
    std::vector<uint64_t> u;

    uint64_t depth() const { return words.size() - 1; }
    bool consistent(std::string* why = nullptr) const;   // the splitting invariant
};

SplitWordsPath sample_path(const SplitWordsSpec& spec, Rng& rng);

// base-|A| code of a word, most significant letter first
uint64_t word_code(uint32_t alphabet, const std::vector<uint32_t>& w);
std::vector<uint32_t> word_decode(uint32_t alphabet, uint64_t code, uint64_t length);

struct MarginalReport {
    struct Level {
        int64_t n;
        Dist word_marginal;          // states are word codes
        Dist joint;                  // word_code * r + (u - 1); empty at the deepest level
        uint64_t ratio = 1;
        bool word_uniform = false;
        bool joint_uniform = false;  // (X_n, U_n) uniform on A^{l_n} x {1..r_n}
    };
    std::vector<Level> levels;       // by depth
    bool entrance_law_ok = false;
    bool innovations_independent = false;   // U_n independent of X_{n-1}, exactly
    uint64_t outcomes = 0;
};

MarginalReport exact_marginals(const SplitWordsSpec& spec, uint64_t budget = uint64_t(1) << 24);

// Re-index a path along B: words at member depths, innovations composed in
// mixed radix (most significant digit = earliest skipped level).
SplitWordsPath extract_path(const SplitWordsPath& path, const len::ExtractionSet& b);

} // namespace ftk::sw
