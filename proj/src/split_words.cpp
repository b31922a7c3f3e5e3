#include "ftk/split_words.hpp"

#include <algorithm>
#include <map>

namespace ftk::sw {

SplitWordsSpec SplitWordsSpec::from_lengths(uint32_t alphabet, std::vector<uint64_t> lengths) {
    if (alphabet < 2) throw std::invalid_argument("alphabet needs at least two letters");
    if (lengths.empty() || lengths[0] != 1) throw std::invalid_argument("l_0 must equal 1");
    for (size_t d = 0; d + 1 < lengths.size(); ++d) {
        if (lengths[d + 1] < lengths[d] || lengths[d + 1] % lengths[d] != 0)
            throw std::invalid_argument("lengths must grow by integer factors (r >= 1)");
    }
    SplitWordsSpec s;
    s.alphabet = alphabet;
    s.lengths = std::move(lengths);
    return s;
}

SplitWordsSpec SplitWordsSpec::from_sequence(uint32_t alphabet, const len::LengthSequence& seq,
                                             uint64_t horizon) {
    if (horizon > seq.depth()) throw std::out_of_range("horizon beyond the sequence window");
    std::vector<uint64_t> ls;
    for (uint64_t d = 0; d <= horizon; ++d) {
        const auto& lvl = seq.levels[d];
        if (!lvl.exact || !lvl.value.fits_ulong_p())
            throw std::out_of_range("length at depth " + std::to_string(d) +
                                    " is not materialized");
        ls.push_back(lvl.value.get_ui());
    }
    return from_lengths(alphabet, std::move(ls));
}

bool SplitWordsPath::consistent(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (words.empty()) return fail("empty path");
    if (u.size() + 1 != words.size()) return fail("innovation count mismatch");
    for (uint64_t d = 0; d + 1 <= depth(); ++d) {
        uint64_t ln = words[d].size(), lp = words[d + 1].size();
        if (lp % ln != 0 || lp <= 0) return fail("length mismatch at depth " + std::to_string(d));
        uint64_t r = lp / ln;
        if (u[d] < 1 || u[d] > r) return fail("innovation out of range at depth " + std::to_string(d));
        uint64_t off = (u[d] - 1) * ln;
        for (uint64_t i = 0; i < ln; ++i)
            if (words[d][i] != words[d + 1][off + i])
                return fail("word is not the chosen block at depth " + std::to_string(d));
    }
    return true;
}

SplitWordsPath sample_path(const SplitWordsSpec& spec, Rng& rng) {
    SplitWordsPath p;
    uint64_t N = spec.depth();
    p.words.resize(N + 1);
    p.u.resize(N);
    auto& deep = p.words[N];
    deep.resize(spec.lengths[N]);
    for (auto& c : deep) c = uint32_t(rng.below(spec.alphabet));
    for (uint64_t d = N; d-- > 0;) {
        uint64_t r = spec.ratio(d);
        p.u[d] = 1 + rng.below(r);
        uint64_t off = (p.u[d] - 1) * spec.lengths[d];
        p.words[d].assign(p.words[d + 1].begin() + off,
                          p.words[d + 1].begin() + off + spec.lengths[d]);
    }
    return p;
}

uint64_t word_code(uint32_t alphabet, const std::vector<uint32_t>& w) {
    uint64_t c = 0;
    for (uint32_t letter : w) c = c * alphabet + letter;
    return c;
}

std::vector<uint32_t> word_decode(uint32_t alphabet, uint64_t code, uint64_t length) {
    std::vector<uint32_t> w(length);
    for (uint64_t i = length; i-- > 0;) {
        w[i] = uint32_t(code % alphabet);
        code /= alphabet;
    }
    return w;
}

MarginalReport exact_marginals(const SplitWordsSpec& spec, uint64_t budget) {
    uint64_t N = spec.depth();
    // total outcomes = |A|^{l_N} * prod r_d; overflow-checked against budget
    uint64_t total = 1;
    auto mul_checked = [&](uint64_t f) {
        if (f != 0 && total > budget / f)
            throw ExplicitBudgetError("exact enumeration budget exceeded");
        total *= f;
    };
    for (uint64_t i = 0; i < spec.lengths[N]; ++i) mul_checked(spec.alphabet);
    for (uint64_t d = 0; d < N; ++d) mul_checked(spec.ratio(d));

    MarginalReport rep;
    rep.outcomes = total;
    std::vector<std::vector<std::pair<uint64_t, Rat>>> word_atoms(N + 1), joint_atoms(N + 1);
    // joint counts of (X_{n-1}, U_n) for the independence check, per d < N
    std::vector<std::map<std::pair<uint64_t, uint64_t>, uint64_t>> pair_counts(N);
    std::vector<std::map<uint64_t, uint64_t>> word_counts(N + 1), joint_counts(N + 1);

    uint64_t words_total = 1;
    for (uint64_t i = 0; i < spec.lengths[N]; ++i) words_total *= spec.alphabet;

    std::vector<uint64_t> radices(N);
    for (uint64_t d = 0; d < N; ++d) radices[d] = spec.ratio(d);

    for (uint64_t wc = 0; wc < words_total; ++wc) {
        SplitWordsPath p;
        p.words.resize(N + 1);
        p.u.assign(N, 1);
        p.words[N] = word_decode(spec.alphabet, wc, spec.lengths[N]);
        uint64_t combos = total / words_total;
        for (uint64_t id = 0; id < combos; ++id) {
            uint64_t rest = id;
            for (uint64_t d = 0; d < N; ++d) {
                p.u[d] = 1 + rest % radices[d];
                rest /= radices[d];
            }
            for (uint64_t d = N; d-- > 0;) {
                uint64_t off = (p.u[d] - 1) * spec.lengths[d];
                p.words[d].assign(p.words[d + 1].begin() + off,
                                  p.words[d + 1].begin() + off + spec.lengths[d]);
            }
            for (uint64_t d = 0; d <= N; ++d) {
                uint64_t code = word_code(spec.alphabet, p.words[d]);
                ++word_counts[d][code];
                if (d < N) {
                    ++joint_counts[d][code * radices[d] + (p.u[d] - 1)];
                    ++pair_counts[d][{word_code(spec.alphabet, p.words[d + 1]), p.u[d]}];
                }
            }
        }
    }

    rep.entrance_law_ok = true;
    rep.innovations_independent = true;
    for (uint64_t d = 0; d <= N; ++d) {
        MarginalReport::Level lvl;
        lvl.n = -(int64_t)d;
        lvl.ratio = d < N ? radices[d] : 1;
        auto frac = [&](uint64_t c) {
            Rat r((unsigned long)c, (unsigned long)total);
            r.canonicalize();
            return r;
        };
        std::vector<std::pair<uint64_t, Rat>> wa, ja;
        for (auto [s, c] : word_counts[d]) wa.emplace_back(s, frac(c));
        for (auto [s, c] : joint_counts[d]) ja.emplace_back(s, frac(c));
        lvl.word_marginal = Dist(std::move(wa));
        lvl.joint = Dist(std::move(ja));

        uint64_t states = 1;
        for (uint64_t i = 0; i < spec.lengths[d]; ++i) states *= spec.alphabet;
        Rat uni(1, (unsigned long)states);
        lvl.word_uniform = lvl.word_marginal.atoms().size() == states;
        for (const auto& [s, w] : lvl.word_marginal.atoms())
            if (w != uni) lvl.word_uniform = false;
        if (d < N) {
            Rat juni(1, (unsigned long)(states * radices[d]));
            lvl.joint_uniform = lvl.joint.atoms().size() == states * radices[d];
            for (const auto& [s, w] : lvl.joint.atoms())
                if (w != juni) lvl.joint_uniform = false;
        } else {
            lvl.joint_uniform = lvl.word_uniform;
        }
        if (!lvl.word_uniform || !lvl.joint_uniform) rep.entrance_law_ok = false;

        if (d < N) {
            // exact factorization: P(X_{n-1} = w, U_n = u) = P(X_{n-1} = w) / r_n
            for (auto [key, c] : pair_counts[d]) {
                uint64_t wcount = word_counts[d + 1].at(key.first);
                if (c * radices[d] != wcount) rep.innovations_independent = false;
            }
            // and every (word, u) pair must actually appear
            if (pair_counts[d].size() != word_counts[d + 1].size() * radices[d])
                rep.innovations_independent = false;
        }
        rep.levels.push_back(std::move(lvl));
    }
    return rep;
}

SplitWordsPath extract_path(const SplitWordsPath& path, const len::ExtractionSet& b) {
    std::string why;
    if (!b.valid(&why)) throw std::invalid_argument(why);
    auto ms = b.members((uint32_t)path.depth());
    if (ms.empty()) throw std::invalid_argument("extraction set misses the whole window");
    SplitWordsPath out;
    for (uint32_t d : ms) out.words.push_back(path.words[d]);
    for (size_t i = 0; i + 1 < ms.size(); ++i) {
        uint64_t dn = ms[i], dm = ms[i + 1];
        uint64_t ln = path.words[dn].size();
        // offset of X_n inside X_{m(n)}: sum over skipped steps, earliest
        // level carrying the largest weight
        uint64_t off = 0;
        for (uint64_t j = dn; j < dm; ++j) off += (path.u[j] - 1) * path.words[j].size();
        out.u.push_back(off / ln + 1);
    }
    return out;
}

} // namespace ftk::sw
