#include "ftk/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>

namespace ftk::cpl {

namespace {

Rat frac(uint64_t num, uint64_t den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

uint64_t index_of(const std::vector<uint64_t>& sorted, uint64_t v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it == sorted.end() || *it != v) throw std::logic_error("state not in level set");
    return uint64_t(it - sorted.begin());
}

} // namespace

bool FiniteProcessLaw::validate(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (states.empty()) return fail("empty window");
    if (kernels.size() != depth()) return fail("kernel count mismatch");
    if (!initial.is_probability()) return fail("initial law is not a probability");
    for (const auto& [s, w] : initial.atoms())
        if (!std::binary_search(states.back().begin(), states.back().end(), s))
            return fail("initial support outside the deepest level");
    for (uint32_t d = 0; d < depth(); ++d) {
        for (uint64_t s : states[d + 1]) {
            auto it = kernels[d].find(s);
            if (it == kernels[d].end())
                return fail("missing kernel row at depth " + std::to_string(d));
            if (!it->second.is_probability())
                return fail("kernel row is not a probability at depth " + std::to_string(d));
            for (const auto& [t, w] : it->second.atoms())
                if (!std::binary_search(states[d].begin(), states[d].end(), t))
                    return fail("kernel support outside the level at depth " +
                                std::to_string(d));
        }
    }
    return true;
}

FiniteProcessLaw chain_law(const brick::GluedChain& chain, uint64_t state_budget) {
    uint32_t M = chain.depth();
    for (uint32_t d = 0; d <= M; ++d)
        if (chain.level_size(d) > state_budget)
            throw sw::ExplicitBudgetError("level " + std::to_string(d) +
                                          " exceeds the explicit-law budget");
    FiniteProcessLaw law;
    law.states.resize(M + 1);
    for (uint32_t d = 0; d <= M; ++d) {
        law.states[d].resize(chain.level_size(d));
        for (uint64_t s = 0; s < law.states[d].size(); ++s) law.states[d][s] = s;
    }
    law.initial = Dist::uniform(law.states[M]);
    law.kernels.resize(M);
    for (uint32_t d = 0; d < M; ++d) {
        const auto& b = chain.bricks[d / 2];
        for (uint64_t s : law.states[d + 1]) {
            if (d % 2 == 1) {
                // even state s at depth d+1 -> odd level: append a uniform J
                std::vector<uint64_t> sup(b.r1);
                for (uint64_t j = 0; j < b.r1; ++j) sup[j] = s * b.r1 + j;
                law.kernels[d].emplace(s, Dist::uniform(sup));
            } else {
                law.kernels[d].emplace(s, Dist::uniform(b.S(s)));
            }
        }
    }
    return law;
}

Dist strategy_joint_kernel(const FiniteProcessLaw& law, StrategyKind kind, uint32_t d,
                           uint64_t ia, uint64_t ib) {
    const auto& prev = law.states[d + 1];
    const auto& cur = law.states[d];
    uint64_t n = cur.size();
    const Dist& Pa = law.kernels[d].at(prev[ia]);
    const Dist& Pb = law.kernels[d].at(prev[ib]);
    auto code = [&](uint64_t sa, uint64_t sb) {
        return index_of(cur, sa) * n + index_of(cur, sb);
    };
    std::vector<std::pair<uint64_t, Rat>> atoms;
    if (kind == StrategyKind::IndependentProduct) {
        for (const auto& [sa, wa] : Pa.atoms())
            for (const auto& [sb, wb] : Pb.atoms()) atoms.emplace_back(code(sa, sb), wa * wb);
        return Dist(std::move(atoms));
    }
    if (kind == StrategyKind::Diagonal) {
        // rank alignment in the canonical state order; defined for
        // conditionals with matching atom masses (all our kernels are
        // uniform with a common support size per step)
        if (Pa.atoms().size() != Pb.atoms().size())
            throw std::invalid_argument("diagonal strategy needs matching supports");
        for (size_t i = 0; i < Pa.atoms().size(); ++i) {
            if (Pa.atoms()[i].second != Pb.atoms()[i].second)
                throw std::invalid_argument("diagonal strategy needs matching masses");
            atoms.emplace_back(code(Pa.atoms()[i].first, Pb.atoms()[i].first),
                               Pa.atoms()[i].second);
        }
        return Dist(std::move(atoms));
    }
    // greedy maximal: diagonal meet of the pointwise minima, independent
    // product of the normalized residuals
    Rat omega(0);
    std::vector<std::pair<uint64_t, Rat>> meet;
    for (const auto& [sa, wa] : Pa.atoms()) {
        Rat wb = Pb.mass(sa);
        if (wb > 0) {
            Rat m = wa < wb ? wa : wb;
            meet.emplace_back(sa, m);
            omega += m;
        }
    }
    for (const auto& [s, m] : meet) atoms.emplace_back(code(s, s), m);
    if (omega < 1) {
        Rat norm = Rat(1) - omega;
        for (const auto& [sa, wa] : Pa.atoms()) {
            Rat mb = Pb.mass(sa);
            Rat resa = wa > mb ? wa - mb : Rat(0);
            if (resa == 0) continue;
            for (const auto& [sb, wb] : Pb.atoms()) {
                Rat ma = Pa.mass(sb);
                Rat resb = wb > ma ? wb - ma : Rat(0);
                if (resb == 0) continue;
                atoms.emplace_back(code(sa, sb), resa * resb / norm);
            }
        }
    }
    return Dist(std::move(atoms));
}

StrategyCheck verify_strategy(const FiniteProcessLaw& law, StrategyKind kind) {
    StrategyCheck chk;
    chk.consistent = true;
    for (uint32_t d = 0; d < law.depth() && chk.consistent; ++d) {
        const auto& prev = law.states[d + 1];
        const auto& cur = law.states[d];
        uint64_t n = cur.size();
        for (uint64_t ia = 0; ia < prev.size() && chk.consistent; ++ia)
            for (uint64_t ib = 0; ib < prev.size(); ++ib) {
                Dist joint = strategy_joint_kernel(law, kind, d, ia, ib);
                std::vector<Rat> ma(n, Rat(0)), mb(n, Rat(0));
                for (const auto& [pc, w] : joint.atoms()) {
                    ma[pc / n] += w;
                    mb[pc % n] += w;
                }
                const Dist& Pa = law.kernels[d].at(prev[ia]);
                const Dist& Pb = law.kernels[d].at(prev[ib]);
                bool ok = true;
                for (uint64_t i = 0; i < n; ++i) {
                    if (ma[i] != Pa.mass(cur[i])) ok = false;
                    if (mb[i] != Pb.mass(cur[i])) ok = false;
                }
                ++chk.pairs_checked;
                if (!ok) {
                    chk.consistent = false;
                    chk.witness = "marginal mismatch at depth " + std::to_string(d) +
                                  ", pair (" + std::to_string(prev[ia]) + ", " +
                                  std::to_string(prev[ib]) + ")";
                    break;
                }
            }
    }
    return chk;
}

ObservedChain coupled_chain(const FiniteProcessLaw& law, StrategyKind kind,
                            StartMode start, bool observe_second) {
    ObservedChain oc;
    uint32_t M = law.depth();
    auto states = law.states;   // shared by the lambdas
    oc.sizes.resize(M + 1);
    for (uint32_t d = 0; d <= M; ++d) oc.sizes[d] = states[d].size() * states[d].size();
    {
        uint64_t n = states[M].size();
        std::vector<std::pair<uint64_t, Rat>> atoms;
        for (const auto& [sa, wa] : law.initial.atoms()) {
            uint64_t ia = index_of(states[M], sa);
            if (start == StartMode::Identical) {
                atoms.emplace_back(ia * n + ia, wa);
            } else {
                for (const auto& [sb, wb] : law.initial.atoms())
                    atoms.emplace_back(ia * n + index_of(states[M], sb), wa * wb);
            }
        }
        oc.initial = Dist(std::move(atoms));
    }
    auto lawp = std::make_shared<FiniteProcessLaw>(law);
    oc.kernel = [lawp, kind](uint32_t d, uint64_t pair) {
        uint64_t n = lawp->states[d + 1].size();
        return strategy_joint_kernel(*lawp, kind, d, pair / n, pair % n);
    };
    oc.component = [lawp, observe_second](uint32_t d, uint64_t pair) {
        uint64_t n = lawp->states[d].size();
        uint64_t idx = observe_second ? pair % n : pair / n;
        return lawp->states[d][idx];
    };
    return oc;
}

namespace {

// component-level marginal of the joint kernel out of state s
Dist component_marginal(const ObservedChain& c, uint32_t d, uint64_t s) {
    std::map<uint64_t, Rat> acc;
    Dist k = c.kernel(d, s);
    for (const auto& [t, w] : k.atoms()) acc[c.component(d, t)] += w;
    std::vector<std::pair<uint64_t, Rat>> atoms(acc.begin(), acc.end());
    return Dist(std::move(atoms));
}

// do two chain states admit a common component history down to `depth`?
bool share_component_history(const ObservedChain& c, uint32_t M, uint32_t depth,
                             uint64_t s1, uint64_t s2, uint64_t budget) {
    // classes: set of (history class id, state); two states share a history
    // iff they appear under the same class id at `depth`
    std::map<std::pair<uint64_t, uint64_t>, uint64_t> class_of;   // (parent, comp) -> id
    std::vector<std::pair<uint64_t, uint64_t>> cur;               // (class, state)
    uint64_t next_id = 0;
    {
        std::map<uint64_t, uint64_t> roots;
        for (const auto& [s, w] : c.initial.atoms()) {
            uint64_t x = c.component(M, s);
            auto [it, fresh] = roots.emplace(x, next_id);
            if (fresh) ++next_id;
            cur.emplace_back(it->second, s);
        }
    }
    for (uint32_t d = M; d-- > depth;) {
        std::set<std::pair<uint64_t, uint64_t>> nxt;
        for (const auto& [cls, s] : cur) {
            Dist k = c.kernel(d, s);
            for (const auto& [t, w] : k.atoms()) {
                auto key = std::make_pair(cls, c.component(d, t));
                auto [it, fresh] = class_of.emplace(key, next_id);
                if (fresh) ++next_id;
                nxt.emplace(it->second, t);
                if (nxt.size() > budget)
                    throw sw::ExplicitBudgetError("immersion history expansion too large");
            }
        }
        cur.assign(nxt.begin(), nxt.end());
    }
    std::set<uint64_t> cls1, cls2;
    for (const auto& [cls, s] : cur) {
        if (s == s1) cls1.insert(cls);
        if (s == s2) cls2.insert(cls);
    }
    for (uint64_t c1 : cls1)
        if (cls2.count(c1)) return true;
    return false;
}

} // namespace

ImmersionReport immersion_check(const ObservedChain& chain, uint64_t budget) {
    ImmersionReport rep;
    rep.immersed = true;
    uint32_t M = uint32_t(chain.sizes.size()) - 1;
    std::vector<std::set<uint64_t>> reach(M + 1);
    for (const auto& [s, w] : chain.initial.atoms()) reach[M].insert(s);
    for (uint32_t d = M; d-- > 0;)
        for (uint64_t s : reach[d + 1]) {
            Dist k = chain.kernel(d, s);
            for (const auto& [t, w] : k.atoms()) reach[d].insert(t);
            if (reach[d].size() > budget)
                throw sw::ExplicitBudgetError(
                    "reachable state set exceeds the immersion budget");
        }

    for (uint32_t d = 0; d < M; ++d) {
        // group the conditioning states (depth d+1) by their component value
        std::map<uint64_t, std::vector<uint64_t>> groups;
        for (uint64_t s : reach[d + 1]) groups[chain.component(d + 1, s)].push_back(s);
        for (const auto& [x, members] : groups) {
            if (members.size() < 2) {
                ++rep.checks;
                continue;
            }
            Dist ref = component_marginal(chain, d, members[0]);
            for (size_t i = 1; i < members.size(); ++i) {
                Dist other = component_marginal(chain, d, members[i]);
                ++rep.checks;
                if (other.atoms() == ref.atoms()) continue;
                // differing conditional laws violate immersion only when the
                // two states are reachable along one and the same component
                // history
                if (share_component_history(chain, M, d + 1, members[0], members[i],
                                            budget)) {
                    rep.immersed = false;
                    rep.witness = "depth " + std::to_string(d) +
                                  ": component past does not determine the "
                                  "conditional law (component value " +
                                  std::to_string(x) + ")";
                    return rep;
                }
            }
        }
    }
    return rep;
}

SeparationReport step_separation_bound(const brick::StrongBrick& b, uint64_t pair_budget,
                                       uint64_t seed) {
    SeparationReport rep;
    const auto& fam = b.fam;
    uint64_t nblocks = b.f0_size * b.r1;
    uint64_t best = 0;   // max intersection over distinct z1 pairs
    if (fam.kind == brick::PartitionFamily::Kind::Quartic && fam.f2_size <= 64 &&
        nblocks <= (uint64_t(1) << 20) && nblocks * (nblocks - 1) / 2 <= pair_budget) {
        std::vector<uint64_t> masks(nblocks);
        for (uint64_t z1 = 0; z1 < nblocks; ++z1) {
            uint64_t m = 0;
            for (uint64_t z2 : b.S(z1)) m |= uint64_t(1) << z2;
            masks[z1] = m;
        }
        for (uint64_t a = 0; a < nblocks; ++a)
            for (uint64_t c = a + 1; c < nblocks; ++c) {
                uint64_t k = uint64_t(__builtin_popcountll(masks[a] & masks[c]));
                ++rep.pairs_checked;
                if (k > best) { best = k; rep.worst_a = a; rep.worst_b = c; }
            }
        rep.exhaustive = true;
    } else {
        auto rng = derive(seed, "separation-spot");
        for (int t = 0; t < 400; ++t) {
            uint64_t a = rng.below(nblocks), c = rng.below(nblocks);
            if (a == c) continue;
            uint64_t k = fam.intersection_size(b.f(a), b.j_of(a), b.f(c), b.j_of(c));
            ++rep.pairs_checked;
            if (k > best) { best = k; rep.worst_a = a; rep.worst_b = c; }
        }
    }
    rep.worst_separation = Rat(1) - frac(best, b.r2);
    Rat bound = Rat(1) - b.alpha;
    rep.ok = rep.worst_separation >= bound;
    if (!rep.exhaustive && fam.kind == brick::PartitionFamily::Kind::Matrix)
        rep.ok = true;   // rank certificate: overlap <= q^3 / q^4 = alpha
    return rep;
}

Interval wilson99(uint64_t k, uint64_t n) {
    Interval iv;
    if (n == 0) return iv;
    const double z = 2.5758293035489008;   // 99% two-sided normal quantile
    double p = double(k) / double(n), nn = double(n);
    iv.point = p;
    double denom = 1.0 + z * z / nn;
    double center = (p + z * z / (2 * nn)) / denom;
    double rad = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
    iv.low = std::max(0.0, center - rad);
    iv.high = std::min(1.0, center + rad);
    return iv;
}

CouplingReport run_coupling(const brick::GluedChain& chain, StrategyKind kind,
                            StartMode start, uint64_t replicates, uint64_t seed,
                            double slack) {
    uint32_t M = chain.depth();
    std::vector<uint64_t> neq(M + 1, 0);
    uint64_t all_odd = 0;
    for (uint64_t r = 0; r < replicates; ++r) {
        auto rng = derive(seed, "couple", r);
        uint64_t a = rng.below(chain.level_size(M));
        uint64_t b = start == StartMode::Identical ? a : rng.below(chain.level_size(M));
        if (a != b) ++neq[M];
        bool odd_all_distinct = true;
        for (uint32_t d = M; d-- > 0;) {
            const auto& br = chain.bricks[d / 2];
            const auto& fam = br.fam;
            if (d % 2 == 1) {
                // append the J innovation to the even states a, b
                uint64_t ja, jb;
                switch (kind) {
                    case StrategyKind::Diagonal: ja = jb = rng.below(br.r1); break;
                    case StrategyKind::IndependentProduct:
                        ja = rng.below(br.r1);
                        jb = rng.below(br.r1);
                        break;
                    default:   // greedy: overlap is 1 on equal states, 0 otherwise
                        if (a == b) ja = jb = rng.below(br.r1);
                        else { ja = rng.below(br.r1); jb = rng.below(br.r1); }
                }
                a = a * br.r1 + ja;
                b = b * br.r1 + jb;
            } else {
                uint64_t z0a = br.f(a), ja = br.j_of(a);
                uint64_t z0b = br.f(b), jb = br.j_of(b);
                switch (kind) {
                    case StrategyKind::Diagonal: {
                        uint64_t t = rng.below(br.r2);
                        a = fam.block_element(z0a, ja, t);
                        b = fam.block_element(z0b, jb, t);
                        break;
                    }
                    case StrategyKind::IndependentProduct:
                        a = fam.sample_block(z0a, ja, rng);
                        b = fam.sample_block(z0b, jb, rng);
                        break;
                    default: {
                        if (z0a == z0b && ja == jb) {
                            a = b = fam.sample_block(z0a, ja, rng);
                        } else {
                            uint64_t k = fam.intersection_size(z0a, ja, z0b, jb);
                            if (k > 0 && rng.below(br.r2) < k) {
                                a = b = fam.sample_intersection(z0a, ja, z0b, jb, rng);
                            } else {
                                a = fam.sample_block_excluding(z0a, ja, z0b, jb, rng);
                                b = fam.sample_block_excluding(z0b, jb, z0a, ja, rng);
                            }
                        }
                    }
                }
            }
            if (a != b) ++neq[d];
            else if (d % 2 == 1) odd_all_distinct = false;
        }
        if (odd_all_distinct) ++all_odd;
    }

    CouplingReport rep;
    rep.replicates = replicates;
    for (uint32_t d = M + 1; d-- > 0;) {
        CouplingLevel lvl;
        lvl.d = d;
        lvl.neq = neq[d];
        lvl.p_neq = wilson99(neq[d], replicates);
        rep.levels.push_back(lvl);
    }
    rep.analytic_bound = Rat(1, 2);
    for (const auto& al : chain.alphas) rep.analytic_bound *= Rat(1) - al;
    rep.analytic_bound.canonicalize();
    rep.final_p_neq = wilson99(neq[1], replicates);
    double bound_d = rep.analytic_bound.get_d();
    rep.final_bound_ok = rep.final_p_neq.low > bound_d - slack;

    rep.per_step_ok = true;
    for (size_t j = 0; j < chain.bricks.size(); ++j) {
        // even step into depth 2j: P[neq] >= (1 - alpha_j) P[neq at 2j+1]
        double gamma = 1.0 - chain.alphas[j].get_d();
        Interval even = wilson99(neq[2 * j], replicates);
        Interval odd = wilson99(neq[2 * j + 1], replicates);
        if (even.high < gamma * odd.low) rep.per_step_ok = false;
    }

    rep.all_odd_neq = wilson99(all_odd, replicates);
    rep.necessity_bound =
        Rat(1) - frac(1, chain.bricks.back().f1_size);
    for (const auto& al : chain.alphas) rep.necessity_bound *= Rat(1) - al;
    rep.necessity_bound.canonicalize();
    if (kind == StrategyKind::IndependentProduct && start == StartMode::IndependentAtDeepest) {
        rep.necessity_checked = true;
        rep.necessity_ok = !(rep.all_odd_neq.high < rep.necessity_bound.get_d());
    }
    return rep;
}

IcosinessProbe icosiness_probe(const brick::GluedChain& chain, double delta,
                               const std::vector<StrategyKind>& strategies,
                               uint64_t replicates, uint64_t seed) {
    IcosinessProbe probe;
    probe.delta = delta;
    probe.analytic_bound = Rat(1, 2);
    for (const auto& al : chain.alphas) probe.analytic_bound *= Rat(1) - al;
    probe.analytic_bound.canonicalize();
    // the per-step overlap caps hold for every non-anticipative coupling,
    // so P[Z'_{-1} != Z''_{-1}] >= bound for all strategies: any delta
    // below the bound negates I-cosiness for the discrete distance
    probe.negates_icosiness = delta < probe.analytic_bound.get_d();
    uint64_t tag = 0;
    for (auto kind : strategies) {
        auto rep = run_coupling(chain, kind, StartMode::IndependentAtDeepest, replicates,
                                mix(seed, tag++));
        probe.per_strategy.emplace_back(kind, rep.final_p_neq.point);
        probe.min_p_neq = std::min(probe.min_p_neq, rep.final_p_neq.point);
    }
    return probe;
}

double split_words_probe(const sw::SplitWordsSpec& spec, uint64_t replicates,
                         uint64_t seed) {
    uint64_t N = spec.depth();
    uint64_t neq = 0;
    for (uint64_t r = 0; r < replicates; ++r) {
        auto rng = derive(seed, "sw-probe", r);
        // shared innovations pick one common letter position inside the
        // deep words; the deep words are independent uniform, so only the
        // two letters at that position need to be drawn
        uint64_t pos = 0;
        for (uint64_t d = 0; d < N; ++d) pos += rng.below(spec.ratio(d)) * spec.lengths[d];
        (void)pos;
        uint64_t la = rng.below(spec.alphabet), lb = rng.below(spec.alphabet);
        if (la != lb) ++neq;
    }
    return double(neq) / double(replicates);
}

} // namespace ftk::cpl
