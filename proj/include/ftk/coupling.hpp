#pragma once
// Non-anticipative couplings of finite Markov windows: exact overlap and
// separation bounds, coupling strategies (greedy maximal, diagonal,
// independent product), Monte Carlo runs with Wilson intervals, the exact
// immersion checker and the I-cosiness probe.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ftk/dist.hpp"
#include "ftk/glue.hpp"
#include "ftk/rng.hpp"
#include "ftk/split_words.hpp"

namespace ftk::cpl {

// Explicit finite-window law: levels n = -depth..0 stored as depths,
// deepest first in time. kernels[d] gives the law at depth d conditional
// on the state at depth d+1.
struct FiniteProcessLaw {
    std::vector<std::vector<uint64_t>> states;      // per depth, sorted
    Dist initial;                                    // at the deepest depth
    std::vector<std::map<uint64_t, Dist>> kernels;   // size depth()

    uint32_t depth() const { return uint32_t(states.size()) - 1; }
    bool validate(std::string* why = nullptr) const;   // exact stochasticity
};

// Explicit law of a glued chain; throws sw::ExplicitBudgetError when a
// level exceeds state_budget.
FiniteProcessLaw chain_law(const brick::GluedChain& chain,
                           uint64_t state_budget = uint64_t(1) << 20);

enum class StrategyKind { GreedyMaximal, Diagonal, IndependentProduct };
enum class StartMode { IndependentAtDeepest, Identical };

// Exact joint per-step kernel for a strategy over two copies of `law`.
// Pair codes are ia * n_d + ib with ia, ib indices into states[d].
Dist strategy_joint_kernel(const FiniteProcessLaw& law, StrategyKind kind,
                           uint32_t d, uint64_t ia, uint64_t ib);

// The immersion contract: both marginals of every joint kernel equal the
// corresponding conditional laws, exactly, over every state pair.
struct StrategyCheck {
    bool consistent = false;
    std::string witness;
    uint64_t pairs_checked = 0;
};
StrategyCheck verify_strategy(const FiniteProcessLaw& law, StrategyKind kind);

// A (possibly lazily represented) chain carrying an observed component:
// used for the exact immersion test of the component's natural filtration
// in the chain's filtration.
struct ObservedChain {
    std::vector<uint64_t> sizes;                       // state count per depth
    Dist initial;                                      // at the deepest depth
    std::function<Dist(uint32_t d, uint64_t s)> kernel;   // law at d given s at d+1
    std::function<uint64_t(uint32_t d, uint64_t s)> component;
};

// Two copies of `law` coupled by the strategy, observed on the first or
// second copy.
ObservedChain coupled_chain(const FiniteProcessLaw& law, StrategyKind kind,
                            StartMode start, bool observe_second = false);

struct ImmersionReport {
    bool immersed = false;
    std::string witness;
    uint64_t checks = 0;
};
// Exact: the component's conditional law given the chain's past must
// factor through the component's own past. Budget caps the history-class
// expansion; overflow throws sw::ExplicitBudgetError.
ImmersionReport immersion_check(const ObservedChain& chain,
                                uint64_t budget = uint64_t(1) << 21);

// 1 - overlap >= 1 - alpha over all distinct conditioning pairs of the
// brick's middle level.
struct SeparationReport {
    bool ok = false;
    Rat worst_separation;         // min over pairs of 1 - overlap
    uint64_t worst_a = 0, worst_b = 0;
    uint64_t pairs_checked = 0;
    bool exhaustive = false;
};
SeparationReport step_separation_bound(const brick::StrongBrick& b,
                                       uint64_t pair_budget = uint64_t(1) << 28,
                                       uint64_t seed = 2026);

struct Interval {
    double point = 0, low = 0, high = 0;
};
Interval wilson99(uint64_t k, uint64_t n);

struct CouplingLevel {
    uint32_t d = 0;
    uint64_t neq = 0;
    Interval p_neq;
};

struct CouplingReport {
    std::vector<CouplingLevel> levels;     // depth M down to 0
    uint64_t replicates = 0;
    Rat analytic_bound;                    // (1/2) prod (1 - alpha_j)
    Interval final_p_neq;                  // at depth 1 (level -1)
    bool final_bound_ok = false;           // interval above bound - slack
    bool per_step_ok = false;              // odd-to-odd recursion, within CI
    Interval all_odd_neq;                  // P[every odd level distinct]
    Rat necessity_bound;                   // (1 - 1/|F_deepest odd|) prod(1-alpha)
    bool necessity_checked = false;        // only for independent couplings
    bool necessity_ok = false;
};

CouplingReport run_coupling(const brick::GluedChain& chain, StrategyKind kind,
                            StartMode start, uint64_t replicates, uint64_t seed,
                            double slack = 0.0);

struct IcosinessProbe {
    Rat analytic_bound;                    // (1/2) prod (1 - alpha_j)
    double delta = 0;
    bool negates_icosiness = false;        // delta below the analytic bound
    double min_p_neq = 1.0;                // over the supplied strategies
    std::vector<std::pair<StrategyKind, double>> per_strategy;
};

// Probe for the target variable Z_{-1}: Monte Carlo minimum of
// P[Z'_{-1} != Z''_{-1}] over the supplied strategies with independent
// start, against the strategy-independent analytic lower bound.
IcosinessProbe icosiness_probe(const brick::GluedChain& chain, double delta,
                               const std::vector<StrategyKind>& strategies,
                               uint64_t replicates, uint64_t seed);

// Split-words probe: independent deep words, shared innovations (block
// alignment); reports the empirical P[X'_0 != X''_0] only.
double split_words_probe(const sw::SplitWordsSpec& spec, uint64_t replicates,
                         uint64_t seed);

} // namespace ftk::cpl
