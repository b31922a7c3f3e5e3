// ftk: batch front end for the filtration toolkit. Every run is driven by
// explicit options plus a root seed; identical option sets produce
// byte-identical report files, written append-only (re-runs create
// versioned siblings).
//
// Exit codes: 0 = checks pass or undetermined, 1 = verified violation,
// 2 = input error, 3 = explicit budget exceeded.

#include <cstdint>
#include <iostream>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftk/bricks.hpp"
#include "ftk/coupling.hpp"
#include "ftk/geometry.hpp"
#include "ftk/glue.hpp"
#include "ftk/lengths.hpp"
#include "ftk/report.hpp"
#include "ftk/split_words.hpp"

using namespace ftk;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

struct SequenceOpts {
    std::string gen = "dyadic";
    uint64_t depth = 10;
    std::string alpha_kind = "constant";
    std::string alpha = "1";
    std::string alpha_even = "0";
    std::string alpha_odd = "1";
    std::vector<std::string> lengths;   // explicit values, shallow first
    unsigned long exact_bits = 65536;
};

void add_sequence_opts(CLI::App* cmd, SequenceOpts& o) {
    cmd->add_option("--gen", o.gen, "sequence generator")
        ->check(CLI::IsMember({"dyadic", "example1", "theorem3", "explicit"}));
    cmd->add_option("--depth", o.depth, "horizon depth (levels 0..-depth)");
    cmd->add_option("--alpha-kind", o.alpha_kind, "theorem3 alpha preset")
        ->check(CLI::IsMember({"constant", "even-odd", "summable", "harmonic"}));
    cmd->add_option("--alpha", o.alpha, "alpha value for --alpha-kind constant (p/q)");
    cmd->add_option("--alpha-even", o.alpha_even, "even-index alpha (p/q)");
    cmd->add_option("--alpha-odd", o.alpha_odd, "odd-index alpha (p/q)");
    cmd->add_option("--lengths", o.lengths,
                    "explicit lengths l_0, l_{-1}, ... (integers)")
        ->delimiter(',');
    cmd->add_option("--exact-bits", o.exact_bits,
                    "materialize l_n while its exponent fits this many bits");
}

len::LengthSequence build_sequence(const SequenceOpts& o) {
    len::Budgets budgets{o.exact_bits};
    if (o.gen == "dyadic") return len::generate_dyadic(o.depth, budgets);
    if (o.gen == "example1") return len::generate_example1(o.depth, budgets);
    if (o.gen == "theorem3") {
        len::AlphaSequence alpha;
        if (o.alpha_kind == "constant")
            alpha = len::AlphaSequence::constant(rat_parse(o.alpha));
        else if (o.alpha_kind == "even-odd")
            alpha = len::AlphaSequence::even_odd(rat_parse(o.alpha_even),
                                                 rat_parse(o.alpha_odd));
        else if (o.alpha_kind == "summable")
            alpha = len::AlphaSequence::summable();
        else
            alpha = len::AlphaSequence::harmonic();
        return len::generate_theorem3(alpha, o.depth, budgets);
    }
    if (o.lengths.empty())
        throw std::invalid_argument("--gen explicit needs --lengths");
    std::vector<Int> values;
    for (const auto& s : o.lengths) values.emplace_back(s);
    return len::make_explicit(std::move(values));
}

len::ExtractionSet parse_extraction(const std::string& name) {
    if (name == "all") return len::ExtractionSet::all();
    if (name == "evens") return len::ExtractionSet::evens();
    if (name == "odds") return len::ExtractionSet::odds();
    throw std::invalid_argument("unknown extraction set: " + name);
}

struct ChainOpts {
    std::string family = "quartic";
    uint64_t q = 5;
    uint32_t bricks = 1;
    std::string mode = "constant";
};

void add_chain_opts(CLI::App* cmd, ChainOpts& o) {
    cmd->add_option("--family", o.family, "partition family")
        ->check(CLI::IsMember({"quartic", "matrix"}));
    cmd->add_option("--q", o.q, "field order");
    cmd->add_option("--bricks", o.bricks, "number of glued bricks");
    cmd->add_option("--mode", o.mode, "gluing mode")
        ->check(CLI::IsMember({"constant", "tower"}));
}

brick::GluedChain build_chain(const ChainOpts& o) {
    auto fam = o.family == "matrix" ? brick::FamilyKind::Matrix
                                    : brick::FamilyKind::Quartic;
    return o.mode == "tower" ? brick::glue_tower(fam, o.q, o.bricks)
                             : brick::glue_constant_q(fam, o.q, o.bricks);
}

cpl::StrategyKind parse_strategy(const std::string& name) {
    if (name == "greedy") return cpl::StrategyKind::GreedyMaximal;
    if (name == "diagonal") return cpl::StrategyKind::Diagonal;
    return cpl::StrategyKind::IndependentProduct;
}

char letter_char(uint32_t a) {
    return a < 10 ? char('0' + a) : char('a' + (a - 10));
}

int cmd_classify(const SequenceOpts& seq_opts,
                 const std::vector<std::string>& extractions,
                 const std::string& out) {
    auto seq = build_sequence(seq_opts);
    std::string why;
    if (!len::check_shape(seq, &why)) {
        std::cerr << "malformed sequence: " << why << "\n";
        return kExitInput;
    }
    auto doc = rep::classify_json(seq);
    doc["generator"] = seq_opts.gen;
    for (const auto& name : extractions)
        doc["extractions"][name] =
            rep::extraction_json(len::extraction_analysis(seq, parse_extraction(name)));
    auto jp = rep::write_versioned(out, "classify", "json", rep::dump(doc));
    auto cp = rep::write_versioned(out, "terms", "csv", rep::term_table_csv(seq));
    std::cout << jp.string() << "\n" << cp.string() << "\n";
    return kExitPass;
}

int cmd_generate(const SequenceOpts& seq_opts, const std::string& out) {
    auto seq = build_sequence(seq_opts);
    std::string why;
    if (!len::check_shape(seq, &why)) {
        std::cerr << "malformed sequence: " << why << "\n";
        return kExitInput;
    }
    rep::json levels = rep::json::array();
    for (uint64_t d = 0; d <= seq.depth(); ++d) {
        rep::json lvl{{"n", -int64_t(d)}, {"e_n", seq.exponent(d).get_str()}};
        if (seq.levels[d].exact) lvl["l_n"] = seq.levels[d].value.get_str();
        levels.push_back(lvl);
    }
    rep::json doc{{"schema_version", rep::schema_version},
                  {"generator", seq_opts.gen},
                  {"depth", seq.depth()},
                  {"truncated", seq.truncated},
                  {"levels", levels}};
    auto p = rep::write_versioned(out, "sequence", "json", rep::dump(doc));
    std::cout << p.string() << "\n";
    return kExitPass;
}

int cmd_simulate(uint32_t alphabet, const std::vector<uint64_t>& lengths,
                 uint64_t paths, uint64_t seed, unsigned budget_bits,
                 const std::string& out) {
    if (alphabet > 36) throw std::invalid_argument("alphabet too large to print");
    std::vector<uint64_t> ls(lengths.rbegin(), lengths.rend());   // shallow first
    auto spec = sw::SplitWordsSpec::from_lengths(alphabet, ls);

    std::string jsonl;
    for (uint64_t t = 0; t < paths; ++t) {
        auto rng = derive(seed, "cli-simulate", t);
        auto path = sw::sample_path(spec, rng);
        for (uint64_t d = 0; d <= path.depth(); ++d) {
            rep::json line{{"path", t}, {"n", -int64_t(d)}};
            std::string word;
            for (uint32_t c : path.words[d]) word += letter_char(c);
            line["word"] = word;
            if (d < path.depth()) line["U"] = path.u[d];
            jsonl += line.dump() + "\n";
        }
    }
    auto marg = sw::exact_marginals(spec, uint64_t(1) << budget_bits);
    auto pp = rep::write_versioned(out, "paths", "jsonl", jsonl);
    auto mp = rep::write_versioned(out, "marginals", "json",
                                   rep::dump(rep::marginals_json(marg)));
    std::cout << pp.string() << "\n" << mp.string() << "\n";
    bool ok = marg.entrance_law_ok && marg.innovations_independent;
    for (const auto& lvl : marg.levels)
        if (!lvl.word_uniform) ok = false;
    return ok ? kExitPass : kExitViolation;
}

int cmd_brick_verify(const std::string& family, uint64_t q, unsigned pair_bits,
                     const std::string& out) {
    if (family == "geometric") {
        auto b = brick::build_geometric_brick(uint32_t(q));
        auto repg = brick::verify_geometric_brick(b);
        auto p = rep::write_versioned(out, "geometric-p" + std::to_string(q), "json",
                                      rep::dump(rep::geometric_json(repg)));
        std::cout << p.string() << "\n";
        return repg.all_pass() ? kExitPass : kExitViolation;
    }
    auto fam = family == "matrix" ? brick::matrix_partition_family(q)
                                  : brick::quartic_partition_family(q);
    auto b = brick::assemble_strong_brick(fam);
    auto repb = brick::verify_strong_brick(b, uint64_t(1) << pair_bits);
    auto p = rep::write_versioned(out, family + "-q" + std::to_string(q), "json",
                                  rep::dump(rep::brick_json(repb)));
    std::cout << p.string() << "\n";
    return repb.all_pass() ? kExitPass : kExitViolation;
}

int cmd_couple(const ChainOpts& chain_opts, const std::string& strategy,
               const std::string& start, uint64_t replicates, uint64_t seed,
               double slack, const std::string& out) {
    auto chain = build_chain(chain_opts);
    auto mode = start == "identical" ? cpl::StartMode::Identical
                                     : cpl::StartMode::IndependentAtDeepest;
    auto repc = cpl::run_coupling(chain, parse_strategy(strategy), mode, replicates,
                                  seed, slack);
    auto doc = rep::coupling_json(repc);
    doc["family"] = chain_opts.family;
    doc["q"] = chain_opts.q;
    doc["strategy"] = strategy;
    doc["start"] = start;
    doc["seed"] = seed;
    auto jp = rep::write_versioned(out, "couple", "json", rep::dump(doc));
    auto cp = rep::write_versioned(out, "couple", "csv", rep::coupling_csv(repc));
    std::cout << jp.string() << "\n" << cp.string() << "\n";
    bool identical_start = mode == cpl::StartMode::Identical;
    bool ok = repc.per_step_ok && (identical_start || repc.final_bound_ok) &&
              (!repc.necessity_checked || repc.necessity_ok);
    return ok ? kExitPass : kExitViolation;
}

int cmd_immersion(const ChainOpts& chain_opts, const std::string& strategy,
                  const std::string& start, bool counterexample, unsigned state_bits,
                  const std::string& out) {
    cpl::ImmersionReport repi;
    rep::json doc;
    if (counterexample) {
        // W_{-1} = (e_{-1}, e_0) with the observed component e_{-1}: the
        // component's past carries no information about the delivered e_0
        cpl::ObservedChain oc;
        oc.sizes = {2, 4};
        oc.initial = Dist::uniform({0, 1, 2, 3});
        oc.kernel = [](uint32_t, uint64_t s) { return Dist::point(s % 2); };
        oc.component = [](uint32_t d, uint64_t s) { return d == 1 ? s / 2 : s; };
        repi = cpl::immersion_check(oc);
        doc = rep::immersion_json(repi);
        doc["case"] = "counterexample";
    } else {
        auto chain = build_chain(chain_opts);
        auto law = cpl::chain_law(chain, uint64_t(1) << state_bits);
        auto mode = start == "independent" ? cpl::StartMode::IndependentAtDeepest
                                           : cpl::StartMode::Identical;
        auto oc = cpl::coupled_chain(law, parse_strategy(strategy), mode);
        repi = cpl::immersion_check(oc, uint64_t(1) << state_bits);
        doc = rep::immersion_json(repi);
        doc["case"] = chain_opts.family + " q=" + std::to_string(chain_opts.q) +
                      " strategy=" + strategy + " start=" + start;
    }
    auto p = rep::write_versioned(out, "immersion", "json", rep::dump(doc));
    std::cout << p.string() << "\n";
    return repi.immersed ? kExitPass : kExitViolation;
}

int cmd_report(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot read " + file);
    rep::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("not a JSON report: ") + e.what());
    }
    for (const auto& [key, value] : doc.items())
        std::cout << key << ": " << value.dump() << "\n";
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"filtration toolkit: split-words, classifiers, bricks, couplings"};
    app.require_subcommand(1);
    std::string out = "reports";
    app.add_option("--out", out, "report directory (files are append-only)");

    SequenceOpts seq_opts;
    std::vector<std::string> extractions;
    auto* classify = app.add_subcommand("classify", "length-sequence verdicts");
    add_sequence_opts(classify, seq_opts);
    classify->add_option("--extract", extractions, "extraction sets (all|evens|odds)")
        ->delimiter(',');

    SequenceOpts gen_opts;
    auto* generate = app.add_subcommand("generate", "write a length sequence");
    add_sequence_opts(generate, gen_opts);

    uint32_t alphabet = 2;
    std::vector<uint64_t> sim_lengths{4, 2, 1};
    uint64_t paths = 5, sim_seed = 0;
    unsigned enum_bits = 24;
    auto* simulate = app.add_subcommand("simulate", "sample split-words paths");
    simulate->add_option("--alphabet", alphabet, "alphabet size");
    simulate->add_option("--lengths", sim_lengths, "window lengths, deepest first")
        ->delimiter(',');
    simulate->add_option("--paths", paths, "number of paths");
    simulate->add_option("--seed", sim_seed, "root seed")->required();
    simulate->add_option("--enum-bits", enum_bits, "exact-marginal budget (2^bits)");

    std::string bv_family = "quartic";
    uint64_t bv_q = 5;
    unsigned pair_bits = 28;
    auto* brick_verify = app.add_subcommand("brick-verify", "verify a brick");
    brick_verify->add_option("--family", bv_family, "quartic|matrix|geometric")
        ->check(CLI::IsMember({"quartic", "matrix", "geometric"}));
    brick_verify->add_option("--q", bv_q, "field order (or p for geometric)");
    brick_verify->add_option("--pair-budget-bits", pair_bits, "pair scan budget");

    ChainOpts couple_chain;
    std::string strategy = "greedy", start = "independent";
    uint64_t replicates = 100000, couple_seed = 0;
    double slack = 0.0;
    auto* couple = app.add_subcommand("couple", "coupling experiment on a glued chain");
    add_chain_opts(couple, couple_chain);
    couple->add_option("--strategy", strategy, "greedy|diagonal|independent")
        ->check(CLI::IsMember({"greedy", "diagonal", "independent"}));
    couple->add_option("--start", start, "independent|identical")
        ->check(CLI::IsMember({"independent", "identical"}));
    couple->add_option("--replicates", replicates, "Monte Carlo replicates");
    couple->add_option("--seed", couple_seed, "root seed")->required();
    couple->add_option("--slack", slack, "tolerance under the analytic bound");

    ChainOpts imm_chain;
    std::string imm_strategy = "greedy", imm_start = "identical";
    bool counterexample = false;
    unsigned state_bits = 20;
    auto* immersion = app.add_subcommand("immersion", "exact immersion check");
    add_chain_opts(immersion, imm_chain);
    immersion->add_option("--strategy", imm_strategy, "greedy|diagonal|independent")
        ->check(CLI::IsMember({"greedy", "diagonal", "independent"}));
    immersion->add_option("--start", imm_start, "independent|identical")
        ->check(CLI::IsMember({"independent", "identical"}));
    immersion->add_flag("--counterexample", counterexample,
                        "run the built-in non-immersed example");
    immersion->add_option("--state-bits", state_bits, "explicit-law budget (2^bits)");

    std::string report_file;
    auto* report = app.add_subcommand("report", "render a JSON report");
    report->add_option("file", report_file, "report file")->required();

    // let the global --out be written after the subcommand name
    for (auto* sub : {classify, generate, simulate, brick_verify, couple, immersion,
                      report})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (classify->parsed()) return cmd_classify(seq_opts, extractions, out);
        if (generate->parsed()) return cmd_generate(gen_opts, out);
        if (simulate->parsed())
            return cmd_simulate(alphabet, sim_lengths, paths, sim_seed, enum_bits, out);
        if (brick_verify->parsed())
            return cmd_brick_verify(bv_family, bv_q, pair_bits, out);
        if (couple->parsed())
            return cmd_couple(couple_chain, strategy, start, replicates, couple_seed,
                              slack, out);
        if (immersion->parsed())
            return cmd_immersion(imm_chain, imm_strategy, imm_start, counterexample,
                                 state_bits, out);
        if (report->parsed()) return cmd_report(report_file);
    } catch (const sw::ExplicitBudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
