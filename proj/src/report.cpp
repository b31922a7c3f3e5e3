#include "ftk/report.hpp"

#include <fstream>
#include <stdexcept>

namespace ftk::rep {

namespace {

std::string verdict_kind_str(len::VerdictKind k) {
    switch (k) {
        case len::VerdictKind::DivergesByCertificate: return "diverges";
        case len::VerdictKind::ConvergesByCertificate: return "converges";
        default: return "undetermined";
    }
}

std::string star_kind_str(len::StarKind k) {
    switch (k) {
        case len::StarKind::HoldsByCertificate: return "holds";
        case len::StarKind::FailsByCertificate: return "fails";
        default: return "undetermined";
    }
}

std::string threshold_kind_str(len::ThresholdVerdict::Kind k) {
    switch (k) {
        case len::ThresholdVerdict::Kind::AtThreshold: return "at_threshold";
        case len::ThresholdVerdict::Kind::NotAtThreshold: return "not_at_threshold";
        default: return "undetermined";
    }
}

json clause_json(const brick::ClauseReport& c) {
    return json{{"clause", c.name},
                {"status", c.pass ? "pass" : "fail"},
                {"exhaustive", c.exhaustive},
                {"witness", c.witness}};
}

json interval_json(const cpl::Interval& iv) {
    return json{{"estimate", iv.point}, {"ci_low", iv.low}, {"ci_high", iv.high}};
}

} // namespace

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json verdict_json(const len::SeriesVerdict& v) {
    return json{{"schema_version", schema_version},
                {"verdict", verdict_kind_str(v.kind)},
                {"partial_sum_low", rat_str(v.partial_lo)},
                {"partial_sum_high", rat_str(v.partial_hi)},
                {"exact_sum", v.exact_sum},
                {"certificate", v.certificate},
                {"boundary_flags", v.boundary_flags}};
}

json star_json(const len::StarReport& s) {
    json doc{{"schema_version", schema_version},
             {"verdict", star_kind_str(s.kind)},
             {"window_min", s.any_term ? rat_str(s.window_min) : ""},
             {"certificate", s.certificate},
             {"boundary_from_n", s.boundary_from_n},
             {"boundary_flags", s.boundary_flags}};
    doc["tail_lower_bound"] =
        s.tail_lower_bound ? json(rat_str(*s.tail_lower_bound)) : json();
    return doc;
}

json threshold_json(const len::ThresholdVerdict& t) {
    return json{{"schema_version", schema_version},
                {"verdict", threshold_kind_str(t.kind)},
                {"reason", t.reason}};
}

json classify_json(const len::LengthSequence& seq) {
    json doc{{"schema_version", schema_version},
             {"depth", seq.depth()},
             {"truncated", seq.truncated},
             {"power_of_two", seq.power_of_two}};
    doc["delta"] = verdict_json(len::delta_verdict(seq));
    doc["box"] = verdict_json(len::box_verdict(seq));
    doc["star"] = star_json(len::star_verdict(seq));
    doc["threshold"] = threshold_json(len::threshold_verdict(seq));
    return doc;
}

json extraction_json(const len::ExtractionAnalysis& a) {
    json entries = json::array();
    for (const auto& e : a.entries)
        entries.push_back(json{{"n", e.n},
                               {"m", e.m},
                               {"big_ratio_log2", e.big_ratio_log2.get_str()},
                               {"class", e.cls}});
    return json{{"schema_version", schema_version},
                {"entries", entries},
                {"r_identity_b1", a.r_identity_b1},
                {"b2_identity_applies", a.b2_identity_applies},
                {"r_identity_b2", a.r_identity_b2},
                {"extracted_delta", verdict_json(a.extracted_delta)},
                {"extracted_star", star_json(a.extracted_star)},
                {"extracted_threshold", threshold_json(a.extracted_threshold)}};
}

std::string term_table_csv(const len::LengthSequence& seq) {
    std::string out = "n,e_n,log2_r_n,delta_term,star_term\n";
    for (uint64_t d = 0; d <= seq.depth(); ++d) {
        out += std::to_string(-int64_t(d)) + ",";
        out += seq.exponent(d).get_str() + ",";
        if (d + 1 <= seq.depth()) out += seq.ratio_log2(d).get_str();
        out += ",";
        if (d + 1 <= seq.depth() && seq.levels[d].exact)
            out += rat_str(seq.delta_term(d));
        out += ",";
        if (d + 2 <= seq.depth() && seq.levels[d].exact)
            out += rat_str(seq.star_term(d));
        out += "\n";
    }
    return out;
}

json family_json(const brick::FamilyReport& r) {
    json clauses = json::array();
    for (const auto& c : r.clauses) clauses.push_back(clause_json(c));
    return json{{"schema_version", schema_version},
                {"clauses", clauses},
                {"max_intersection_ratio", rat_str(r.max_intersection_ratio)},
                {"pairs_checked", r.pairs_checked},
                {"all_pass", r.all_pass()}};
}

json brick_json(const brick::BrickReport& r) {
    json clauses = json::array();
    for (const auto& c : r.clauses) clauses.push_back(clause_json(c));
    return json{{"schema_version", schema_version},
                {"clauses", clauses},
                {"max_overlap", rat_str(r.max_overlap)},
                {"worst_pair", json::array({r.worst_z1a, r.worst_z1b})},
                {"pairs_checked", r.pairs_checked},
                {"exhaustive_overlap", r.exhaustive_overlap},
                {"all_pass", r.all_pass()}};
}

json geometric_json(const brick::GeometricReport& r) {
    return json{{"schema_version", schema_version},
                {"x2_uniform", r.x2_uniform},
                {"x0_x2_independent", r.x0_x2_independent},
                {"rho1_ok", r.rho1_ok},
                {"rho0_ok", r.rho0_ok},
                {"rho0_min", rat_str(r.rho0_min)},
                {"rho0_witness", json::array({r.rho0_witness_a, r.rho0_witness_b})},
                {"plane_pairs_checked", r.plane_pairs_checked},
                {"line_pairs_checked", r.line_pairs_checked},
                {"exhaustive_planes", r.exhaustive_planes},
                {"exhaustive_lines", r.exhaustive_lines},
                {"all_pass", r.all_pass()}};
}

json witness_json(const brick::WitnessReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels)
        levels.push_back(
            json{{"n", l.n}, {"is_state", l.is_state}, {"domain", l.domain}});
    return json{{"schema_version", schema_version},
                {"levels", levels},
                {"independent_uniform", r.independent_uniform},
                {"checked_exactly", r.checked_exactly},
                {"outcomes", r.outcomes},
                {"reconstruction_ok", r.reconstruction_ok},
                {"paths_checked", r.paths_checked}};
}

json marginals_json(const sw::MarginalReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels)
        levels.push_back(json{{"n", l.n},
                              {"ratio", l.ratio},
                              {"word_uniform", l.word_uniform},
                              {"joint_uniform", l.joint_uniform}});
    return json{{"schema_version", schema_version},
                {"levels", levels},
                {"entrance_law_ok", r.entrance_law_ok},
                {"innovations_independent", r.innovations_independent},
                {"outcomes", r.outcomes}};
}

json coupling_json(const cpl::CouplingReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels) {
        json lvl = interval_json(l.p_neq);
        lvl["level"] = -int64_t(l.d);
        lvl["neq"] = l.neq;
        levels.push_back(lvl);
    }
    json doc{{"schema_version", schema_version},
             {"replicates", r.replicates},
             {"levels", levels},
             {"analytic_bound", rat_str(r.analytic_bound)},
             {"final_p_neq", interval_json(r.final_p_neq)},
             {"final_bound_ok", r.final_bound_ok},
             {"per_step_ok", r.per_step_ok},
             {"all_odd_neq", interval_json(r.all_odd_neq)},
             {"necessity_bound", rat_str(r.necessity_bound)},
             {"necessity_checked", r.necessity_checked}};
    doc["necessity_ok"] = r.necessity_checked ? json(r.necessity_ok) : json();
    return doc;
}

std::string coupling_csv(const cpl::CouplingReport& r) {
    std::string out = "level,p_neq_estimate,ci_low,ci_high,bound,status\n";
    std::string bound = rat_str(r.analytic_bound);
    for (const auto& l : r.levels) {
        out += std::to_string(-int64_t(l.d)) + ",";
        out += std::to_string(l.p_neq.point) + ",";
        out += std::to_string(l.p_neq.low) + ",";
        out += std::to_string(l.p_neq.high) + ",";
        // the analytic bound targets level -1; deeper levels are context
        out += (l.d == 1 ? bound : "") + ",";
        out += (l.d == 1 ? (r.final_bound_ok ? "pass" : "fail") : "info");
        out += "\n";
    }
    return out;
}

json immersion_json(const cpl::ImmersionReport& r) {
    return json{{"schema_version", schema_version},
                {"immersed", r.immersed},
                {"witness", r.witness},
                {"checks", r.checks}};
}

json icosiness_json(const cpl::IcosinessProbe& p) {
    json strategies = json::array();
    for (const auto& [kind, val] : p.per_strategy) {
        const char* name = kind == cpl::StrategyKind::GreedyMaximal ? "greedy-maximal"
                           : kind == cpl::StrategyKind::Diagonal    ? "diagonal"
                                                                    : "independent";
        strategies.push_back(json{{"strategy", name}, {"p_neq", val}});
    }
    return json{{"schema_version", schema_version},
                {"delta", p.delta},
                {"analytic_bound", rat_str(p.analytic_bound)},
                {"min_p_neq", p.min_p_neq},
                {"negates_icosiness", p.negates_icosiness},
                {"strategies", strategies}};
}

std::filesystem::path write_versioned(const std::filesystem::path& dir,
                                      const std::string& stem, const std::string& ext,
                                      const std::string& content) {
    std::filesystem::create_directories(dir);
    auto candidate = dir / (stem + "." + ext);
    for (int v = 2; std::filesystem::exists(candidate); ++v)
        candidate = dir / (stem + ".v" + std::to_string(v) + "." + ext);
    std::ofstream out(candidate, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + candidate.string());
    out << content;
    return candidate;
}

} // namespace ftk::rep
