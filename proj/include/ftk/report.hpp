#pragma once
// Machine-readable reports: versioned JSON documents, plot-ready CSV term
// tables, and the append-only file writer. Exact rationals are serialized
// as "p/q" strings; every JSON document carries schema_version.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ftk/coupling.hpp"
#include "ftk/geometry.hpp"
#include "ftk/glue.hpp"
#include "ftk/lengths.hpp"
#include "ftk/split_words.hpp"

namespace ftk::rep {

inline constexpr int schema_version = 1;

using json = nlohmann::ordered_json;

// deterministic rendering used for every report file
std::string dump(const json& doc);

json verdict_json(const len::SeriesVerdict& v);
json star_json(const len::StarReport& s);
json threshold_json(const len::ThresholdVerdict& t);
// full classification bundle: (delta), (box), (star), threshold
json classify_json(const len::LengthSequence& seq);
json extraction_json(const len::ExtractionAnalysis& a);

// CSV columns: n, e_n, log2_r_n, delta_term, star_term ("p/q" or "" when
// not computable at that index)
std::string term_table_csv(const len::LengthSequence& seq);

json family_json(const brick::FamilyReport& r);
json brick_json(const brick::BrickReport& r);
json geometric_json(const brick::GeometricReport& r);
json witness_json(const brick::WitnessReport& r);
json marginals_json(const sw::MarginalReport& r);

json coupling_json(const cpl::CouplingReport& r);
// CSV columns: level, p_neq_estimate, ci_low, ci_high, bound, status
std::string coupling_csv(const cpl::CouplingReport& r);
json immersion_json(const cpl::ImmersionReport& r);
json icosiness_json(const cpl::IcosinessProbe& p);

// Append-only writing: never overwrites. The first run writes
// <stem>.<ext>; later runs with the same stem write versioned siblings
// <stem>.v2.<ext>, <stem>.v3.<ext>, ... Returns the path written.
std::filesystem::path write_versioned(const std::filesystem::path& dir,
                                      const std::string& stem,
                                      const std::string& ext,
                                      const std::string& content);

} // namespace ftk::rep
