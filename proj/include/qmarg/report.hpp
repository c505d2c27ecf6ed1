#pragma once

// JSON and TSV serialisation of the reports printed by the command-line tool.
// Exact values are written as {"exact": "num/den", "value": <double>}.
// docs/report.schema.json describes the envelope and every result kind.

#include "qmarg/ame.hpp"
#include "qmarg/codes.hpp"
#include "qmarg/hierarchy.hpp"
#include "qmarg/rational.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qmarg::report {

using nlohmann::json;

inline constexpr const char* schema_id = "qmarg-report/1";

json fraction(const Rational& q);
json fractions(const std::vector<Rational>& v);

/// {"schema": ..., "command": command, "result": result}
json envelope(const std::string& command, json result);

json to_json(const ame::FeasibilityReport& r);
/// x always; p and q when `eigenvalues` is set.
json to_json(const ame::AmeCandidate& c, bool eigenvalues);
json to_json(const hierarchy::Certificate& c);
json to_json(const codes::CodeReport& r);
json to_json(const codes::VerifyReport& r);
json to_json(const codes::CodeParams& p);

/// Column order is fixed: n, d, verdict, violated, witness, witness_value.
inline constexpr const char* scan_tsv_header = "n\td\tverdict\tviolated\twitness\twitness_value";
std::string scan_tsv(const std::vector<ame::FeasibilityReport>& rows);

} // namespace qmarg::report
