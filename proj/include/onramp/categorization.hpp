#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "onramp/scenario.hpp"

namespace onramp {

/// Decision tree over the signed PETs of the non-degenerate challengers:
///   none                       -> free
///   any PET exactly 0          -> ambiguous
///   one                        -> behind (PET > 0) / in front (PET < 0)
///   two or more, mixed signs   -> into
///   two or more, same sign     -> sign of the PET of minimum magnitude
Category categorize(std::span<const double> pets);

/// Same, skipping degenerate results.
Category categorize(std::span<const PetResult> challengers);

/// Sum of |PET| of the nearest lead (negative PET) and nearest rear
/// (positive PET) challenger. Throws std::invalid_argument unless the
/// challengers categorize as into.
double accepted_gap(std::span<const PetResult> challengers);
double accepted_gap(std::span<const double> pets);

/// True iff any non-degenerate |PET| is below the threshold.
bool flag_critical(const ScenarioRecord& rec, double threshold_s = 1.0);

/// Fills category, accepted_gap and critical from rec.challengers.
void finalize_record(ScenarioRecord& rec, double critical_threshold_s = 1.0);

/// One-line JSON object (no trailing newline).
std::string record_to_json(const ScenarioRecord& rec);
ScenarioRecord record_from_json(const std::string& line);

void write_records_jsonl(std::ostream& out, std::span<const ScenarioRecord> records);
std::vector<ScenarioRecord> read_records_jsonl(std::istream& in, const std::string& source = "<records>");

}  // namespace onramp
