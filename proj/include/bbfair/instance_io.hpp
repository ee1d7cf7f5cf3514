#pragma once

#include "bbfair/model.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace bbfair {

/// Parses a number given as a JSON number or as a string "p/q" or "0.25".
/// `field` names the location in error messages.
double parse_number(const nlohmann::json& value, const std::string& field);

/// Instance document: {"entitlements": [...], "requirements": [[...], ...],
/// "users": [...], "resources": [...]}; the name arrays are optional.
/// Throws InputError with a line/column or field diagnostic. The instance is
/// not validated.
ProblemInstance parse_instance(std::string_view text);

ProblemInstance load_instance(const std::string& path);

nlohmann::json instance_to_json(const ProblemInstance& inst);

/// Accepts a JSON array, a JSON object with key "x", or a comma-separated
/// list; entries may be fraction strings.
Allocation parse_allocation(std::string_view text);

/// Scales the entitlements to sum to 1. Throws InputError if they sum to 0.
void renormalize_entitlements(ProblemInstance& inst);

}  // namespace bbfair
