#pragma once

#include "bbfair/model.hpp"

#include <string>
#include <vector>

namespace bbfair {

/// Names of the bundled example instances.
std::vector<std::string> fixture_names();

bool has_fixture(const std::string& name);

/// Throws InputError for an unknown name.
ProblemInstance fixture(const std::string& name);

/// Two users with equal entitlements; user 1 requests (1/2, 0, ..., 0, 1) and
/// user 2 requests (1, 1, ..., 1, 0) with `middles` middle resources.
ProblemInstance utilization_instance(std::size_t middles);

}  // namespace bbfair
