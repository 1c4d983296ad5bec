#pragma once

#include <string>

#include "uavtraj/environment.hpp"

namespace uavtraj::io {

/// Versioned, human-readable scenario file (JSON). Occupancy and analytic
/// columns are both stored; load re-derives occupancy and cross-checks the
/// columns so the two views cannot drift apart.
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

/// Resolve "builtin:two_obstacles" / "builtin:random_columns" (with the
/// given count and seed) or else treat the reference as a file path.
Scenario resolve_scenario(const std::string& reference, int random_count,
                          std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace uavtraj::io
