#pragma once

#include <ostream>
#include <vector>

#include "config.hpp"

namespace nlqm::cli {

// Each command writes its result to `out` in rc.format and returns an exit
// code. Library errors propagate as exceptions.

int cmd_energy(const RunConfig& rc, std::ostream& out);
int cmd_derive(const RunConfig& rc, std::ostream& out);
int cmd_check(const RunConfig& rc, std::ostream& out);
int cmd_evolve(const RunConfig& rc, std::ostream& out);
int cmd_scan_domain(const RunConfig& rc, const std::vector<double>& lengths,
                    std::ostream& out);
int cmd_catalog(const RunConfig& rc, std::ostream& out);

/// Thresholds used by cmd_check.
inline constexpr double kHermiticityTol = 1e-6;
inline constexpr double kGateauxTol = 1e-3;
inline constexpr double kGateauxEps = 1e-6;

}  // namespace nlqm::cli
