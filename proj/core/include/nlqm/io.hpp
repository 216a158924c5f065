#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlqm/energy.hpp"
#include "nlqm/grid.hpp"

namespace nlqm {

/// 17 significant digits, '.' decimal point, independent of the locale.
std::string format_double(double v);

/// Shortest text that round-trips to the same double.
std::string format_shortest(double v);

/// Locale-independent parse of a whole string. Throws ConfigError.
double parse_double(std::string_view text);

/// "# x value" followed by one "x value" line per node.
void write_field(std::ostream& out, const ScalarField& f);

/// "# x R S".
void write_state(std::ostream& out, const MadelungField& state);

/// Multi-column dump: "# x <names...>" then one row per node.
void write_columns(std::ostream& out, const Grid& grid,
                   const std::vector<std::string>& names,
                   const std::vector<std::span<const double>>& columns);

/// Reads a column file written by write_field / write_state / write_columns.
/// The x column must be uniform with an odd node count. Throws ConfigError.
struct ColumnFile {
  Grid grid;
  std::vector<std::string> names;             // excluding x
  std::vector<std::vector<double>> columns;   // excluding x
};
ColumnFile read_columns(std::istream& in);

ScalarField read_field(std::istream& in);
MadelungField read_state(std::istream& in);

inline constexpr std::string_view kEnergyCsvHeader =
    "model,t,norm,e_qm_re,e_qm_im,e_ft,gap_re,gap_im,herm_defect";

void write_energy_row(std::ostream& out, std::string_view model, double t,
                      const EnergyReport& r);

}  // namespace nlqm
