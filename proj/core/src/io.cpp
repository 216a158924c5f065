#include "nlqm/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlqm/error.hpp"

namespace nlqm {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw NumericError("cannot format number");
  return std::string(buf, end);
}

std::string format_shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericError("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_columns(std::ostream& out, const Grid& grid,
                   const std::vector<std::string>& names,
                   const std::vector<std::span<const double>>& columns) {
  if (names.size() != columns.size()) {
    throw ConfigError("column names and data disagree");
  }
  out << "# x";
  for (const auto& name : names) out << ' ' << name;
  out << '\n';
  for (std::size_t j = 0; j < grid.n(); ++j) {
    out << format_double(grid.x(j));
    for (const auto& c : columns) out << ' ' << format_double(c[j]);
    out << '\n';
  }
}

void write_field(std::ostream& out, const ScalarField& f) {
  write_columns(out, f.grid(), {"value"}, {f.values()});
}

void write_state(std::ostream& out, const MadelungField& state) {
  write_columns(out, state.grid(), {"R", "S"},
                {state.R().values(), state.S().values()});
}

ColumnFile read_columns(std::istream& in) {
  std::string line;
  std::vector<std::string> names;
  std::vector<double> xs;
  std::vector<std::vector<double>> cols;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!names.empty() || !xs.empty()) continue;
      std::istringstream ls(line.substr(1));
      std::string tok;
      std::string first;
      ls >> first;
      if (first != "x") throw ConfigError("column file: first column must be x");
      while (ls >> tok) names.push_back(tok);
      cols.resize(names.size());
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_double(tok));
    if (names.empty()) throw ConfigError("column file: missing '# x ...' header");
    if (row.size() != names.size() + 1) {
      throw ConfigError("column file: line " + std::to_string(lineno) +
                        " has " + std::to_string(row.size()) + " values");
    }
    xs.push_back(row[0]);
    for (std::size_t c = 0; c < names.size(); ++c) cols[c].push_back(row[c + 1]);
  }
  if (xs.size() < 2) throw ConfigError("column file: too few rows");
  Grid grid(xs.front(), xs.back(), xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (std::abs(xs[j] - grid.x(j)) > 1e-9 * (1.0 + std::abs(grid.x(j)))) {
      throw ConfigError("column file: x is not uniformly spaced");
    }
  }
  return {grid, std::move(names), std::move(cols)};
}

ScalarField read_field(std::istream& in) {
  ColumnFile f = read_columns(in);
  if (f.columns.size() != 1) throw ConfigError("field file needs two columns");
  return ScalarField(f.grid, std::move(f.columns[0]));
}

MadelungField read_state(std::istream& in) {
  ColumnFile f = read_columns(in);
  if (f.columns.size() != 2) throw ConfigError("state file needs x, R, S columns");
  for (double r : f.columns[0]) {
    if (r < 0.0) throw ConfigError("state file: R must be non-negative");
  }
  return MadelungField(ScalarField(f.grid, std::move(f.columns[0])),
                       ScalarField(f.grid, std::move(f.columns[1])));
}

void write_energy_row(std::ostream& out, std::string_view model, double t,
                      const EnergyReport& r) {
  out << model << ',' << format_double(t) << ',' << format_double(r.norm) << ','
      << format_double(r.e_qm_re) << ',' << format_double(r.e_qm_im) << ','
      << format_double(r.e_ft) << ',' << format_double(r.gap_re) << ','
      << format_double(r.gap_im) << ',' << format_double(r.hermiticity_defect)
      << '\n';
}

}  // namespace nlqm
