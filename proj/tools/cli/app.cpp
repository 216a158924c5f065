#include "app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "nlqm/error.hpp"

namespace nlqm::cli {

namespace {

struct Options {
  std::string config_path;
  std::string out;
  std::string format;
  std::string model;
  std::vector<std::string> sets;
  std::vector<double> lengths{32.0, 64.0};
};

// A bare identifier that is not a slot is a misspelt model name rather than
// an inline density.
bool looks_like_name(std::string_view text) {
  static constexpr std::array<std::string_view, 7> kSlots{
      "R", "S", "dR", "dS", "ddR", "ddS", "x"};
  const bool identifier = !text.empty() && std::ranges::all_of(text, [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
  return identifier && std::ranges::find(kSlots, text) == kSlots.end();
}

RunConfig load(const Options& o) {
  ConfigFile file;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("cannot open config '" + o.config_path + "'");
    file = parse_config(in, o.config_path);
  }
  if (!o.model.empty()) {
    auto& section = file.sections["model"];
    const auto names = catalog_names();
    if (std::ranges::find(names, o.model) != names.end()) {
      section.erase("density");
      section["name"] = o.model;
    } else if (looks_like_name(o.model)) {
      throw ConfigError("unknown model '" + o.model +
                        "' (run 'nlqm catalog' for the built-in names)");
    } else {
      section["density"] = o.model;
    }
  }
  for (const std::string& s : o.sets) apply_override(file, s);
  if (!o.out.empty()) file.set("", "out", o.out);
  if (!o.format.empty()) file.set("", "format", o.format);
  return resolve(file);
}

// Writes to a sibling temp file and renames it over the target so readers
// never see a partial result.
void write_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
    f << content;
    f.close();
    if (!f) throw ConfigError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ConfigError("cannot move output to '" + path + "'");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Energy ambiguity toolkit for nonlinear Schroedinger models",
               "nlqm"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Config file (key=value sections)");
  app.add_option("--out", o.out, "Write the result to this file");
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--model", o.model, "Catalog model name or inline density");
  app.add_option("--set", o.sets, "Override: section.key=value or key=value")
      ->take_all();

  using Command = std::function<int(const RunConfig&, std::ostream&)>;
  Command command;
  auto add = [&](const char* name, const char* help, Command c) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&command, c] { command = c; });
    return sub;
  };
  add("energy", "E_QM, E_FT, their gap and the hermiticity defect", cmd_energy);
  add("derive", "Dump dL/dR, dL/dS and the nonlinear Hamiltonian", cmd_derive);
  add("check", "Homogeneity, hermiticity and variational cross-checks",
      cmd_check);
  add("evolve", "Time-evolve and record conserved quantities", cmd_evolve);
  CLI::App* scan = add("scan-domain", "Gap on domains of several lengths",
                       [&o](const RunConfig& rc, std::ostream& os) {
                         return cmd_scan_domain(rc, o.lengths, os);
                       });
  scan->add_option("--lengths", o.lengths, "Domain lengths")
      ->delimiter(',')
      ->expected(1, -1);
  add("catalog", "List the built-in models", cmd_catalog);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  std::ostringstream buffer;
  int code = kSuccess;
  std::string target;
  try {
    const RunConfig rc = load(o);
    target = rc.out;
    code = command(rc, buffer);
  } catch (const ConfigError& e) {
    err << "nlqm: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    err << "nlqm: numeric error: " << e.what() << '\n';
    code = kNumericError;
  } catch (const std::exception& e) {
    err << "nlqm: error: " << e.what() << '\n';
    return kConfigError;
  }

  // Partial results (an aborted evolution) are still emitted.
  if (code == kNumericError && buffer.view().empty()) return code;
  if (target.empty()) {
    out << buffer.view();
    return code;
  }
  try {
    write_atomically(target, buffer.str());
  } catch (const ConfigError& e) {
    err << "nlqm: " << e.what() << '\n';
    return kConfigError;
  }
  return code;
}

}  // namespace nlqm::cli
