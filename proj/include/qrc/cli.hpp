#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qrc {

inline const std::vector<std::string> kSubcommands{
    "populations", "sinesquare", "mackeyglass", "kerr-map", "kerr-sweep", "kerr-isolation", "selftest"};

struct CliInvocation {
  std::string subcommand;
  std::string config_path;  // empty: built-in defaults
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // "section.key=value"
  std::optional<std::uint64_t> seed;
  int workers = 0;  // 0: OpenMP default
  std::string format = "csv";  // table format: csv or json
};

/// Runs one subcommand. Writes <experiment>-<hash8>.{csv,json} and
/// <experiment>-<hash8>-summary.json into out_dir and prints the summary to
/// `out`. Returns 0 on success; diagnostics go to `err`.
int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and dispatches. Unknown subcommands print usage and
/// return nonzero.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SelftestCheck {
  std::string name;
  bool passed;
  std::string detail;
};

/// Analytic-oracle checks on the simulation and readout code.
std::vector<SelftestCheck> run_selftest();

}  // namespace qrc
