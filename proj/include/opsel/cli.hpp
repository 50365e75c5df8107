#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opsel/market_data.hpp"
#include "opsel/strategies.hpp"
#include "opsel/summary.hpp"

namespace opsel {

struct RunConfig {
  std::vector<std::string> data;  // file paths or synth:... tokens
  InputKind input_kind = InputKind::prices;
  std::vector<StrategyKind> strategies;
  std::vector<double> gammas;
  std::optional<double> epsilon;
  std::optional<std::size_t> window;
  std::optional<double> eta;
  bool tco2_literal_eq10 = false;
  TableFormat format = TableFormat::csv;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;

  void validate() const;
};

/// Loads a CLI dataset argument: a CSV path, or a synth:... token generated
/// with the given seed.
DatasetFile load_cli_dataset(const std::string& token, InputKind kind,
                             std::uint64_t seed);

/// Executes the full (dataset x strategy x gamma) grid and writes one
/// per-run CSV per cell plus one summary table per gamma. Nothing is
/// written unless every run succeeds. Returns the paths written.
std::vector<std::filesystem::path> cmd_run(const RunConfig& config);

/// Exit codes: 0 success, 1 validation error, 2 data error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opsel
