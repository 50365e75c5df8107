#pragma once

#include <string>
#include <vector>

#include "opsel/backtest.hpp"
#include "opsel/market_data.hpp"

namespace opsel {

enum class TableFormat { csv, markdown };

/// Dataset rows by strategy columns of final wealth, with the top two
/// results of each row marked.
struct SummaryTable {
  std::vector<std::string> strategy_names;
  std::vector<std::string> dataset_names;
  std::vector<std::vector<double>> wealth;  // [row][column]
  std::vector<std::vector<bool>> top_two;
};

SummaryTable summarize(const std::vector<BacktestResult>& results);

/// Exact zero prints 0.00; values >= 1000 or < 0.005 use scientific
/// notation like 4.39e+15; everything else two decimals.
std::string format_wealth(double value);

/// Markdown rendering bolds the marked cells; CSV keeps plain numbers.
std::string render(const SummaryTable& table, TableFormat format);

std::string render_describe(const std::vector<DatasetSummary>& rows, TableFormat format);

/// Per-day records with columns day,gross_return,turnover,net_return,wealth.
std::string render_run_csv(const BacktestResult& result);

}  // namespace opsel
