#include "opsel/summary.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "opsel/errors.hpp"

namespace opsel {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void mark_top_two(const std::vector<double>& row, std::vector<bool>& marks) {
  marks.assign(row.size(), false);
  const std::size_t winners = std::min<std::size_t>(2, row.size());
  std::vector<std::size_t> order(row.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Ties resolve to the leftmost column.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  for (std::size_t i = 0; i < winners; ++i) marks[order[i]] = true;
}

std::string join_row(const std::vector<std::string>& cells, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::markdown) {
    out << "|";
    for (const auto& c : cells) out << ' ' << c << " |";
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << cells[i];
    }
  }
  out << '\n';
  return out.str();
}

std::string markdown_divider(std::size_t columns) {
  std::ostringstream out;
  out << "|";
  for (std::size_t i = 0; i < columns; ++i) out << " --- |";
  out << '\n';
  return out.str();
}

}  // namespace

std::string format_wealth(double value) {
  if (value == 0.0) return "0.00";
  if (value >= 1000.0 || value < 0.005) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", value);
    return buf;
  }
  return fixed(value, 2);
}

SummaryTable summarize(const std::vector<BacktestResult>& results) {
  if (results.empty()) throw ValidationError("nothing to summarize");

  SummaryTable table;
  std::map<std::string, std::size_t> row_of;
  std::map<std::string, std::size_t> col_of;

  // Canonical strategy column order, then anything else by first appearance.
  for (StrategyKind kind : all_strategies()) {
    for (const auto& r : results) {
      if (r.strategy.kind == kind) {
        col_of[strategy_display_name(kind)] = table.strategy_names.size();
        table.strategy_names.push_back(strategy_display_name(kind));
        break;
      }
    }
  }
  for (const auto& r : results) {
    if (row_of.emplace(r.dataset, table.dataset_names.size()).second) {
      table.dataset_names.push_back(r.dataset);
    }
  }

  table.wealth.assign(table.dataset_names.size(),
                      std::vector<double>(table.strategy_names.size(), 0.0));
  for (const auto& r : results) {
    const std::size_t row = row_of.at(r.dataset);
    const std::size_t col = col_of.at(strategy_display_name(r.strategy.kind));
    table.wealth[row][col] = r.final_wealth;
  }

  table.top_two.resize(table.wealth.size());
  for (std::size_t row = 0; row < table.wealth.size(); ++row) {
    mark_top_two(table.wealth[row], table.top_two[row]);
  }
  return table;
}

std::string render(const SummaryTable& table, TableFormat format) {
  std::ostringstream out;
  std::vector<std::string> header{"Data"};
  header.insert(header.end(), table.strategy_names.begin(), table.strategy_names.end());
  out << join_row(header, format);
  if (format == TableFormat::markdown) out << markdown_divider(header.size());

  for (std::size_t row = 0; row < table.dataset_names.size(); ++row) {
    std::vector<std::string> cells{table.dataset_names[row]};
    for (std::size_t col = 0; col < table.strategy_names.size(); ++col) {
      std::string cell = format_wealth(table.wealth[row][col]);
      if (format == TableFormat::markdown && table.top_two[row][col]) {
        cell = "**" + cell + "**";
      }
      cells.push_back(std::move(cell));
    }
    out << join_row(cells, format);
  }
  return out.str();
}

std::string render_describe(const std::vector<DatasetSummary>& rows, TableFormat format) {
  std::ostringstream out;
  const std::vector<std::string> header{"Name", "Period", "Days", "Assets", "Max", "Min"};
  out << join_row(header, format);
  if (format == TableFormat::markdown) out << markdown_divider(header.size());
  for (const auto& s : rows) {
    out << join_row({s.name, s.first_date + " - " + s.last_date, std::to_string(s.days),
                     std::to_string(s.assets), fixed(s.max_relative, 4),
                     fixed(s.min_relative, 4)},
                    format);
  }
  return out.str();
}

std::string render_run_csv(const BacktestResult& result) {
  std::ostringstream out;
  out << "day,gross_return,turnover,net_return,wealth\n";
  for (const auto& rec : result.records) {
    out << rec.day << ',' << shortest(rec.gross_return) << ',' << shortest(rec.turnover)
        << ',' << shortest(rec.net_return) << ',' << shortest(rec.wealth) << '\n';
  }
  return out.str();
}

}  // namespace opsel
