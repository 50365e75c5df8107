#pragma once

#include <string>
#include <utility>
#include <vector>

#include "opsel/market_data.hpp"
#include "opsel/numerics.hpp"
#include "opsel/strategies.hpp"

namespace opsel {

/// Proportional commission: every unit bought or sold costs gamma.
struct CostModel {
  double gamma = 0.0;
  void validate() const;
};

struct DayRecord {
  std::size_t day = 0;  // 1-based over relatives rows
  Portfolio target;     // b_t
  double gross_return = 0.0;
  double turnover = 0.0;  // L1 distance traded against the drifted holdings
  double net_return = 0.0;
  double wealth = 0.0;  // cumulative product of net returns, clamped at 0 on ruin
};

struct BacktestResult {
  StrategySpec strategy;
  std::string dataset;
  std::vector<DayRecord> records;
  double final_wealth = 0.0;
};

/// Net return and turnover for one day. The turnover baseline is the
/// price-adjusted portfolio carried from the prior close, so buy-and-hold
/// trades nothing after the initial purchase.
std::pair<double, double> day_factor(const Portfolio& target, std::span<const double> x,
                                     const Portfolio& prev_holdings, double gamma);

/// Day 1 holds the uniform portfolio bought from cash (turnover 1); each
/// later day asks the strategy for a target using information through the
/// previous close only.
BacktestResult run(const RelativeMatrix& data, const StrategySpec& spec,
                   const CostModel& cost, std::string dataset_name = "");

/// Frictionless single-asset diagnostic: hold the asset on days that follow
/// a down day, cash otherwise; returns the compound return.
double single_asset_down_day_probe(const PriceMatrix& prices);

}  // namespace opsel
