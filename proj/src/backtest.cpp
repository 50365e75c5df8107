#include "opsel/backtest.hpp"

#include <cmath>
#include <string>

#include "opsel/errors.hpp"

namespace opsel {

void CostModel::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ValidationError("transaction cost rate " + std::to_string(gamma) +
                          " outside [0, 1]");
  }
}

std::pair<double, double> day_factor(const Portfolio& target, std::span<const double> x,
                                     const Portfolio& prev_holdings, double gamma) {
  const double turnover = l1_distance(target.span(), prev_holdings.span());
  const double gross = dot(target.span(), x);
  return {gross * (1.0 - gamma * turnover), turnover};
}

BacktestResult run(const RelativeMatrix& data, const StrategySpec& spec,
                   const CostModel& cost, std::string dataset_name) {
  spec.validate();
  cost.validate();

  const std::size_t n = data.days();
  const std::size_t m = data.assets();
  StrategyState state = make_state(spec, m);

  BacktestResult result{spec, std::move(dataset_name), {}, 0.0};
  result.records.reserve(n);

  // Gross returns and cost factors accumulate separately so that a cost-only
  // change rescales wealth without perturbing the return product.
  double gross_product = 1.0;
  double cost_product = 1.0;
  bool ruined = false;

  for (std::size_t t = 0; t < n; ++t) {
    const auto x = data.row(t);
    const Portfolio& target = state.current;
    const double gross = dot(target.span(), x);
    // Day 1 buys the uniform portfolio out of cash: one unit traded.
    const auto [net, turnover] =
        t == 0 ? std::pair{gross * (1.0 - cost.gamma), 1.0}
               : day_factor(target, x, state.adjusted, cost.gamma);
    const double cost_factor = 1.0 - cost.gamma * turnover;

    if (!ruined) {
      gross_product *= gross;
      cost_product *= cost_factor;
    }
    if (net <= 0.0) ruined = true;  // possible only when gamma * turnover >= 1
    const double wealth = ruined ? 0.0 : gross_product * cost_product;

    result.records.push_back(DayRecord{t + 1, target, gross, turnover, net, wealth});
    advance(state, spec, x);
  }

  result.final_wealth = result.records.back().wealth;
  return result;
}

double single_asset_down_day_probe(const PriceMatrix& prices) {
  if (prices.assets() != 1) {
    throw ValidationError("down-day probe expects exactly one asset, got " +
                          std::to_string(prices.assets()));
  }
  if (!prices.complete()) {
    throw DataError("down-day probe needs a fully populated price series");
  }
  double wealth = 1.0;
  double prev_relative = 1.0;  // day 1 holds cash
  for (std::size_t r = 1; r < prices.days(); ++r) {
    const double relative = prices.at(r, 0) / prices.at(r - 1, 0);
    if (prev_relative < 1.0) wealth *= relative;
    prev_relative = relative;
  }
  return wealth;
}

}  // namespace opsel
