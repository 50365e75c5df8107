#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "opsel/numerics.hpp"

namespace opsel {

enum class StrategyKind { bah_u, crp_u, smr, smar, pamr, olmar, tco1, tco2 };

const char* strategy_display_name(StrategyKind kind);  // table headers, e.g. "TCO-1"
const char* strategy_token(StrategyKind kind);         // CLI names, e.g. "tco1"
StrategyKind strategy_from_token(const std::string& token);

/// All strategies listed in canonical reporting order.
std::span<const StrategyKind> all_strategies();

struct StrategySpec {
  StrategyKind kind = StrategyKind::bah_u;
  double epsilon = 0.0;    // PAMR return cap / OLMAR prediction target
  std::size_t window = 1;  // SMA window for SMAR and OLMAR
  double eta = 10.0;       // TCO aggressiveness
  double lambda = 0.0;     // TCO trade threshold, 10 * eta * gamma by default
  bool tco2_literal_predictor = false;  // divide the SMA by x_t instead of p_t

  /// Paper defaults: PAMR eps 0.5; OLMAR eps 10, w 5; SMAR w 5;
  /// TCO eta 10, lambda 10 * eta * cost_gamma, TCO-2 window 5.
  static StrategySpec defaults(StrategyKind kind, double cost_gamma = 0.0);

  void validate() const;
};

/// Per-backtest mutable state; steps must be applied in day order.
struct StrategyState {
  Portfolio current;        // b_t, the target held during the current day
  Portfolio adjusted;       // the drifted holdings after the last close
  PriceWindow price_window; // reconstructed price levels, base 1
  std::vector<double> levels;
  std::size_t day_index = 0;  // relatives observed so far
};

StrategyState make_state(const StrategySpec& spec, std::size_t assets);

Portfolio initial_portfolio(std::size_t m);

/// Holdings after one day of price drift: (b ⊙ x) / (b · x).
Portfolio price_adjusted(const Portfolio& b, std::span<const double> x);

/// Feeds the newly revealed relatives row to the strategy; updates the state
/// and returns the target portfolio for the next day.
Portfolio advance(StrategyState& state, const StrategySpec& spec,
                  std::span<const double> x);

// Individual update rules, exposed for testing against independent oracles.

/// Everything on the worst previous-day performers, ties split evenly.
Portfolio step_smr(std::span<const double> x);

/// Everything on the highest SMA-predicted relatives, ties split evenly.
Portfolio step_smar(const PriceWindow& window, std::size_t w);

/// Passive-aggressive cap on the previous day's return: no trade while
/// b·x <= eps, otherwise a Lagrangian step away from x followed by
/// projection onto the simplex.
Portfolio step_pamr(const Portfolio& b, std::span<const double> x, double epsilon);

/// Same scheme driven by the SMA prediction, constraint b·x̃ >= eps.
Portfolio step_olmar(const Portfolio& b, const PriceWindow& window, std::size_t w,
                     double epsilon);

/// Thresholded update before normalization: shifts the drifted holdings by
/// eta-scaled centered prediction scores, suppressing moves below lambda.
std::vector<double> tco_pre_projection(const Portfolio& adjusted,
                                       std::span<const double> x_tilde, double eta,
                                       double lambda);

/// Full TCO step; returns the drifted holdings untouched when every shift
/// is below the threshold.
Portfolio step_tco(const Portfolio& adjusted, std::span<const double> x_tilde,
                   double eta, double lambda);

}  // namespace opsel
