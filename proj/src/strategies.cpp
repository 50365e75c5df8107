#include "opsel/strategies.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "opsel/errors.hpp"

namespace opsel {

namespace {

// Ties in argmin/argmax are decided within this absolute tolerance; exact
// floating-point equality would be platform-fragile.
constexpr double kTieTolerance = 1e-12;

// Cross-sectional variance below this carries no reversion signal.
constexpr double kDegenerateVariance = 1e-15;

double mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

Portfolio spread_over_extremes(std::span<const double> scores, bool maximize) {
  double extreme = scores[0];
  for (double s : scores) extreme = maximize ? std::max(extreme, s) : std::min(extreme, s);
  std::size_t count = 0;
  for (double s : scores) {
    if (std::abs(s - extreme) <= kTieTolerance) ++count;
  }
  std::vector<double> weights(scores.size(), 0.0);
  const double share = 1.0 / static_cast<double>(count);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (std::abs(scores[j] - extreme) <= kTieTolerance) weights[j] = share;
  }
  return Portfolio::from_weights(std::move(weights));
}

// Shared passive-aggressive core. `sense_up` selects the >= eps constraint
// (step toward the signal) versus <= eps (step away from it).
Portfolio pa_update(const Portfolio& b, std::span<const double> signal, double epsilon,
                    bool sense_up) {
  const double value = dot(b.span(), signal);
  if (sense_up ? value >= epsilon : value <= epsilon) {
    return b;  // passive branch returns the portfolio untouched
  }
  const double center = mean(signal);
  double variance = 0.0;
  for (double s : signal) variance += (s - center) * (s - center);
  const double tau =
      variance < kDegenerateVariance
          ? 0.0
          : (sense_up ? (epsilon - value) : (value - epsilon)) / variance;
  std::vector<double> shifted(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double step = tau * (signal[j] - center);
    shifted[j] = sense_up ? b[j] + step : b[j] - step;
  }
  return project_simplex(shifted);
}

void check_positive_row(std::span<const double> x) {
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("price relative rows must be strictly positive");
    }
  }
}

}  // namespace

const char* strategy_display_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::bah_u: return "BAH_U";
    case StrategyKind::crp_u: return "CRP_U";
    case StrategyKind::smr: return "SMR";
    case StrategyKind::smar: return "SMAR";
    case StrategyKind::pamr: return "PAMR";
    case StrategyKind::olmar: return "OLMAR";
    case StrategyKind::tco1: return "TCO-1";
    case StrategyKind::tco2: return "TCO-2";
  }
  return "?";
}

const char* strategy_token(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::bah_u: return "bah";
    case StrategyKind::crp_u: return "crp";
    case StrategyKind::smr: return "smr";
    case StrategyKind::smar: return "smar";
    case StrategyKind::pamr: return "pamr";
    case StrategyKind::olmar: return "olmar";
    case StrategyKind::tco1: return "tco1";
    case StrategyKind::tco2: return "tco2";
  }
  return "?";
}

std::span<const StrategyKind> all_strategies() {
  static constexpr std::array<StrategyKind, 8> kAll = {
      StrategyKind::bah_u, StrategyKind::crp_u, StrategyKind::smr,
      StrategyKind::smar,  StrategyKind::pamr,  StrategyKind::olmar,
      StrategyKind::tco1,  StrategyKind::tco2};
  return kAll;
}

StrategyKind strategy_from_token(const std::string& token) {
  for (StrategyKind kind : all_strategies()) {
    if (token == strategy_token(kind)) return kind;
  }
  throw ValidationError("unknown strategy \"" + token +
                        "\"; expected one of bah, crp, smr, smar, pamr, olmar, tco1, tco2");
}

StrategySpec StrategySpec::defaults(StrategyKind kind, double cost_gamma) {
  StrategySpec spec;
  spec.kind = kind;
  switch (kind) {
    case StrategyKind::pamr:
      spec.epsilon = 0.5;
      break;
    case StrategyKind::olmar:
      spec.epsilon = 10.0;
      spec.window = 5;
      break;
    case StrategyKind::smar:
      spec.window = 5;
      break;
    case StrategyKind::tco1:
    case StrategyKind::tco2:
      spec.eta = 10.0;
      spec.lambda = 10.0 * spec.eta * cost_gamma;
      spec.window = 5;
      break;
    default:
      break;
  }
  return spec;
}

void StrategySpec::validate() const {
  switch (kind) {
    case StrategyKind::pamr:
    case StrategyKind::olmar:
      if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
      break;
    case StrategyKind::tco1:
    case StrategyKind::tco2:
      if (!(eta > 0.0)) throw ValidationError("eta must be positive");
      if (!(lambda >= 0.0)) throw ValidationError("lambda must be non-negative");
      break;
    default:
      break;
  }
  if (window < 1) throw ValidationError("window must be at least 1");
}

StrategyState make_state(const StrategySpec& spec, std::size_t assets) {
  spec.validate();
  // TCO-2 always averages over five rows, whatever the configured window.
  std::size_t span = std::max<std::size_t>(spec.window, 1);
  if (spec.kind == StrategyKind::tco2) span = std::max<std::size_t>(span, 5);
  return StrategyState{Portfolio::uniform(assets), Portfolio::uniform(assets),
                       PriceWindow(assets, span + 1),
                       std::vector<double>(assets, 1.0), 0};
}

Portfolio initial_portfolio(std::size_t m) { return Portfolio::uniform(m); }

Portfolio price_adjusted(const Portfolio& b, std::span<const double> x) {
  check_positive_row(x);
  const double gross = dot(b.span(), x);
  if (!(gross > 0.0)) {
    throw ValidationError("degenerate portfolio return");  // unreachable for valid inputs
  }
  std::vector<double> drifted(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) drifted[j] = b[j] * x[j] / gross;
  return Portfolio::from_weights(std::move(drifted));
}

Portfolio step_smr(std::span<const double> x) {
  check_positive_row(x);
  return spread_over_extremes(x, /*maximize=*/false);
}

Portfolio step_smar(const PriceWindow& window, std::size_t w) {
  const std::vector<double> prediction = predicted_relative_sma(window, w);
  return spread_over_extremes(prediction, /*maximize=*/true);
}

Portfolio step_pamr(const Portfolio& b, std::span<const double> x, double epsilon) {
  check_positive_row(x);
  return pa_update(b, x, epsilon, /*sense_up=*/false);
}

Portfolio step_olmar(const Portfolio& b, const PriceWindow& window, std::size_t w,
                     double epsilon) {
  const std::vector<double> prediction = predicted_relative_sma(window, w);
  return pa_update(b, prediction, epsilon, /*sense_up=*/true);
}

std::vector<double> tco_pre_projection(const Portfolio& adjusted,
                                       std::span<const double> x_tilde, double eta,
                                       double lambda) {
  const double denom = dot(adjusted.span(), x_tilde);
  std::vector<double> score(x_tilde.size());
  for (std::size_t j = 0; j < score.size(); ++j) score[j] = x_tilde[j] / denom;
  const double center = mean(score);

  std::vector<double> next(score.size());
  for (std::size_t j = 0; j < score.size(); ++j) {
    const double shift = eta * (score[j] - center);
    const double magnitude = std::max(std::abs(shift) - lambda, 0.0);
    next[j] = adjusted[j] + (shift >= 0.0 ? magnitude : -magnitude);
  }
  return next;
}

Portfolio step_tco(const Portfolio& adjusted, std::span<const double> x_tilde,
                   double eta, double lambda) {
  const std::vector<double> next = tco_pre_projection(adjusted, x_tilde, eta, lambda);
  bool traded = false;
  for (std::size_t j = 0; j < next.size(); ++j) {
    if (next[j] != adjusted[j]) {
      traded = true;
      break;
    }
  }
  if (!traded) return adjusted;  // every shift suppressed, keep the drifted holdings
  return project_simplex(next);
}

Portfolio advance(StrategyState& state, const StrategySpec& spec,
                  std::span<const double> x) {
  if (x.size() != state.current.size()) {
    throw ValidationError("relatives row size does not match the portfolio");
  }
  check_positive_row(x);

  state.adjusted = price_adjusted(state.current, x);
  for (std::size_t j = 0; j < state.levels.size(); ++j) state.levels[j] *= x[j];
  state.price_window.push(state.levels);
  ++state.day_index;

  Portfolio next = state.current;
  switch (spec.kind) {
    case StrategyKind::bah_u:
      next = state.adjusted;
      break;
    case StrategyKind::crp_u:
      next = Portfolio::uniform(state.current.size());
      break;
    case StrategyKind::smr:
      next = step_smr(x);
      break;
    case StrategyKind::smar:
      next = step_smar(state.price_window, spec.window);
      break;
    case StrategyKind::pamr:
      next = step_pamr(state.current, x, spec.epsilon);
      break;
    case StrategyKind::olmar:
      next = step_olmar(state.current, state.price_window, spec.window, spec.epsilon);
      break;
    case StrategyKind::tco1: {
      const std::vector<double> prediction = predicted_relative_inverse(x);
      next = step_tco(state.adjusted, prediction, spec.eta, spec.lambda);
      break;
    }
    case StrategyKind::tco2: {
      std::vector<double> prediction;
      if (spec.tco2_literal_predictor) {
        // Divides the price average by the relatives row as printed in the
        // original update rule; kept behind a flag for comparison runs.
        prediction = sma(state.price_window, 5);
        for (std::size_t j = 0; j < prediction.size(); ++j) prediction[j] /= x[j];
      } else {
        prediction = predicted_relative_sma(state.price_window, 5);
      }
      next = step_tco(state.adjusted, prediction, spec.eta, spec.lambda);
      break;
    }
  }
  state.current = next;
  return next;
}

}  // namespace opsel
