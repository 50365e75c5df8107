#pragma once

#include <cstdint>
#include <string>

#include "opsel/market_data.hpp"

namespace opsel {

enum class SynthProcess {
  alternating,     // asset 0 multiplies by up, down, up, ...; other assets flat
  random_walk,     // geometric random walk in log price
  mean_reverting,  // log price pulled back toward its start level
};

struct SynthSpec {
  SynthProcess process = SynthProcess::random_walk;
  std::size_t days = 0;    // price rows, >= 2
  std::size_t assets = 0;  // >= 1
  double base_price = 100.0;
  // alternating
  double up = 2.0;
  double down = 0.5;
  // random_walk / mean_reverting
  double drift = 0.0;
  double vol = 0.0;
  double reversion = 0.1;  // pull strength in [0, 1]
};

/// Deterministic given (spec, seed); every price strictly positive.
PriceMatrix synth_market(const SynthSpec& spec, std::uint64_t seed);

/// Parses the CLI pseudo-path grammar, e.g.
/// `synth:alternating:n=2001,m=2` or `synth:gbm:n=200,m=5,vol=0.02`.
SynthSpec parse_synth_spec(const std::string& token);

bool is_synth_token(const std::string& token);

}  // namespace opsel
