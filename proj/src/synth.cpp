#include "opsel/synth.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "opsel/errors.hpp"

namespace opsel {

namespace {

void validate(const SynthSpec& spec) {
  if (spec.days < 2) throw ValidationError("synthetic market needs at least 2 days");
  if (spec.days > 100000) throw ValidationError("synthetic market capped at 100000 days");
  if (spec.assets < 1) throw ValidationError("synthetic market needs at least 1 asset");
  if (!(spec.base_price > 0.0)) throw ValidationError("base price must be positive");
  switch (spec.process) {
    case SynthProcess::alternating:
      if (!(spec.up > 0.0) || !(spec.down > 0.0)) {
        throw ValidationError("alternating ratios must be positive");
      }
      break;
    case SynthProcess::random_walk:
      if (!(spec.vol >= 0.0)) throw ValidationError("volatility must be non-negative");
      break;
    case SynthProcess::mean_reverting:
      if (!(spec.vol >= 0.0)) throw ValidationError("volatility must be non-negative");
      if (!(spec.reversion >= 0.0 && spec.reversion <= 1.0)) {
        throw ValidationError("reversion strength must lie in [0, 1]");
      }
      break;
  }
}

std::vector<std::string> make_dates(std::size_t n) {
  std::vector<std::string> dates;
  dates.reserve(n);
  char buf[16];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "d%05zu", i);
    dates.emplace_back(buf);
  }
  return dates;
}

}  // namespace

PriceMatrix synth_market(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  const std::size_t n = spec.days;
  const std::size_t m = spec.assets;
  std::vector<double> values(n * m, spec.base_price);

  switch (spec.process) {
    case SynthProcess::alternating: {
      double level = spec.base_price;
      for (std::size_t r = 1; r < n; ++r) {
        level *= (r % 2 == 1) ? spec.up : spec.down;
        values[r * m] = level;
      }
      break;
    }
    case SynthProcess::random_walk: {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (std::size_t r = 1; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) {
          const double step = spec.drift + spec.vol * gauss(rng);
          values[r * m + j] = values[(r - 1) * m + j] * std::exp(step);
        }
      }
      break;
    }
    case SynthProcess::mean_reverting: {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double anchor = std::log(spec.base_price);
      std::vector<double> logp(m, anchor);
      for (std::size_t r = 1; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) {
          logp[j] += spec.reversion * (anchor - logp[j]) + spec.drift +
                     spec.vol * gauss(rng);
          values[r * m + j] = std::exp(logp[j]);
        }
      }
      break;
    }
  }

  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t j = 0; j < m; ++j) names.push_back("S" + std::to_string(j));
  return PriceMatrix(std::move(names), make_dates(n), std::move(values));
}

bool is_synth_token(const std::string& token) {
  return token.rfind("synth:", 0) == 0;
}

SynthSpec parse_synth_spec(const std::string& token) {
  if (!is_synth_token(token)) {
    throw ValidationError("not a synthetic dataset token: " + token);
  }
  const auto rest = token.substr(6);
  const auto colon = rest.find(':');
  const std::string process = rest.substr(0, colon);
  SynthSpec spec;
  if (process == "alternating") {
    spec.process = SynthProcess::alternating;
  } else if (process == "gbm") {
    spec.process = SynthProcess::random_walk;
  } else if (process == "meanrev") {
    spec.process = SynthProcess::mean_reverting;
  } else {
    throw ValidationError("unknown synthetic process \"" + process +
                          "\"; expected alternating, gbm, or meanrev");
  }

  std::string params = colon == std::string::npos ? "" : rest.substr(colon + 1);
  std::size_t start = 0;
  while (start < params.size()) {
    auto comma = params.find(',', start);
    if (comma == std::string::npos) comma = params.size();
    const std::string pair = params.substr(start, comma - start);
    start = comma + 1;
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("synthetic parameter \"" + pair + "\" is not key=value");
    }
    const std::string key = pair.substr(0, eq);
    const std::string val = pair.substr(eq + 1);
    double num = 0.0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), num);
    if (ec != std::errc() || ptr != val.data() + val.size()) {
      throw ValidationError("synthetic parameter " + key + " has non-numeric value \"" +
                            val + "\"");
    }
    if (key == "n") {
      spec.days = static_cast<std::size_t>(num);
    } else if (key == "m") {
      spec.assets = static_cast<std::size_t>(num);
    } else if (key == "base") {
      spec.base_price = num;
    } else if (key == "up") {
      spec.up = num;
    } else if (key == "down") {
      spec.down = num;
    } else if (key == "drift") {
      spec.drift = num;
    } else if (key == "vol") {
      spec.vol = num;
    } else if (key == "reversion") {
      spec.reversion = num;
    } else {
      throw ValidationError("unknown synthetic parameter \"" + key + "\"");
    }
  }
  if (spec.days == 0 || spec.assets == 0) {
    throw ValidationError("synthetic dataset needs n=<days> and m=<assets>");
  }
  return spec;
}

}  // namespace opsel
