#include "opsel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opsel/errors.hpp"

namespace opsel {

Portfolio Portfolio::uniform(std::size_t m) {
  if (m == 0) throw ValidationError("portfolio needs at least one asset");
  return Portfolio(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Portfolio Portfolio::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw ValidationError("portfolio needs at least one asset");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw ValidationError("portfolio weight is not finite");
    if (w < kWeightFloor) {
      throw ValidationError("negative portfolio weight " + std::to_string(w));
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ValidationError("portfolio weights sum to " + std::to_string(sum));
  }
  return Portfolio(std::move(weights));
}

Portfolio project_simplex(std::span<const double> v) {
  if (v.empty()) throw ValidationError("cannot project an empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("cannot project non-finite input");
  }
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  double cumulative = 0.0;
  double threshold = sorted.front() - 1.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) threshold = candidate;
  }

  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - threshold, 0.0);
  }
  return Portfolio::from_weights(std::move(out));
}

PriceWindow::PriceWindow(std::size_t assets, std::size_t capacity)
    : assets_(assets), capacity_(std::max<std::size_t>(capacity, 1)) {
  if (assets == 0) throw ValidationError("price window needs at least one asset");
}

void PriceWindow::push(std::span<const double> row) {
  if (row.size() != assets_) {
    throw ValidationError("price row has " + std::to_string(row.size()) +
                          " assets, window expects " + std::to_string(assets_));
  }
  rows_.emplace_back(row.begin(), row.end());
  if (rows_.size() > capacity_) rows_.pop_front();
}

std::span<const double> PriceWindow::from_latest(std::size_t k) const {
  if (k >= rows_.size()) throw ValidationError("price window row out of range");
  return rows_[rows_.size() - 1 - k];
}

std::vector<double> sma(const PriceWindow& window, std::size_t w) {
  if (window.rows() == 0) throw ValidationError("simple moving average of empty history");
  if (w == 0) throw ValidationError("moving average window must be at least 1");
  const std::size_t effective = std::min(w, window.rows());
  std::vector<double> mean(window.assets(), 0.0);
  for (std::size_t k = 0; k < effective; ++k) {
    const auto row = window.from_latest(k);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(effective);
  return mean;
}

std::vector<double> predicted_relative_sma(const PriceWindow& window, std::size_t w) {
  std::vector<double> prediction = sma(window, w);
  const auto latest = window.latest();
  for (std::size_t j = 0; j < prediction.size(); ++j) {
    prediction[j] /= latest[j];
  }
  return prediction;
}

std::vector<double> predicted_relative_inverse(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0.0) || !std::isfinite(x[j])) {
      throw ValidationError("price relative must be positive to invert");
    }
    out[j] = 1.0 / x[j];
  }
  return out;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("l1 distance of vectors with different lengths");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("dot product of vectors with different lengths");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace opsel
