#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace opsel {

// Portfolio invariant tolerances: weights may dip this far below zero after
// projection, and must sum to one this tightly.
inline constexpr double kWeightFloor = -1e-12;
inline constexpr double kSumTolerance = 1e-9;

/// Wealth fractions over the assets: a point on the probability simplex.
class Portfolio {
 public:
  static Portfolio uniform(std::size_t m);
  /// Validates the simplex invariants and throws ValidationError otherwise.
  static Portfolio from_weights(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> span() const { return weights_; }

  bool operator==(const Portfolio&) const = default;

 private:
  explicit Portfolio(std::vector<double> weights) : weights_(std::move(weights)) {}
  std::vector<double> weights_;
};

/// Euclidean projection onto {b : b >= 0, sum b = 1} by sort-and-threshold:
/// sort descending, keep the largest prefix whose running threshold stays
/// below its last element, subtract the threshold, clip the rest to zero.
Portfolio project_simplex(std::span<const double> v);

/// Rolling window of recent price rows, most recent last.
class PriceWindow {
 public:
  PriceWindow(std::size_t assets, std::size_t capacity);

  void push(std::span<const double> row);
  std::size_t rows() const { return rows_.size(); }
  std::size_t assets() const { return assets_; }
  std::size_t capacity() const { return capacity_; }
  /// k = 0 is the latest row.
  std::span<const double> from_latest(std::size_t k) const;
  std::span<const double> latest() const { return from_latest(0); }

 private:
  std::size_t assets_;
  std::size_t capacity_;
  std::deque<std::vector<double>> rows_;
};

/// Unweighted mean of the last min(w, available) price rows. The shortened
/// window covers the warm-up days before w rows exist.
std::vector<double> sma(const PriceWindow& window, std::size_t w);

/// sma(w) divided elementwise by the latest price row.
std::vector<double> predicted_relative_sma(const PriceWindow& window, std::size_t w);

/// Elementwise reciprocal of a strictly positive relatives row.
std::vector<double> predicted_relative_inverse(std::span<const double> x);

double l1_distance(std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace opsel
