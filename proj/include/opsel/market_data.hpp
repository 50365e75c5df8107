#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace opsel {

/// Daily closing prices, one row per trading day, one column per asset.
/// A NaN cell marks missing data (asset not yet listed, gap in the feed);
/// every present value is strictly positive and dates strictly increase.
class PriceMatrix {
 public:
  PriceMatrix(std::vector<std::string> names, std::vector<std::string> dates,
              std::vector<double> values);

  std::size_t days() const { return dates_.size(); }
  std::size_t assets() const { return names_.size(); }

  double at(std::size_t row, std::size_t col) const {
    return values_[row * assets() + col];
  }
  bool missing(std::size_t row, std::size_t col) const;
  bool complete() const;

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * assets(), assets()};
  }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& dates() const { return dates_; }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> dates_;
  std::vector<double> values_;  // row-major days x assets
};

/// Daily price relatives x_t(j) = p_t(j) / p_{t-1}(j); all entries finite
/// and strictly positive. Carries no dates: strategies consume row order only.
class RelativeMatrix {
 public:
  RelativeMatrix(std::vector<std::string> names, std::vector<double> values,
                 std::size_t rows);

  std::size_t days() const { return rows_; }
  std::size_t assets() const { return names_.size(); }

  double at(std::size_t row, std::size_t col) const {
    return values_[row * assets() + col];
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * assets(), assets()};
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::size_t rows_;
};

struct DatasetSummary {
  std::string name;
  std::string first_date;
  std::string last_date;
  std::size_t days = 0;
  std::size_t assets = 0;
  double max_relative = 0.0;
  double min_relative = 0.0;
};

enum class InputKind { prices, relatives };

/// Parses a price CSV (header `date,TICK1,...`). Empty cells and the literal
/// token NA load as missing; any other non-numeric token is an error with
/// row/column coordinates.
PriceMatrix load_prices(const std::filesystem::path& path);

/// Parses the same CSV layout but interprets the values as price relatives
/// directly (benchmark datasets circulate in this form). Missing cells are
/// not allowed. Optionally reports the file's date labels.
RelativeMatrix load_relatives(const std::filesystem::path& path,
                              std::vector<std::string>* dates_out = nullptr);

/// Writes the price CSV layout. Values are emitted in shortest round-trip
/// form; missing cells are written as NA.
void write_prices_csv(const PriceMatrix& prices, const std::filesystem::path& path);

/// Elementwise division of consecutive price rows. Requires a complete
/// matrix; output has one fewer row than the input.
RelativeMatrix to_relatives(const PriceMatrix& prices);

DatasetSummary describe(const RelativeMatrix& data, std::string name,
                        std::string first_date, std::string last_date);

/// Sorts assets by identifier (case-insensitive, bytewise tie-break) and
/// partitions them into k contiguous groups; the first m mod k groups get
/// the extra asset.
std::vector<PriceMatrix> split_universe(const PriceMatrix& prices, std::size_t k);

/// Drops every asset with a missing cell at or before the cutoff date.
/// Assets that still have gaps after the cutoff are reported as errors
/// rather than silently dropped.
PriceMatrix filter_by_listing(const PriceMatrix& prices, const std::string& cutoff);

/// One loaded input file plus the metadata the CLI needs alongside the
/// relatives the backtests consume.
struct DatasetFile {
  std::string name;
  std::vector<std::string> dates;
  RelativeMatrix relatives;
  std::optional<PriceMatrix> prices;  // present when kind == prices
};

DatasetFile load_dataset(const std::filesystem::path& path, InputKind kind);

}  // namespace opsel
