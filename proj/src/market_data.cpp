#include "opsel/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "opsel/errors.hpp"

namespace opsel {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string coord(std::size_t row, std::size_t col) {
  return "(row " + std::to_string(row) + ", col " + std::to_string(col) + ")";
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

// Parsed but not yet validated CSV content.
struct RawTable {
  std::vector<std::string> names;
  std::vector<std::string> dates;
  std::vector<double> values;  // NaN = missing
};

RawTable parse_table(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file.is_open()) {
    throw DataError("cannot open file: " + path.string());
  }

  RawTable table;
  std::string line;
  if (!std::getline(file, line)) {
    throw DataError(path.string() + ": empty file");
  }
  // Strip a UTF-8 BOM so the header token still reads "date".
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF') {
    line.erase(0, 3);
  }
  auto header = split_fields(line);
  if (header.size() < 2 || !iequals(header[0], "date")) {
    throw DataError(path.string() + ": expected header `date,TICKER1,...`");
  }
  table.names.assign(header.begin() + 1, header.end());
  for (std::size_t j = 0; j < table.names.size(); ++j) {
    if (table.names[j].empty()) {
      throw DataError(path.string() + ": empty asset name in header column " +
                      std::to_string(j + 2));
    }
  }

  const std::size_t m = table.names.size();
  std::size_t data_row = 0;
  while (std::getline(file, line)) {
    if (trim(line).empty()) continue;
    ++data_row;
    auto fields = split_fields(line);
    if (fields.size() != m + 1) {
      throw DataError(path.string() + ": row " + std::to_string(data_row) +
                      " has " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(m + 1));
    }
    if (fields[0].empty()) {
      throw DataError(path.string() + ": missing date in row " + std::to_string(data_row));
    }
    table.dates.push_back(fields[0]);
    for (std::size_t j = 0; j < m; ++j) {
      const std::string& tok = fields[j + 1];
      if (tok.empty() || tok == "NA") {
        table.values.push_back(kMissing);
        continue;
      }
      double v = 0.0;
      const auto* first = tok.data();
      const auto* last = tok.data() + tok.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw DataError(path.string() + ": unparseable number \"" + tok + "\" at " +
                        coord(data_row, j + 1));
      }
      table.values.push_back(v);
    }
  }
  if (table.dates.empty()) {
    throw DataError(path.string() + ": no data rows");
  }
  return table;
}

void check_dates_increasing(const std::vector<std::string>& dates, const std::string& context) {
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw DataError(context + ": dates not strictly increasing at row " +
                      std::to_string(i + 1) + " (\"" + dates[i - 1] + "\" then \"" +
                      dates[i] + "\")");
    }
  }
}

// Case-insensitive byte order, raw bytes as tie-break.
bool name_less(const std::string& a, const std::string& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto la = std::tolower(static_cast<unsigned char>(a[i]));
    const auto lb = std::tolower(static_cast<unsigned char>(b[i]));
    if (la != lb) return la < lb;
  }
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

PriceMatrix select_columns(const PriceMatrix& prices, const std::vector<std::size_t>& cols) {
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (auto c : cols) names.push_back(prices.names()[c]);
  std::vector<double> values;
  values.reserve(prices.days() * cols.size());
  for (std::size_t r = 0; r < prices.days(); ++r) {
    for (auto c : cols) values.push_back(prices.at(r, c));
  }
  return PriceMatrix(std::move(names), prices.dates(), std::move(values));
}

}  // namespace

PriceMatrix::PriceMatrix(std::vector<std::string> names, std::vector<std::string> dates,
                         std::vector<double> values)
    : names_(std::move(names)), dates_(std::move(dates)), values_(std::move(values)) {
  if (names_.empty()) throw DataError("price matrix needs at least one asset");
  if (dates_.size() < 2) throw DataError("price matrix needs at least two rows");
  if (values_.size() != names_.size() * dates_.size()) {
    throw DataError("price matrix shape mismatch: " + std::to_string(values_.size()) +
                    " values for " + std::to_string(dates_.size()) + "x" +
                    std::to_string(names_.size()));
  }
  check_dates_increasing(dates_, "price matrix");
  const std::size_t m = names_.size();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (std::isnan(v)) continue;
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataError("non-positive price at " + coord(i / m + 1, i % m + 1));
    }
  }
}

bool PriceMatrix::missing(std::size_t row, std::size_t col) const {
  return std::isnan(at(row, col));
}

bool PriceMatrix::complete() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](double v) { return std::isnan(v); });
}

RelativeMatrix::RelativeMatrix(std::vector<std::string> names, std::vector<double> values,
                               std::size_t rows)
    : names_(std::move(names)), values_(std::move(values)), rows_(rows) {
  if (names_.empty()) throw DataError("relative matrix needs at least one asset");
  if (rows_ == 0) throw DataError("relative matrix needs at least one row");
  if (values_.size() != names_.size() * rows_) {
    throw DataError("relative matrix shape mismatch");
  }
  const std::size_t m = names_.size();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataError("non-positive price relative at " + coord(i / m + 1, i % m + 1));
    }
  }
}

PriceMatrix load_prices(const std::filesystem::path& path) {
  auto table = parse_table(path);
  check_dates_increasing(table.dates, path.string());
  try {
    return PriceMatrix(std::move(table.names), std::move(table.dates),
                       std::move(table.values));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

RelativeMatrix load_relatives(const std::filesystem::path& path,
                              std::vector<std::string>* dates_out) {
  auto table = parse_table(path);
  check_dates_increasing(table.dates, path.string());
  const std::size_t m = table.names.size();
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    if (std::isnan(table.values[i])) {
      throw DataError(path.string() + ": missing value not allowed in relatives file at " +
                      coord(i / m + 1, i % m + 1));
    }
  }
  if (dates_out) *dates_out = table.dates;
  try {
    return RelativeMatrix(std::move(table.names), std::move(table.values),
                          table.dates.size());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_prices_csv(const PriceMatrix& prices, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) {
    throw DataError("cannot write file: " + path.string());
  }
  out << "date";
  for (const auto& name : prices.names()) out << ',' << name;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < prices.days(); ++r) {
    out << prices.dates()[r];
    for (std::size_t j = 0; j < prices.assets(); ++j) {
      out << ',';
      if (prices.missing(r, j)) {
        out << "NA";
        continue;
      }
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), prices.at(r, j));
      out.write(buf, ptr - buf);
      (void)ec;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

RelativeMatrix to_relatives(const PriceMatrix& prices) {
  if (prices.days() < 2) {
    throw DataError("need at least two price rows to form relatives");
  }
  const std::size_t m = prices.assets();
  for (std::size_t r = 0; r < prices.days(); ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      if (prices.missing(r, j)) {
        throw DataError("missing price at " + coord(r + 1, j + 1) +
                        "; filter the universe before forming relatives");
      }
    }
  }
  std::vector<double> values;
  values.reserve((prices.days() - 1) * m);
  for (std::size_t r = 1; r < prices.days(); ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      values.push_back(prices.at(r, j) / prices.at(r - 1, j));
    }
  }
  return RelativeMatrix(prices.names(), std::move(values), prices.days() - 1);
}

DatasetSummary describe(const RelativeMatrix& data, std::string name,
                        std::string first_date, std::string last_date) {
  DatasetSummary summary;
  summary.name = std::move(name);
  summary.first_date = std::move(first_date);
  summary.last_date = std::move(last_date);
  summary.days = data.days();
  summary.assets = data.assets();
  double lo = data.at(0, 0);
  double hi = data.at(0, 0);
  for (std::size_t r = 0; r < data.days(); ++r) {
    for (std::size_t j = 0; j < data.assets(); ++j) {
      lo = std::min(lo, data.at(r, j));
      hi = std::max(hi, data.at(r, j));
    }
  }
  summary.min_relative = lo;
  summary.max_relative = hi;
  return summary;
}

std::vector<PriceMatrix> split_universe(const PriceMatrix& prices, std::size_t k) {
  const std::size_t m = prices.assets();
  if (k == 0) throw ValidationError("group count must be at least 1");
  if (k > m) {
    throw ValidationError("group count " + std::to_string(k) + " exceeds asset count " +
                          std::to_string(m));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return name_less(prices.names()[a], prices.names()[b]);
  });

  const std::size_t base = m / k;
  const std::size_t extra = m % k;  // first `extra` groups get one more asset
  std::vector<PriceMatrix> groups;
  groups.reserve(k);
  std::size_t offset = 0;
  for (std::size_t g = 0; g < k; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    std::vector<std::size_t> cols(order.begin() + offset, order.begin() + offset + size);
    groups.push_back(select_columns(prices, cols));
    offset += size;
  }
  return groups;
}

PriceMatrix filter_by_listing(const PriceMatrix& prices, const std::string& cutoff) {
  const std::size_t m = prices.assets();
  std::size_t cutoff_rows = 0;  // rows with date <= cutoff
  while (cutoff_rows < prices.days() && prices.dates()[cutoff_rows] <= cutoff) {
    ++cutoff_rows;
  }

  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < m; ++j) {
    bool missing_early = false;
    for (std::size_t r = 0; r < cutoff_rows && !missing_early; ++r) {
      missing_early = prices.missing(r, j);
    }
    if (!missing_early) kept.push_back(j);
  }
  if (kept.empty()) {
    throw DataError("empty universe: every asset has missing data at or before " + cutoff);
  }
  for (auto j : kept) {
    for (std::size_t r = cutoff_rows; r < prices.days(); ++r) {
      if (prices.missing(r, j)) {
        throw DataError("asset " + prices.names()[j] + " has missing data at " +
                        prices.dates()[r] + ", after the cutoff " + cutoff +
                        "; exclude it explicitly");
      }
    }
  }
  return select_columns(prices, kept);
}

DatasetFile load_dataset(const std::filesystem::path& path, InputKind kind) {
  std::string name = path.stem().string();
  if (kind == InputKind::relatives) {
    std::vector<std::string> dates;
    RelativeMatrix relatives = load_relatives(path, &dates);
    return DatasetFile{std::move(name), std::move(dates), std::move(relatives),
                       std::nullopt};
  }
  PriceMatrix prices = load_prices(path);
  std::vector<std::string> dates = prices.dates();
  RelativeMatrix relatives = to_relatives(prices);
  return DatasetFile{std::move(name), std::move(dates), std::move(relatives),
                     std::move(prices)};
}

}  // namespace opsel
