#include "boostkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string_view>

#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"

namespace boostkit {

namespace {

constexpr double kNormalizationTolerance = 1e-9;

std::string unquote(std::string_view field) {
  field = detail::trim(field);
  if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
    field = field.substr(1, field.size() - 2);
  }
  return std::string(field);
}

// Raw table: header names plus numeric cells, validated cell by cell.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in, const std::string& source) {
  Table table;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      line.erase(0, 3);
    }
    if (detail::trim(line).empty()) {
      continue;
    }
    const auto fields = detail::split_fields(line, ',');
    if (!have_header) {
      for (const auto field : fields) {
        table.header.push_back(unquote(field));
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(source + ": line " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto value = detail::parse_finite(fields[j]);
      if (!value) {
        throw DataError(source + ": line " + std::to_string(line_number) + ", column '" +
                        table.header[j] + "': cannot parse '" +
                        std::string(detail::trim(fields[j])) + "' as a finite number");
      }
      row.push_back(*value);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw DataError(source + ": empty file");
  }
  if (table.rows.empty()) {
    throw DataError(source + ": no data rows");
  }
  return table;
}

std::optional<std::size_t> column_index(const Table& table, const std::string& name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

FeatureMatrix features_excluding(const Table& table, const std::vector<std::size_t>& excluded) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (std::find(excluded.begin(), excluded.end(), j) == excluded.end()) {
      keep.push_back(j);
    }
  }
  std::vector<std::string> names;
  for (const auto j : keep) {
    names.push_back(table.header[j]);
  }
  std::vector<double> values;
  values.reserve(table.rows.size() * keep.size());
  for (const auto& row : table.rows) {
    for (const auto j : keep) {
      values.push_back(row[j]);
    }
  }
  return FeatureMatrix(table.rows.size(), keep.size(), std::move(values), std::move(names));
}

std::vector<double> column(const Table& table, std::size_t j) {
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.push_back(row[j]);
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  return in;
}

} // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                             std::vector<std::string> names)
    : rows_(rows), cols_(cols), values_(std::move(values)), names_(std::move(names)) {
  if (rows_ == 0 || cols_ == 0) {
    throw DataError("feature matrix must have at least one row and one column");
  }
  if (values_.size() != rows_ * cols_) {
    throw DataError("feature matrix has " + std::to_string(values_.size()) +
                    " values, expected " + std::to_string(rows_ * cols_));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw DataError("non-finite feature value at row " + std::to_string(k / cols_) +
                      ", column " + std::to_string(k % cols_));
    }
  }
  if (names_.empty()) {
    for (std::size_t j = 0; j < cols_; ++j) {
      names_.push_back("x" + std::to_string(j));
    }
  } else if (names_.size() != cols_) {
    throw DataError("feature matrix has " + std::to_string(names_.size()) + " names for " +
                    std::to_string(cols_) + " columns");
  }
}

Dataset::Dataset(FeatureMatrix features, std::vector<double> labels,
                 std::optional<std::vector<double>> prior,
                 std::optional<std::vector<double>> weights)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      prior_(std::move(prior)),
      weights_(std::move(weights)),
      mode_(LabelMode::classification) {
  const std::size_t m = features_.rows();
  if (labels_.size() != m) {
    throw DataError("dataset has " + std::to_string(labels_.size()) + " labels for " +
                    std::to_string(m) + " rows");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(labels_[i])) {
      throw DataError("non-finite label at row " + std::to_string(i));
    }
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      mode_ = LabelMode::regression;
    }
  }
  if (prior_) {
    if (prior_->size() != m) {
      throw DataError("prior has " + std::to_string(prior_->size()) + " entries for " +
                      std::to_string(m) + " rows");
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double p = (*prior_)[i];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw DataError("prior out of [0,1] at row " + std::to_string(i));
      }
    }
  }
  if (weights_) {
    if (weights_->size() != m) {
      throw DataError("weights have " + std::to_string(weights_->size()) + " entries for " +
                      std::to_string(m) + " rows");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = (*weights_)[i];
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw DataError("negative or non-finite weight at row " + std::to_string(i));
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw DataError("weights sum to zero");
    }
  }
}

std::vector<double> Dataset::base_weights() const {
  if (weights_) {
    return *weights_;
  }
  return std::vector<double>(size(), 1.0);
}

Dataset Dataset::relabeled(std::vector<double> labels) const {
  return Dataset(features_, std::move(labels), prior_, weights_);
}

Dataset Dataset::with_prior(std::vector<double> prior) const {
  return Dataset(features_, labels_, std::move(prior), weights_);
}

Dataset Dataset::with_weights(std::vector<double> weights) const {
  return Dataset(features_, labels_, prior_, std::move(weights));
}

WeightDistribution::WeightDistribution(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) {
    throw UsageError("weight distribution over zero examples");
  }
  double total = 0.0;
  for (const double w : w_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvariantError("weight distribution has a negative or non-finite entry");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw InvariantError("weight distribution sums to " + detail::format_double(total));
  }
}

WeightDistribution WeightDistribution::normalize(std::vector<double> weights) {
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvariantError("cannot normalize a negative or non-finite weight");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw InvariantError("cannot normalize weights with zero total");
  }
  for (double& w : weights) {
    w /= total;
  }
  return WeightDistribution(std::move(weights));
}

WeightDistribution uniform_distribution(std::size_t m) {
  if (m == 0) {
    throw UsageError("uniform_distribution requires m >= 1");
  }
  return WeightDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Dataset read_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  const Table table = read_table(in, source);
  const auto label_index = column_index(table, options.label_column);
  if (!label_index) {
    throw DataError(source + ": missing label column '" + options.label_column + "'");
  }
  std::vector<std::size_t> excluded{*label_index};

  std::optional<std::vector<double>> prior;
  if (const auto j = column_index(table, options.prior_column); j && *j != *label_index) {
    prior = column(table, *j);
    excluded.push_back(*j);
  } else if (options.require_prior) {
    throw DataError(source + ": missing prior column '" + options.prior_column + "'");
  }

  std::optional<std::vector<double>> weights;
  if (const auto j = column_index(table, options.weight_column);
      j && std::find(excluded.begin(), excluded.end(), *j) == excluded.end()) {
    weights = column(table, *j);
    excluded.push_back(*j);
  }

  if (excluded.size() == table.header.size()) {
    throw DataError(source + ": no feature columns");
  }
  try {
    return Dataset(features_excluding(table, excluded), column(table, *label_index),
                   std::move(prior), std::move(weights));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  auto in = open_input(path);
  return read_csv(in, options, path.string());
}

FeatureMatrix read_feature_csv(std::istream& in, const std::vector<std::string>& ignored,
                               const std::string& source) {
  const Table table = read_table(in, source);
  std::vector<std::size_t> excluded;
  for (const auto& name : ignored) {
    if (const auto j = column_index(table, name)) {
      excluded.push_back(*j);
    }
  }
  if (excluded.size() == table.header.size()) {
    throw DataError(source + ": no feature columns");
  }
  return features_excluding(table, excluded);
}

FeatureMatrix load_feature_csv(const std::filesystem::path& path,
                               const std::vector<std::string>& ignored) {
  auto in = open_input(path);
  return read_feature_csv(in, ignored, path.string());
}

void write_csv(const Dataset& ds, std::ostream& out, const CsvOptions& options) {
  const auto& names = ds.features().names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    out << names[j] << ',';
  }
  out << options.label_column;
  if (ds.prior()) {
    out << ',' << options.prior_column;
  }
  if (ds.weights()) {
    out << ',' << options.weight_column;
  }
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (const double v : ds.x(i)) {
      out << detail::format_double(v) << ',';
    }
    out << detail::format_double(ds.y(i));
    if (ds.prior()) {
      out << ',' << detail::format_double((*ds.prior())[i]);
    }
    if (ds.weights()) {
      out << ',' << detail::format_double((*ds.weights())[i]);
    }
    out << '\n';
  }
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows) {
  const std::size_t d = ds.dimension();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  std::vector<double> labels;
  labels.reserve(rows.size());
  std::optional<std::vector<double>> prior;
  std::optional<std::vector<double>> weights;
  if (ds.prior()) {
    prior.emplace();
  }
  if (ds.weights()) {
    weights.emplace();
  }
  for (const auto i : rows) {
    if (i >= ds.size()) {
      throw UsageError("subset row " + std::to_string(i) + " out of range");
    }
    const auto x = ds.x(i);
    values.insert(values.end(), x.begin(), x.end());
    labels.push_back(ds.y(i));
    if (prior) {
      prior->push_back((*ds.prior())[i]);
    }
    if (weights) {
      weights->push_back((*ds.weights())[i]);
    }
  }
  return Dataset(FeatureMatrix(rows.size(), d, std::move(values), ds.features().names()),
                 std::move(labels), std::move(prior), std::move(weights));
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie strictly between 0 and 1");
  }
  const std::size_t m = ds.size();
  const auto n_test =
      static_cast<std::size_t>(std::llround(static_cast<double>(m) * test_fraction));
  if (n_test >= m) {
    throw UsageError("split would leave the training set empty");
  }
  if (n_test == 0) {
    throw UsageError("split would leave the test set empty");
  }
  const auto order = rng.permutation(m);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {subset(ds, train), subset(ds, test)};
}

} // namespace boostkit
