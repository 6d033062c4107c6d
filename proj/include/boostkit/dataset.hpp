#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boostkit/rng.hpp"

namespace boostkit {

/// Dense row-major m x d matrix of finite reals with optional column names.
class FeatureMatrix {
public:
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                std::vector<std::string> names = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Column names; generated as x0, x1, ... when none were supplied.
  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

enum class LabelMode { classification, regression };

/// Labeled examples. Immutable once built; every constructor path validates
/// the invariants, so holders of a Dataset never need to re-check them.
///
/// The mode is inferred: classification iff every label is exactly -1 or +1.
class Dataset {
public:
  Dataset(FeatureMatrix features, std::vector<double> labels,
          std::optional<std::vector<double>> prior = std::nullopt,
          std::optional<std::vector<double>> weights = std::nullopt);

  std::size_t size() const noexcept { return features_.rows(); }
  std::size_t dimension() const noexcept { return features_.cols(); }
  LabelMode mode() const noexcept { return mode_; }
  bool is_classification() const noexcept { return mode_ == LabelMode::classification; }

  const FeatureMatrix& features() const noexcept { return features_; }
  std::span<const double> x(std::size_t i) const noexcept { return features_.row(i); }
  double y(std::size_t i) const noexcept { return labels_[i]; }
  const std::vector<double>& labels() const noexcept { return labels_; }
  const std::optional<std::vector<double>>& prior() const noexcept { return prior_; }
  const std::optional<std::vector<double>>& weights() const noexcept { return weights_; }

  /// Per-example base weights: the stored weights, or all ones.
  std::vector<double> base_weights() const;

  /// Same features, new labels (prior and weights are kept).
  Dataset relabeled(std::vector<double> labels) const;
  Dataset with_prior(std::vector<double> prior) const;
  Dataset with_weights(std::vector<double> weights) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

private:
  FeatureMatrix features_;
  std::vector<double> labels_;
  std::optional<std::vector<double>> prior_;
  std::optional<std::vector<double>> weights_;
  LabelMode mode_;
};

/// A normalized, nonnegative weight vector over training examples.
class WeightDistribution {
public:
  /// Takes weights that already sum to 1 (within 1e-9).
  explicit WeightDistribution(std::vector<double> weights);

  /// Divides by the sum. Requires nonnegative entries with a positive sum.
  static WeightDistribution normalize(std::vector<double> weights);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const noexcept { return w_[i]; }
  std::span<const double> values() const noexcept { return w_; }

private:
  std::vector<double> w_;
};

WeightDistribution uniform_distribution(std::size_t m);

struct CsvOptions {
  std::string label_column = "label";
  /// Read as the prior when present.
  std::string prior_column = "prior";
  bool require_prior = false;
  /// Read as per-example weights when present.
  std::string weight_column = "weight";
};

Dataset read_csv(std::istream& in, const CsvOptions& options = {},
                 const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Loads only feature columns, skipping any column listed in `ignored`.
FeatureMatrix load_feature_csv(const std::filesystem::path& path,
                               const std::vector<std::string>& ignored);
FeatureMatrix read_feature_csv(std::istream& in, const std::vector<std::string>& ignored,
                               const std::string& source = "<stream>");

/// Writes features, then label, then prior/weight columns when present.
void write_csv(const Dataset& ds, std::ostream& out, const CsvOptions& options = {});

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows);

/// Random train/test partition. The test part holds round(m * test_fraction)
/// rows; both parts keep the original relative row order.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, Rng& rng);

} // namespace boostkit
