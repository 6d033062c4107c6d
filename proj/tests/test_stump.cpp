#include <doctest.h>

#include <cmath>
#include <numeric>

#include "boostkit/error.hpp"
#include "boostkit/stump.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace boostkit;

namespace {

Dataset line(std::vector<double> y) {
  return Dataset(FeatureMatrix(4, 1, {1, 2, 3, 4}), std::move(y));
}

double z_surrogate(const Stump& stump, const Dataset& ds, std::span<const double> w, double s) {
  double lp = 0, lm = 0, rp = 0, rm = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const bool left = ds.x(i)[stump.feature] <= stump.threshold;
    const bool pos = ds.y(i) > 0;
    (left ? (pos ? lp : lm) : (pos ? rp : rm)) += w[i];
  }
  return 2.0 * std::sqrt((lp + s) * (lm + s)) + 2.0 * std::sqrt((rp + s) * (rm + s));
}

} // namespace

TEST_CASE("stump evaluation and the boundary rule") {
  const Stump s{0, 2.5, -1, 1};
  const double a[] = {1.0}, b[] = {3.0}, c[] = {2.5};
  CHECK(s.evaluate(a) == -1);
  CHECK(s.evaluate(b) == 1);
  const Stump r{0, 2.5, -0.8, 1.2};
  CHECK(r.evaluate(c) == -0.8);
  CHECK_THROWS_AS((Stump{3, 0.0}.evaluate(a)), UsageError);
  CHECK(s.is_binary());
  CHECK_FALSE(r.is_binary());
}

TEST_CASE("binary stump: separable line") {
  const auto fit = best_binary_stump(line({-1, -1, 1, 1}), uniform_distribution(4));
  CHECK(fit.stump == Stump{0, 2.5, -1, 1});
  CHECK(fit.epsilon == 0.0);
}

TEST_CASE("binary stump: one unavoidable mistake") {
  const auto ds = line({1, -1, 1, 1});
  const auto fit = best_binary_stump(ds, uniform_distribution(4));
  CHECK(fit.epsilon == doctest::Approx(0.25));
  const std::vector<double> w{0.25, 0.25, 0.25, 0.25};
  CHECK(fit.epsilon == doctest::Approx(oracle::best_binary_error(ds, w)));
}

TEST_CASE("binary stump: concentrated weight allows zero error") {
  const auto ds = line({1, -1, 1, 1});
  const auto fit = best_binary_stump(ds, WeightDistribution({1, 0, 0, 0}));
  CHECK(fit.epsilon == 0.0);
  const double x0[] = {1.0};
  CHECK(fit.stump.evaluate(x0) == 1.0);
}

TEST_CASE("binary stump: regression data rejected") {
  const Dataset reg(FeatureMatrix(2, 1, {0, 1}), {0.5, 2.0});
  CHECK_THROWS_AS(best_binary_stump(reg, uniform_distribution(2)), DataError);
  CHECK_THROWS_AS(best_confidence_stump(reg, uniform_distribution(2), 0.1), DataError);
}

TEST_CASE("binary stump property: matches brute force and stays <= 1/2") {
  Rng rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const auto ds = testgen::small_classification(rng, 12, 3);
    const auto w = testgen::distribution(rng, ds.size());
    const auto fit = best_binary_stump(ds, WeightDistribution(w));
    const double brute = oracle::best_binary_error(ds, w);
    CHECK(fit.epsilon == doctest::Approx(brute).epsilon(1e-12));
    CHECK(fit.epsilon <= 0.5 + 1e-12);
    CHECK(fit.epsilon == doctest::Approx(weighted_error(stump_outputs(fit.stump, ds), ds.labels(), w)));
  }
}

TEST_CASE("binary stump property: row order does not change the stump") {
  Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ds = testgen::small_classification(rng, 15, 3);
    const auto w = testgen::distribution(rng, ds.size());
    const auto perm = rng.permutation(ds.size());
    const auto shuffled = subset(ds, perm);
    std::vector<double> w2(ds.size());
    for (std::size_t i = 0; i < perm.size(); ++i) w2[i] = w[perm[i]];
    const auto a = best_binary_stump(ds, WeightDistribution(w));
    const auto b = best_binary_stump(shuffled, WeightDistribution(w2));
    CHECK(a.stump == b.stump);
  }
}

TEST_CASE("confidence outputs") {
  CHECK(confidence_output(0.3, 0.3, 0.0) == 0.0);
  CHECK(confidence_output(0.75, 0.25, 0.0) == doctest::Approx(0.5493061443340549).epsilon(1e-14));
  CHECK(confidence_output(0.4, 0.0, 0.05) == doctest::Approx(0.5 * std::log(0.45 / 0.05)));
  CHECK(confidence_output(0.4, 0.0, 0.0) == kMaxConfidenceOutput);
  CHECK(confidence_output(0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("confidence stump: balanced partition gives zero outputs") {
  const Dataset ds(FeatureMatrix(4, 1, {1, 1, 2, 2}), {1, -1, 1, -1});
  const auto s = best_confidence_stump(ds, uniform_distribution(4), 0.0);
  CHECK(s.left == 0.0);
  CHECK(s.right == 0.0);
}

TEST_CASE("confidence stump property: minimal surrogate, label-flip antisymmetry, row order") {
  Rng rng(303);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ds = testgen::small_classification(rng, 12, 3);
    const auto w = testgen::distribution(rng, ds.size());
    const double s = trial % 3 == 0 ? 0.0 : 1.0 / (2.0 * static_cast<double>(ds.size()));
    const auto stump = best_confidence_stump(ds, WeightDistribution(w), s);
    CHECK(z_surrogate(stump, ds, w, s) == doctest::Approx(oracle::best_confidence_objective(ds, w, s)).epsilon(1e-12));

    std::vector<double> flipped(ds.labels());
    for (auto& y : flipped) y = -y;
    const auto neg = best_confidence_stump(ds.relabeled(flipped), WeightDistribution(w), s);
    CHECK(neg.feature == stump.feature);
    CHECK(neg.threshold == stump.threshold);
    CHECK(neg.left == -stump.left);
    CHECK(neg.right == -stump.right);

    const auto perm = rng.permutation(ds.size());
    std::vector<double> w2(ds.size());
    for (std::size_t i = 0; i < perm.size(); ++i) w2[i] = w[perm[i]];
    const auto shuffled = best_confidence_stump(subset(ds, perm), WeightDistribution(w2), s);
    CHECK(shuffled.feature == stump.feature);
    CHECK(shuffled.threshold == stump.threshold);
    CHECK(shuffled.left == doctest::Approx(stump.left).epsilon(1e-12));
    CHECK(shuffled.right == doctest::Approx(stump.right).epsilon(1e-12));
  }
}

TEST_CASE("smoothing default is 1/(2m)") {
  StumpSearchConfig cfg;
  CHECK(cfg.smoothing_for(50) == 0.01);
  cfg.smoothing = 0.2;
  CHECK(cfg.smoothing_for(50) == 0.2);
}
