#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "boostkit/dataset.hpp"
#include "boostkit/error.hpp"
#include "support/generators.hpp"

using namespace boostkit;

namespace {

Dataset parse(const std::string& text, CsvOptions opts = {}) {
  std::istringstream in(text);
  return read_csv(in, opts, "test.csv");
}

std::string error_of(const std::string& text, CsvOptions opts = {}) {
  try {
    parse(text, opts);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("csv: +-1 labels load as classification in file order") {
  const auto ds = parse("a,b,label\n1,2,-1\n3,4,-1\n5,6,1\n7,8,+1\n");
  CHECK(ds.size() == 4);
  CHECK(ds.dimension() == 2);
  CHECK(ds.is_classification());
  CHECK(ds.labels() == std::vector<double>{-1, -1, 1, 1});
  CHECK(ds.x(2)[0] == 5.0);
  CHECK(ds.features().names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("csv: other labels load as regression") {
  const auto ds = parse("a,b,label\n1,2,1.5\n3,4,2.0\n5,6,2.5\n7,8,3.0\n");
  CHECK(ds.mode() == LabelMode::regression);
}

TEST_CASE("csv: label column may sit anywhere") {
  const auto ds = parse("label,a\n1,0.5\n-1,0.25\n");
  CHECK(ds.dimension() == 1);
  CHECK(ds.x(1)[0] == 0.25);
}

TEST_CASE("csv: prior outside [0,1] is rejected") {
  CHECK(error_of("a,label,prior\n1,1,0.5\n2,-1,1.2\n").find("prior out of [0,1]") != std::string::npos);
}

TEST_CASE("csv: errors name the column and line") {
  CHECK(error_of("a,b\n1,2\n").find("label") != std::string::npos);
  const auto msg = error_of("a,b,label\n1,2,1\n1,x,1\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("'b'") != std::string::npos);
  CHECK(error_of("").find("empty") != std::string::npos);
  CHECK(error_of("a,label\n").find("no data") != std::string::npos);
  CHECK(error_of("a,label\n1,2,3\n") != "");
  CHECK(error_of("a,label\nnan,1\n") != "");
  CHECK(error_of("a,label\ninf,1\n") != "");
}

TEST_CASE("csv: custom label and prior columns") {
  CsvOptions opts;
  opts.label_column = "y";
  opts.prior_column = "p";
  opts.require_prior = true;
  const auto ds = parse("x,p,y\n0,0.25,1\n1,0.75,-1\n", opts);
  REQUIRE(ds.prior());
  CHECK(*ds.prior() == std::vector<double>{0.25, 0.75});
  CHECK_THROWS_AS(parse("x,y\n0,1\n", opts), DataError);
}

TEST_CASE("csv: write then read is the identity") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto base = testgen::small_classification(rng, 30, 4);
    std::vector<double> prior(base.size()), weights(base.size());
    for (auto& p : prior) p = rng.uniform();
    for (auto& w : weights) w = rng.uniform(0.0, 5.0);
    for (const auto& ds : {base, base.with_prior(prior), base.with_prior(prior).with_weights(weights)}) {
      std::stringstream buffer;
      write_csv(ds, buffer);
      CHECK(read_csv(buffer) == ds);
    }
  }
}

TEST_CASE("uniform_distribution") {
  CHECK(uniform_distribution(4).values()[3] == 0.25);
  CHECK(uniform_distribution(1)[0] == 1.0);
  const auto third = uniform_distribution(3);
  CHECK(third[0] == doctest::Approx(1.0 / 3.0));
  CHECK(third[0] + third[1] + third[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(uniform_distribution(0), UsageError);
}

TEST_CASE("weight distribution validation") {
  CHECK_THROWS_AS(WeightDistribution({0.5, 0.6}), InvariantError);
  CHECK_THROWS_AS(WeightDistribution({1.5, -0.5}), InvariantError);
  const auto w = WeightDistribution::normalize({1, 1, 2});
  CHECK(w[2] == 0.5);
}

TEST_CASE("split: sizes, determinism, exact partition") {
  std::vector<double> x(10);
  std::iota(x.begin(), x.end(), 0.0);
  const Dataset ds(FeatureMatrix(10, 1, x), std::vector<double>(10, 1.0));
  Rng a(1), b(1);
  const auto [train, test] = split(ds, 0.3, a);
  CHECK(train.size() == 7);
  CHECK(test.size() == 3);
  const auto again = split(ds, 0.3, b);
  CHECK(again.first == train);
  CHECK(again.second == test);
  std::set<double> seen;
  for (std::size_t i = 0; i < train.size(); ++i) seen.insert(train.x(i)[0]);
  for (std::size_t i = 0; i < test.size(); ++i) seen.insert(test.x(i)[0]);
  CHECK(seen.size() == 10);
}

TEST_CASE("split: degenerate fractions are errors") {
  const Dataset two(FeatureMatrix(2, 1, {0.0, 1.0}), {1.0, -1.0});
  Rng rng(1);
  CHECK_THROWS_AS(split(two, 0.999, rng), UsageError);
  CHECK_THROWS_AS(split(two, 0.0, rng), UsageError);
  CHECK_THROWS_AS(split(two, 1.0, rng), UsageError);
}

TEST_CASE("dataset: base weights default to ones and reject negatives") {
  const Dataset ds(FeatureMatrix(2, 1, {0.0, 1.0}), {1.0, -1.0});
  CHECK(ds.base_weights() == std::vector<double>{1.0, 1.0});
  CHECK_THROWS(ds.with_weights({1.0, -1.0}));
  CHECK_THROWS(Dataset(FeatureMatrix(2, 1, {0.0, 1.0}), {1.0}));
}
