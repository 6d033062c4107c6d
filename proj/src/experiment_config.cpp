#include "boostkit/experiment_config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"

namespace boostkit {

namespace {

std::size_t parse_count(const std::string& key, const std::string& value) {
  const auto parsed = detail::parse_integer(value);
  if (!parsed || *parsed < 0) {
    throw UsageError(key + ": expected a nonnegative integer, got '" + value + "'");
  }
  return static_cast<std::size_t>(*parsed);
}

double parse_real(const std::string& key, const std::string& value) {
  const auto parsed = detail::parse_finite(value);
  if (!parsed) {
    throw UsageError(key + ": expected a finite number, got '" + value + "'");
  }
  return *parsed;
}

std::uint64_t parse_seed(const std::string& value) {
  const auto text = detail::trim(value);
  std::uint64_t seed = 0;
  if (text.empty()) {
    throw UsageError("seed: empty value");
  }
  for (const char c : text) {
    if (c < '0' || c > '9') {
      throw UsageError("seed: expected an unsigned integer, got '" + value + "'");
    }
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (seed > (UINT64_MAX - digit) / 10) {
      throw UsageError("seed: value exceeds 64 bits");
    }
    seed = seed * 10 + digit;
  }
  return seed;
}

std::string fmt(const std::optional<double>& v, const char* unset) {
  return v ? detail::format_double(*v) : unset;
}

} // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names{
      "rounds",        "loss",     "stump", "smoothing", "alpha",        "seed",  "label_col",
      "prior_col",     "prior_rules", "eta", "epsilon_clip", "test_fraction", "k", "n_samples",
      "level",         "strategy", "init",  "batch",     "iterations",   "seeds"};
  return names;
}

bool ExperimentConfig::is_key(const std::string& key) {
  const auto& names = keys();
  return std::find(names.begin(), names.end(), key) != names.end();
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value(detail::trim(raw));
  if (key == "rounds") {
    rounds = parse_count(key, value);
    if (rounds < 1) {
      throw UsageError("rounds must be at least 1");
    }
  } else if (key == "loss") {
    if (value == "exp" || value == "exponential") {
      loss = LossKind::exponential;
    } else if (value == "logistic") {
      loss = LossKind::logistic;
    } else {
      throw UsageError("loss must be exp or logistic, got '" + value + "'");
    }
  } else if (key == "stump") {
    if (value == "binary") {
      stump = StumpMode::binary;
    } else if (value == "confidence") {
      stump = StumpMode::confidence_rated;
    } else {
      throw UsageError("stump must be binary or confidence, got '" + value + "'");
    }
  } else if (key == "smoothing") {
    if (value == "auto") {
      smoothing.reset();
    } else {
      smoothing = parse_real(key, value);
      if (*smoothing < 0.0) {
        throw UsageError("smoothing must be nonnegative");
      }
    }
  } else if (key == "alpha") {
    if (value == "auto") {
      alpha.reset();
    } else if (value == "closed") {
      alpha = AlphaStrategy::closed_form_binary;
    } else if (value == "line") {
      alpha = AlphaStrategy::line_search;
    } else if (value == "unit") {
      alpha = AlphaStrategy::unit;
    } else {
      throw UsageError("alpha must be auto, closed, line or unit, got '" + value + "'");
    }
  } else if (key == "seed") {
    seed = parse_seed(value);
  } else if (key == "label_col") {
    label_col = value;
  } else if (key == "prior_col") {
    prior_col = value;
  } else if (key == "prior_rules") {
    prior_rules = value;
  } else if (key == "eta") {
    eta = parse_real(key, value);
    if (*eta < 0.0) {
      throw UsageError("eta must be nonnegative");
    }
  } else if (key == "epsilon_clip") {
    epsilon_clip = parse_real(key, value);
    if (!(epsilon_clip > 0.0 && epsilon_clip < 0.5)) {
      throw UsageError("epsilon_clip must lie in (0, 0.5)");
    }
  } else if (key == "test_fraction") {
    test_fraction = parse_real(key, value);
    if (!(*test_fraction > 0.0 && *test_fraction < 1.0)) {
      throw UsageError("test_fraction must lie strictly between 0 and 1");
    }
  } else if (key == "k") {
    k = parse_count(key, value);
    if (k < 1) {
      throw UsageError("k must be at least 1");
    }
  } else if (key == "n_samples") {
    n_samples = parse_count(key, value);
    if (n_samples < 1) {
      throw UsageError("n_samples must be at least 1");
    }
  } else if (key == "level") {
    level = parse_real(key, value);
    if (!(level > 0.0 && level < 1.0)) {
      throw UsageError("level must lie strictly between 0 and 1");
    }
  } else if (key == "strategy") {
    if (value == "uncertainty") {
      strategy = StrategySelection::uncertainty;
    } else if (value == "random") {
      strategy = StrategySelection::random;
    } else if (value == "both") {
      strategy = StrategySelection::both;
    } else {
      throw UsageError("strategy must be uncertainty, random or both, got '" + value + "'");
    }
  } else if (key == "init") {
    init = parse_count(key, value);
    if (init < 1) {
      throw UsageError("init must be at least 1");
    }
  } else if (key == "batch") {
    batch = parse_count(key, value);
    if (batch < 1) {
      throw UsageError("batch must be at least 1");
    }
  } else if (key == "iterations") {
    iterations = parse_count(key, value);
  } else if (key == "seeds") {
    seeds = parse_count(key, value);
    if (seeds < 1) {
      throw UsageError("seeds must be at least 1");
    }
  } else {
    throw UsageError("unknown configuration key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto where = source + ": line " + std::to_string(line_number) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(where + "expected key = value");
    }
    const std::string key(detail::trim(text.substr(0, eq)));
    if (!seen.insert(key).second) {
      throw UsageError(where + "repeated key '" + key + "'");
    }
    try {
      cfg.set(key, std::string(text.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config '" + path + "'");
  }
  return parse(in, path);
}

BoostConfig ExperimentConfig::boost(LossKind default_loss) const {
  BoostConfig cfg;
  cfg.rounds = rounds;
  cfg.loss = loss.value_or(default_loss);
  cfg.stump.mode = stump;
  cfg.stump.smoothing = smoothing;
  cfg.alpha = alpha;
  return cfg;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  const auto alpha_name = [this]() -> std::string {
    if (!alpha) {
      return "auto";
    }
    switch (*alpha) {
    case AlphaStrategy::closed_form_binary:
      return "closed";
    case AlphaStrategy::line_search:
      return "line";
    case AlphaStrategy::unit:
      return "unit";
    }
    return "auto";
  };
  const char* strategy_name = strategy == StrategySelection::uncertainty ? "uncertainty"
                              : strategy == StrategySelection::random    ? "random"
                                                                         : "both";
  return {
      {"rounds", std::to_string(rounds)},
      {"loss", loss ? (*loss == LossKind::exponential ? "exp" : "logistic") : "auto"},
      {"stump", stump == StumpMode::binary ? "binary" : "confidence"},
      {"smoothing", fmt(smoothing, "auto")},
      {"alpha", alpha_name()},
      {"seed", std::to_string(seed)},
      {"label_col", label_col},
      {"prior_col", prior_col.value_or("none")},
      {"prior_rules", prior_rules.value_or("none")},
      {"eta", fmt(eta, "none")},
      {"epsilon_clip", detail::format_double(epsilon_clip)},
      {"test_fraction", fmt(test_fraction, "none")},
      {"k", std::to_string(k)},
      {"n_samples", std::to_string(n_samples)},
      {"level", detail::format_double(level)},
      {"strategy", strategy_name},
      {"init", std::to_string(init)},
      {"batch", std::to_string(batch)},
      {"iterations", std::to_string(iterations)},
      {"seeds", std::to_string(seeds)},
  };
}

} // namespace boostkit
