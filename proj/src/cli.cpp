#include "boostkit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "boostkit/active.hpp"
#include "boostkit/cde.hpp"
#include "boostkit/dataset.hpp"
#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"
#include "boostkit/experiment_config.hpp"
#include "boostkit/losses.hpp"
#include "boostkit/model_io.hpp"
#include "boostkit/prior.hpp"

namespace boostkit {

namespace {

using detail::format_double;

constexpr std::size_t kMarginBins = 20;

// Configuration keys exposed as --flags (underscores become dashes), plus
// the plain string flags of one subcommand.
class CommandFlags {
public:
  explicit CommandFlags(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "key = value configuration file; flags override it");
  }

  void key(const std::string& name, const std::string& help) {
    std::string flag = "--" + name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    options_[name] = app_->add_option(flag, raw_[name], help);
  }

  CLI::Option* path(const std::string& flag, std::string& target, const std::string& help, bool required) {
    auto* option = app_->add_option(flag, target, help);
    if (required) {
      option->required();
    }
    return option;
  }

  bool given(const std::string& name) const {
    const auto it = options_.find(name);
    return it != options_.end() && it->second->count() > 0;
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path_.empty()) {
      cfg = ExperimentConfig::load(config_path_);
    }
    for (const auto& [name, option] : options_) {
      if (option->count() > 0) {
        cfg.set(name, raw_.at(name));
      }
    }
    return cfg;
  }

  CLI::App* app() const { return app_; }

private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> raw_;
  std::map<std::string, CLI::Option*> options_;
};

void add_boost_keys(CommandFlags& flags) {
  flags.key("rounds", "boosting rounds T (default 100)");
  flags.key("stump", "binary | confidence (default binary)");
  flags.key("smoothing", "stump smoothing; default 1/(2m)");
  flags.key("alpha", "auto | closed | line | unit (default auto)");
  flags.key("seed", "random seed (default 1)");
  flags.key("label_col", "label column name (default label)");
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

Provenance provenance_of(const ExperimentConfig& cfg) {
  return Provenance{cfg.seed, cfg.echo()};
}

ClassifierFile load_classifier(const std::string& path) {
  auto file = load_model(path);
  if (auto* classifier = std::get_if<ClassifierFile>(&file)) {
    return std::move(*classifier);
  }
  throw UsageError("'" + path + "' holds a conditional density model; use 'boostkit cde'");
}

DensityFile load_density(const std::string& path) {
  auto file = load_model(path);
  if (auto* density = std::get_if<DensityFile>(&file)) {
    return std::move(*density);
  }
  throw UsageError("'" + path + "' holds a classifier; use predict/eval");
}

FeatureMatrix load_inputs(const std::string& path, const ExperimentConfig& cfg, std::size_t dimension) {
  std::vector<std::string> ignored{cfg.label_col, "prior", "weight"};
  if (cfg.prior_col) {
    ignored.push_back(*cfg.prior_col);
  }
  auto features = load_feature_csv(path, ignored);
  if (features.cols() != dimension) {
    throw DataError("'" + path + "' has " + std::to_string(features.cols()) + " feature columns; model expects " +
                    std::to_string(dimension));
  }
  return features;
}

void check_dimension(const Dataset& ds, std::size_t dimension, const std::string& path) {
  if (ds.dimension() != dimension) {
    throw DataError("'" + path + "' has " + std::to_string(ds.dimension()) + " feature columns; model expects " +
                    std::to_string(dimension));
  }
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string out;
  std::string stats;
  std::string test;
};

int cmd_train(const CommandFlags& flags, const TrainArgs& args, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  if (cfg.eta && !cfg.uses_prior()) {
    throw UsageError("--eta requires --prior-col or --prior-rules");
  }
  if (cfg.uses_prior() && !cfg.eta) {
    throw UsageError("prior-knowledge boosting requires --eta (it has no default)");
  }
  if (cfg.prior_col && cfg.prior_rules) {
    throw UsageError("use either --prior-col or --prior-rules, not both");
  }
  if (!args.test.empty() && cfg.test_fraction) {
    throw UsageError("use either --test or --test-fraction, not both");
  }

  CsvOptions csv;
  csv.label_column = cfg.label_col;
  if (cfg.prior_col) {
    csv.prior_column = *cfg.prior_col;
    csv.require_prior = true;
  }
  Dataset data = load_csv(args.data, csv);
  std::optional<Dataset> test;
  if (!args.test.empty()) {
    CsvOptions test_csv = csv;
    test_csv.require_prior = false;
    test = load_csv(args.test, test_csv);
  } else if (cfg.test_fraction) {
    Rng rng(cfg.seed);
    auto parts = split(data, *cfg.test_fraction, rng);
    data = std::move(parts.first);
    test = std::move(parts.second);
  }

  TrainResult result;
  if (cfg.uses_prior()) {
    const BoostConfig boost = cfg.boost(LossKind::logistic);
    if (boost.loss != LossKind::logistic) {
      throw UsageError("prior-knowledge boosting uses logistic loss");
    }
    std::vector<double> prior =
        cfg.prior_col ? *data.prior() : PriorRule::load(*cfg.prior_rules).evaluate(data.features());
    auto trained = train_with_prior(data, prior, PriorConfig{*cfg.eta, cfg.epsilon_clip}, boost,
                                    test ? &*test : nullptr);
    result = TrainResult{std::move(trained.model), std::move(trained.stats)};
  } else {
    result = train(data, cfg.boost(LossKind::exponential), test ? &*test : nullptr);
  }

  const ClassifierFile file{result.model, link_for(result.model.loss()), data.dimension(), provenance_of(cfg)};
  save_model(file, args.out);
  std::ostringstream stats;
  write_stats_csv(result.stats, stats);
  const std::string stats_path = args.stats.empty() ? args.out + ".stats.csv" : args.stats;
  write_file_atomic(stats_path, stats.str());

  const auto& last = result.stats.back();
  out << "trained " << result.model.size() << " rounds (" << to_string(result.model.loss()) << " loss) on "
      << data.size() << " examples\n";
  out << "final train_error " << format_double(last.train_error);
  if (last.test_error) {
    out << ", test_error " << format_double(*last.test_error);
  }
  out << "\nmodel: " << args.out << "\nstats: " << stats_path << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- predict

int cmd_predict(const CommandFlags& flags, const std::string& model_path, const std::string& data_path,
                const std::string& out_path, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const auto file = load_classifier(model_path);
  const auto features = load_inputs(data_path, cfg, file.dimension);
  std::ostringstream csv;
  csv << "row,f,H,prob_positive\n";
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double f = file.model.score(features.row(i));
    csv << i << ',' << format_double(f) << ',' << (f >= 0.0 ? 1 : -1) << ','
        << format_double(prob_positive(f, file.link)) << '\n';
  }
  emit(out_path, csv.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const CommandFlags& flags, const std::string& model_path, const std::string& data_path,
             const std::string& out_path, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const auto file = load_classifier(model_path);
  CsvOptions csv;
  csv.label_column = cfg.label_col;
  const Dataset data = load_csv(data_path, csv);
  if (!data.is_classification()) {
    throw DataError("'" + data_path + "' labels are not all -1/+1");
  }
  check_dimension(data, file.dimension, data_path);

  const auto f = scores(file.model, data);
  std::ostringstream report;
  report << "examples " << data.size() << '\n';
  report << "rounds " << file.model.size() << '\n';
  report << "error_rate " << format_double(error_rate(f, data)) << '\n';
  report << "exponential_loss " << format_double(empirical_loss(f, data, MarginLoss::exponential)) << '\n';
  report << "logistic_loss " << format_double(empirical_loss(f, data, MarginLoss::logistic1)) << '\n';
  report << "logistic2_loss " << format_double(empirical_loss(f, data, MarginLoss::logistic2)) << '\n';

  const auto m = margins(file.model, data);
  std::vector<std::size_t> counts(kMarginBins, 0);
  for (const double v : m) {
    const double position = (std::clamp(v, -1.0, 1.0) + 1.0) / 2.0 * static_cast<double>(kMarginBins);
    counts[std::min(kMarginBins - 1, static_cast<std::size_t>(position))] += 1;
  }
  report << "margin_histogram\nbin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < kMarginBins; ++b) {
    const double lo = -1.0 + 2.0 * static_cast<double>(b) / kMarginBins;
    const double hi = -1.0 + 2.0 * static_cast<double>(b + 1) / kMarginBins;
    report << format_double(lo) << ',' << format_double(hi) << ',' << counts[b] << '\n';
  }

  const bool binary = std::all_of(file.model.terms().begin(), file.model.terms().end(),
                                  [](const Term& t) { return t.stump.is_binary(); });
  if (file.model.loss() == LossKind::exponential && binary) {
    report << "bound_chain\n";
    write_bound_report(bound_report(replay_stats(file.model, data)), report);
  } else {
    report << "bound_chain not applicable (needs an exponential-loss model with binary stumps)\n";
  }
  emit(out_path, report.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------- cde

int cmd_cde_train(const CommandFlags& flags, const std::string& data_path, const std::string& out_path,
                  std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  if (cfg.loss && *cfg.loss != LossKind::logistic) {
    throw UsageError("conditional density estimation uses logistic loss");
  }
  CsvOptions csv;
  csv.label_column = cfg.label_col;
  const Dataset data = load_csv(data_path, csv);
  const auto model = train_cde(data, cfg.k, cfg.boost(LossKind::logistic));
  save_model(DensityFile{model, provenance_of(cfg)}, out_path);
  out << "trained " << model.classifiers.size() << " breakpoint classifiers";
  if (model.breakpoints.size() < model.breakpoints.requested) {
    out << " (k reduced from " << model.breakpoints.requested << " by duplicate quantiles)";
  }
  const auto constants = std::count(model.constant.begin(), model.constant.end(), true);
  if (constants > 0) {
    out << "; " << constants << " single-class breakpoint(s) use a constant model";
  }
  out << "\nmodel: " << out_path << '\n';
  return kExitOk;
}

int cmd_cde_query(const std::string& action, const CommandFlags& flags, const std::string& model_path,
                  const std::string& data_path, const std::string& out_path, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const auto file = load_density(model_path);
  const auto& model = file.model;
  const auto features = load_inputs(data_path, cfg, model.dimension);
  std::ostringstream csv;
  if (action == "sample") {
    Rng rng(cfg.seed);
    csv << "row,value\n";
    for (std::size_t i = 0; i < features.rows(); ++i) {
      const auto dist = conditional_distribution(model, features.row(i));
      for (std::size_t s = 0; s < cfg.n_samples; ++s) {
        csv << i << ',' << format_double(sample(model.breakpoints, dist, rng)) << '\n';
      }
    }
  } else if (action == "quantile") {
    csv << "row,value\n";
    for (std::size_t i = 0; i < features.rows(); ++i) {
      csv << i << ',' << format_double(quantile(model, features.row(i), cfg.level)) << '\n';
    }
  } else {
    csv << "row,bin,lo,hi,mass\n";
    for (std::size_t i = 0; i < features.rows(); ++i) {
      const auto dist = conditional_distribution(model, features.row(i));
      for (std::size_t j = 0; j < dist.masses.size(); ++j) {
        csv << i << ',' << j << ',' << format_double(model.breakpoints.bin_lo(j)) << ','
            << format_double(model.breakpoints.bin_hi(j)) << ',' << format_double(dist.masses[j]) << '\n';
      }
    }
  }
  emit(out_path, csv.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------- active

int cmd_active(const CommandFlags& flags, const std::string& data_path, const std::string& test_path,
               const std::string& out_path, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = flags.resolve();
  CsvOptions csv;
  csv.label_column = cfg.label_col;
  const Dataset pool = load_csv(data_path, csv);
  const Dataset test = load_csv(test_path, csv);

  std::vector<QueryStrategy> strategies;
  if (cfg.strategy != StrategySelection::random) {
    strategies.push_back(QueryStrategy::uncertainty);
  }
  if (cfg.strategy != StrategySelection::uncertainty) {
    strategies.push_back(QueryStrategy::random);
  }
  std::ostringstream curve;
  write_curve_header(curve);
  for (const auto strategy : strategies) {
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
      ActiveConfig active;
      active.init_batch = cfg.init;
      active.batch = cfg.batch;
      active.iterations = cfg.iterations;
      active.strategy = strategy;
      active.boost = cfg.boost(LossKind::exponential);
      active.seed = cfg.seed + s;
      const auto result = simulate(pool, test, active);
      if (result.truncated) {
        err << "warning: " << to_string(strategy) << " run with seed " << active.seed
            << " exhausted the pool (truncated)\n";
      }
      write_curve_rows(result.curve, curve);
    }
  }
  emit(out_path, curve.str(), out);
  return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"boostkit: AdaBoost with decision stumps, logistic boosting, conditional density "
               "estimation, prior knowledge and active learning"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Boost decision stumps on a labeled CSV");
  CommandFlags train_flags(train_cmd);
  add_boost_keys(train_flags);
  train_flags.key("loss", "exp | logistic (default exp; logistic with a prior)");
  train_flags.key("prior_col", "prior probability column; routes through prior-knowledge boosting");
  train_flags.key("prior_rules", "prior rule-table file; routes through prior-knowledge boosting");
  train_flags.key("eta", "weight of the prior term (required with a prior)");
  train_flags.key("epsilon_clip", "probability clip inside the relative entropy (default 1e-6)");
  train_flags.key("test_fraction", "hold out this fraction of --data for test error");
  TrainArgs train_args;
  train_flags.path("--data", train_args.data, "training CSV", true);
  train_flags.path("--out", train_args.out, "model file to write", true);
  train_flags.path("--stats", train_args.stats, "per-round stats CSV (default <out>.stats.csv)", false);
  train_flags.path("--test", train_args.test, "labeled test CSV for test error", false);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Score a CSV with a trained classifier");
  CommandFlags predict_flags(predict_cmd);
  predict_flags.key("label_col", "label column to skip if present (default label)");
  predict_flags.key("prior_col", "prior column to skip if present");
  std::string predict_model, predict_data, predict_out;
  predict_flags.path("--model", predict_model, "model file", true);
  predict_flags.path("--data", predict_data, "input CSV", true);
  predict_flags.path("--out", predict_out, "predictions CSV (default stdout)", false);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Error, losses, margins and bound chain on labeled data");
  CommandFlags eval_flags(eval_cmd);
  eval_flags.key("label_col", "label column name (default label)");
  std::string eval_model, eval_data, eval_out;
  eval_flags.path("--model", eval_model, "model file", true);
  eval_flags.path("--data", eval_data, "labeled CSV", true);
  eval_flags.path("--out", eval_out, "report file (default stdout)", false);

  // cde
  auto* cde_cmd = app.add_subcommand("cde", "Conditional density estimation");
  cde_cmd->require_subcommand(1);
  auto* cde_train = cde_cmd->add_subcommand("train", "Fit one logistic booster per breakpoint");
  CommandFlags cde_train_flags(cde_train);
  add_boost_keys(cde_train_flags);
  cde_train_flags.key("loss", "must be logistic if given");
  cde_train_flags.key("k", "number of breakpoints (default 10)");
  std::string cde_data, cde_out;
  cde_train_flags.path("--data", cde_data, "CSV with real-valued labels", true);
  cde_train_flags.path("--out", cde_out, "model file to write", true);

  struct QueryCommand {
    std::string action;
    CLI::App* app;
    std::unique_ptr<CommandFlags> flags;
    std::string model, data, out;
  };
  std::vector<std::unique_ptr<QueryCommand>> queries;
  for (const auto& [action, help] : std::vector<std::pair<std::string, std::string>>{
           {"sample", "Draw samples from each row's predicted distribution"},
           {"quantile", "Quantile of each row's predicted distribution"},
           {"dist", "Bin masses of each row's predicted distribution"}}) {
    auto query = std::make_unique<QueryCommand>();
    query->action = action;
    query->app = cde_cmd->add_subcommand(action, help);
    query->flags = std::make_unique<CommandFlags>(query->app);
    query->flags->key("label_col", "label column to skip if present (default label)");
    if (action == "sample") {
      query->flags->key("seed", "random seed (default 1)");
      query->flags->key("n_samples", "samples per row (default 1)");
    }
    if (action == "quantile") {
      query->flags->key("level", "quantile level in (0,1) (default 0.5)");
    }
    query->flags->path("--model", query->model, "cde model file", true);
    query->flags->path("--data", query->data, "input CSV", true);
    query->flags->path("--out", query->out, "output CSV (default stdout)", false);
    queries.push_back(std::move(query));
  }

  // active
  auto* active_cmd = app.add_subcommand("active", "Simulate pool-based active learning");
  CommandFlags active_flags(active_cmd);
  add_boost_keys(active_flags);
  active_flags.key("loss", "exp | logistic (default exp)");
  active_flags.key("strategy", "uncertainty | random | both (default both)");
  active_flags.key("init", "initial random batch (default 500)");
  active_flags.key("batch", "labels acquired per iteration (default 200)");
  active_flags.key("iterations", "acquisition iterations (default 10)");
  active_flags.key("seeds", "number of seeds, starting at --seed (default 1)");
  std::string active_data, active_test, active_out;
  active_flags.path("--data", active_data, "labeled pool CSV", true);
  active_flags.path("--test", active_test, "labeled test CSV", true);
  active_flags.path("--out", active_out, "curve CSV (default stdout)", false);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) {
      return cmd_train(train_flags, train_args, out);
    }
    if (predict_cmd->parsed()) {
      return cmd_predict(predict_flags, predict_model, predict_data, predict_out, out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_flags, eval_model, eval_data, eval_out, out);
    }
    if (cde_train->parsed()) {
      return cmd_cde_train(cde_train_flags, cde_data, cde_out, out);
    }
    for (const auto& query : queries) {
      if (query->app->parsed()) {
        return cmd_cde_query(query->action, *query->flags, query->model, query->data, query->out, out);
      }
    }
    if (active_cmd->parsed()) {
      return cmd_active(active_flags, active_data, active_test, active_out, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  err << app.help();
  return kExitUsage;
}

} // namespace boostkit
