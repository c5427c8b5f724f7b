// optstop: command-line front end for the tree-based optimal stopping engine.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "optstop/config.hpp"
#include "optstop/error.hpp"
#include "optstop/experiment.hpp"
#include "optstop/hash.hpp"
#include "optstop/valuation.hpp"

namespace fs = std::filesystem;
using namespace optstop;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed_train;
  std::optional<std::uint64_t> seed_test;
  std::optional<int> threads;
  std::optional<std::string> out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value config file");
  app->add_option("--set", c.overrides, "override one field, key=value (repeatable)")
      ->take_all();
  app->add_option("--seed-train", c.seed_train, "training ensemble seed");
  app->add_option("--seed-test", c.seed_test, "test ensemble seed");
  app->add_option("--threads", c.threads, "OpenMP thread count")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output directory");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig config;
  if (!c.config_path.empty()) config = load_config(c.config_path);
  apply_overrides(config, c.overrides);
  if (c.seed_train) config.seed_train = *c.seed_train;
  if (c.seed_test) config.seed_test = *c.seed_test;
  if (c.out) config.out = *c.out;
  if (c.threads) omp_set_num_threads(*c.threads);
  return config;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void print_reports(const ExperimentResult& r) {
  for (const auto& v : r.reports) {
    fmt::print("{:<12} {:>12.6f}  se {:.6f}\n", to_string(v.kind), v.value, v.std_error);
  }
}

void print_written(const std::vector<fs::path>& files) {
  for (const auto& f : files) fmt::print("wrote {}\n", f.string());
}

int cmd_simulate(const Common& common) {
  auto config = resolve(common);
  config.validate();
  fs::create_directories(config.out);
  for (auto label : {EnsembleLabel::training, EnsembleLabel::test}) {
    const auto paths = make_ensemble(config, label);
    const auto path = fs::path(config.out) / fmt::format("ensemble_{}.csv", to_string(label));
    auto out = open_file(path);
    write_ensemble_csv(out, paths);
    fmt::print("wrote {}\n", path.string());
  }
  return 0;
}

int cmd_train(const Common& common) {
  auto config = resolve(common);
  config.validate();
  const auto paths = make_ensemble(config, EnsembleLabel::training);
  const auto stopper = train(paths, config.reward_spec(), config.train_config());
  fs::create_directories(config.out);
  const auto path = fs::path(config.out) / "stopper.txt";
  auto out = open_file(path);
  write_stopper(out, config, stopper);
  auto cfg = open_file(fs::path(config.out) / "config.resolved.txt");
  cfg << provenance_line(config) << config.serialize();
  fmt::print("stopper {} written to {}\n", hex64(stopper.hash()), path.string());
  return 0;
}

int cmd_evaluate(const Common& common, const std::string& model, bool boundary) {
  auto config = resolve(common);
  if (boundary) config.boundary = true;
  std::optional<ExperimentResult> result;
  if (model.empty()) {
    result.emplace(run_experiment(config));
  } else {
    std::ifstream in(model);
    if (!in) throw ConfigError(fmt::format("cannot open stopper dump '{}'", model));
    result.emplace(evaluate_stopper(config, BaggedStopper::read(in)));
  }
  print_reports(*result);
  print_written(write_artifacts(*result, config.out));
  return 0;
}

int cmd_benchmark(const Common& common, const std::string& suite_name, double scale,
                  std::size_t max_dim) {
  const auto suite = parse_benchmark_suite(suite_name);
  BenchmarkOptions options;
  options.scale = scale;
  options.max_dim = max_dim;
  options.overrides = common.overrides;
  Common base_only = common;
  base_only.overrides.clear();
  options.base = resolve(base_only);
  const auto rows = run_benchmark(suite, options, [](const BenchmarkRow& r) {
    fmt::print("D={:<4} x0={:<6g} v_test={:.4f} (se {:.4f}){} [{:.1f}s]\n", r.config.dim,
               r.config.x0, r.v_test, r.v_test_se,
               r.reference_v_test ? fmt::format(" ref {:.3f}", *r.reference_v_test) : "",
               r.seconds);
    std::fflush(stdout);
  });
  fs::create_directories(options.base.out);
  const auto table = fs::path(options.base.out) / fmt::format("benchmark_{}.csv", suite_name);
  const auto timing =
      fs::path(options.base.out) / fmt::format("benchmark_{}_timing.csv", suite_name);
  {
    auto out = open_file(table);
    write_benchmark_csv(out, suite, rows);
  }
  {
    auto out = open_file(timing);
    write_benchmark_timing_csv(out, rows);
  }
  print_written({table, timing});
  return 0;
}

int cmd_oracle(const Common& common, const std::string& paths_file, bool brute_force) {
  auto config = resolve(common);
  std::ifstream in(paths_file);
  if (!in) throw ConfigError(fmt::format("cannot open ensemble '{}'", paths_file));
  const auto paths = read_ensemble_csv(in);
  const auto spec = config.reward_spec();
  std::vector<ValuationReport> reports{oracle_enumerate(paths, spec), v_max(paths, spec)};
  if (brute_force) reports.push_back(oracle_brute_force(paths, spec));
  for (const auto& r : reports) fmt::print("{:<12} {:.10g}\n", to_string(r.kind), r.value);
  fs::create_directories(config.out);
  const auto path = fs::path(config.out) / "oracle.csv";
  auto out = open_file(path);
  write_valuation_csv(out, config, reports);
  fmt::print("wrote {}\n", path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal stopping with bagged Delta-split trees"};
  app.require_subcommand(1);

  Common simulate_opts, train_opts, evaluate_opts, boundary_opts, benchmark_opts, oracle_opts;

  auto* simulate = app.add_subcommand("simulate", "write the training and test ensembles as CSV");
  add_common(simulate, simulate_opts);

  auto* train_cmd = app.add_subcommand("train", "train a bagged stopper and dump it");
  add_common(train_cmd, train_opts);

  std::string model;
  auto* evaluate = app.add_subcommand("evaluate", "train (or load) and value a stopper");
  add_common(evaluate, evaluate_opts);
  evaluate->add_option("--model", model, "stopper dump to evaluate instead of training");

  std::string boundary_model;
  auto* boundary = app.add_subcommand("boundary", "evaluate and extract the stopping boundary");
  add_common(boundary, boundary_opts);
  boundary->add_option("--model", boundary_model, "stopper dump to evaluate instead of training");

  std::string suite = "put";
  double scale = 1.0;
  std::size_t max_dim = 0;
  auto* benchmark = app.add_subcommand("benchmark", "reproduce a benchmark table");
  add_common(benchmark, benchmark_opts);
  benchmark->add_option("--suite", suite, "put | maxcall_sym | maxcall_asym | barrier");
  benchmark->add_option("--scale", scale, "multiplier on the published path counts");
  benchmark->add_option("--max-dim", max_dim, "skip rows with more dimensions (0: none)");

  std::string paths_file;
  bool brute_force = false;
  auto* oracle = app.add_subcommand("oracle", "exact optimum on a small discrete ensemble");
  add_common(oracle, oracle_opts);
  oracle->add_option("--paths", paths_file, "ensemble CSV")->required();
  oracle->add_flag("--brute-force", brute_force, "also enumerate every rule");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(simulate_opts);
    if (*train_cmd) return cmd_train(train_opts);
    if (*evaluate) return cmd_evaluate(evaluate_opts, model, false);
    if (*boundary) return cmd_evaluate(boundary_opts, boundary_model, true);
    if (*benchmark) return cmd_benchmark(benchmark_opts, suite, scale, max_dim);
    if (*oracle) return cmd_oracle(oracle_opts, paths_file, brute_force);
  } catch (const UnsupportedError& e) {
    fmt::print(stderr, "unsupported: {}\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
