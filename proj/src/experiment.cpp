#include "optstop/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "optstop/error.hpp"
#include "optstop/hash.hpp"
#include "optstop/references.hpp"

namespace optstop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

std::optional<ValuationReport> european_report(const ExperimentConfig& config) {
  if (config.model != RewardKind::put || config.dim != 1) return std::nullopt;
  const double sigma = config.gbm_spec().resolved_vols().front();
  ValuationReport r;
  r.kind = ValuationKind::european_bs;
  r.value = european_put_price(config.x0, config.strike, config.rate, config.drift, sigma,
                               config.maturity);
  return r;
}

std::optional<double> reference_for(const ExperimentConfig& config, ValuationKind kind) {
  if (kind == ValuationKind::v_test) return config.reference_v_test;
  if (kind == ValuationKind::ls_test) return config.reference_ls_test;
  return std::nullopt;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

const ValuationReport* ExperimentResult::find(ValuationKind kind) const {
  for (const auto& r : reports) {
    if (r.kind == kind) return &r;
  }
  return nullptr;
}

PathEnsemble make_ensemble(const ExperimentConfig& config, EnsembleLabel label) {
  const bool training = label == EnsembleLabel::training;
  auto paths = generate_gbm(config.gbm_spec(), training ? config.k_train : config.k_test,
                            training ? config.seed_train : config.seed_test, label);
  if (config.model == RewardKind::max_call_barrier) {
    return augment_barrier(paths, config.barrier);
  }
  return paths;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const auto spec = config.reward_spec();
  const auto train_paths = make_ensemble(config, EnsembleLabel::training);
  const auto test_paths = make_ensemble(config, EnsembleLabel::test);

  const auto train_start = Clock::now();
  auto stopper = train(train_paths, spec, config.train_config());
  const double train_seconds = seconds_since(train_start);

  const auto on_train = apply(stopper, train_paths);
  const auto on_test = apply(stopper, test_paths);

  ExperimentResult result{config, std::move(stopper), {}, std::nullopt, train_seconds, 0.0};
  result.reports.push_back(value_of_rule(on_train));
  result.reports.push_back(value_of_rule(on_test));
  result.reports.push_back(v_max(test_paths, spec));
  if (config.run_ls()) {
    auto ls = ls_value(train_paths, test_paths, spec);
    result.reports.push_back(ls.train);
    result.reports.push_back(ls.test);
  }
  if (auto euro = european_report(config)) result.reports.push_back(*euro);

  if (config.boundary) {
    if (config.boundary_file.empty()) {
      result.boundary = extract_boundary(on_test, test_paths);
    } else {
      const auto theory = read_boundary_file(config.boundary_file, config.steps);
      result.boundary =
          extract_boundary(on_test, test_paths, std::span<const double>(theory));
    }
  }
  result.total_seconds = seconds_since(start);
  return result;
}

ExperimentResult evaluate_stopper(const ExperimentConfig& config, BaggedStopper stopper) {
  config.validate();
  const auto start = Clock::now();
  const auto spec = config.reward_spec();
  if (stopper.reward_spec().hash() != spec.hash()) {
    throw ParameterError(fmt::format("stopper was trained for '{}' but the config describes '{}'",
                                     stopper.reward_spec().describe(), spec.describe()));
  }
  const auto test_paths = make_ensemble(config, EnsembleLabel::test);
  const auto on_test = apply(stopper, test_paths);

  ExperimentResult result{config, std::move(stopper), {}, std::nullopt, 0.0, 0.0};
  result.reports.push_back(value_of_rule(on_test));
  result.reports.push_back(v_max(test_paths, spec));
  if (auto euro = european_report(config)) result.reports.push_back(*euro);
  if (config.boundary) {
    if (config.boundary_file.empty()) {
      result.boundary = extract_boundary(on_test, test_paths);
    } else {
      const auto theory = read_boundary_file(config.boundary_file, config.steps);
      result.boundary =
          extract_boundary(on_test, test_paths, std::span<const double>(theory));
    }
  }
  result.total_seconds = seconds_since(start);
  return result;
}

std::vector<double> read_boundary_file(const std::filesystem::path& path, std::size_t steps) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open boundary file '{}'", path.string()));
  std::vector<std::optional<double>> values(steps + 1);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      const auto n = std::stoull(line.substr(0, comma));
      const double b = std::stod(line.substr(comma + 1));
      if (n > steps) throw std::out_of_range("step beyond horizon");
      values[n] = b;
    } catch (const std::exception& e) {
      throw ConfigError(
          fmt::format("{}: line {}: expected 'n,b' ({})", path.string(), line_no, e.what()));
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!values[n]) {
      throw ConfigError(fmt::format("{}: no boundary value for step {}", path.string(), n));
    }
    out.push_back(*values[n]);
  }
  return out;
}

std::string provenance_line(const ExperimentConfig& config) {
  return fmt::format("# config_hash={} seed_train={} seed_test={} seed_bagging={}\n",
                     hex64(config.hash()), config.seed_train, config.seed_test,
                     config.seed_bagging);
}

void write_valuation_csv(std::ostream& out, const ExperimentConfig& config,
                         const std::vector<ValuationReport>& reports) {
  out << provenance_line(config);
  out << "kind,value,se,paths,seed,config_hash,stopper_hash,reference,delta\n";
  const auto config_hash = hex64(config.hash());
  for (const auto& r : reports) {
    const auto ref = reference_for(config, r.kind);
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(r.kind), num(r.value),
                       num(r.std_error), r.count, r.seed, config_hash,
                       r.stopper_hash ? hex64(r.stopper_hash) : std::string{}, opt_num(ref),
                       ref ? num(r.value - *ref) : std::string{});
  }
}

void write_boundary_csv(std::ostream& out, const ExperimentConfig& config,
                        const BoundaryScatter& boundary) {
  out << provenance_line(config);
  const bool residual = !boundary.rows.empty() && boundary.rows.front().residual.has_value();
  out << (residual ? "n,x,path_id,residual\n" : "n,x,path_id\n");
  for (const auto& row : boundary.rows) {
    out << fmt::format("{},{},{}", row.step, num(row.value), row.path);
    if (residual) out << ',' << num(row.residual.value_or(0.0));
    out << '\n';
  }
}

void write_boundary_summary_csv(std::ostream& out, const ExperimentConfig& config,
                                const BoundaryScatter& boundary) {
  out << provenance_line(config);
  out << "n,mean,count,zero_reward\n";
  for (std::size_t n = 0; n < boundary.count.size(); ++n) {
    out << fmt::format("{},{},{},{}\n", n, opt_num(boundary.mean[n]), boundary.count[n],
                       boundary.zero_reward[n]);
  }
}

void write_stopper(std::ostream& out, const ExperimentConfig& config,
                   const BaggedStopper& stopper) {
  out << provenance_line(config);
  stopper.write(out);
}

std::vector<std::filesystem::path> write_artifacts(const ExperimentResult& result,
                                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, auto&& body) {
    const auto path = dir / name;
    auto out = open_out(path);
    body(out);
    if (!out) throw ConfigError(fmt::format("failed writing '{}'", path.string()));
    written.push_back(path);
  };
  emit("valuation.csv",
       [&](std::ostream& o) { write_valuation_csv(o, result.config, result.reports); });
  emit("stopper.txt", [&](std::ostream& o) { write_stopper(o, result.config, result.stopper); });
  emit("config.resolved.txt", [&](std::ostream& o) {
    o << provenance_line(result.config) << result.config.serialize();
  });
  if (result.boundary) {
    emit("boundary.csv",
         [&](std::ostream& o) { write_boundary_csv(o, result.config, *result.boundary); });
    emit("boundary_summary.csv", [&](std::ostream& o) {
      write_boundary_summary_csv(o, result.config, *result.boundary);
    });
  }
  return written;
}

std::string_view to_string(BenchmarkSuite suite) {
  switch (suite) {
    case BenchmarkSuite::put:
      return "put";
    case BenchmarkSuite::maxcall_sym:
      return "maxcall_sym";
    case BenchmarkSuite::maxcall_asym:
      return "maxcall_asym";
    case BenchmarkSuite::barrier:
      return "barrier";
  }
  return "?";
}

BenchmarkSuite parse_benchmark_suite(std::string_view text) {
  for (auto s : {BenchmarkSuite::put, BenchmarkSuite::maxcall_sym, BenchmarkSuite::maxcall_asym,
                 BenchmarkSuite::barrier}) {
    if (text == to_string(s)) return s;
  }
  throw ConfigError(fmt::format(
      "unknown benchmark suite '{}' (expected put, maxcall_sym, maxcall_asym or barrier)", text));
}

std::vector<ExperimentConfig> benchmark_grid(BenchmarkSuite suite,
                                             const BenchmarkOptions& options) {
  if (!(options.scale > 0.0) || !std::isfinite(options.scale)) {
    throw ParameterError("benchmark scale must be positive");
  }
  const auto scaled = [&](double k) {
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(k * options.scale)));
  };
  std::vector<ExperimentConfig> grid;
  auto finish = [&](ExperimentConfig c, double k_train, double k_test) {
    c.k_train = std::max(scaled(k_train), c.bags);
    c.k_test = scaled(k_test);
    c.boundary = false;
    apply_overrides(c, options.overrides);
    if (options.max_dim == 0 || c.dim <= options.max_dim) grid.push_back(std::move(c));
  };

  switch (suite) {
    case BenchmarkSuite::put:
      for (const auto& ref : put_references()) {
        ExperimentConfig c = options.base;
        c.model = RewardKind::put;
        c.dim = 1;
        c.vol_mode = VolMode::symmetric;
        c.sigma = ref.sigma;
        c.x0 = ref.x0;
        c.maturity = ref.maturity;
        c.steps = ref.steps;
        c.drift = 0.05;
        c.rate = 0.05;
        c.strike = 100.0;
        c.feature_mode = FeatureMode::raw;
        c.ls = LsMode::automatic;
        finish(std::move(c), 200000, 200000);
      }
      break;
    case BenchmarkSuite::maxcall_sym:
    case BenchmarkSuite::maxcall_asym: {
      const bool sym = suite == BenchmarkSuite::maxcall_sym;
      for (const auto& ref : max_call_references(sym)) {
        ExperimentConfig c = options.base;
        c.model = RewardKind::max_call;
        c.dim = ref.dim;
        c.x0 = ref.x0;
        c.vol_mode = sym ? VolMode::symmetric : VolMode::asymmetric;
        c.sigma = 0.2;
        c.maturity = 3.0;
        c.steps = 9;
        c.drift = -0.05;
        c.rate = 0.05;
        c.strike = 100.0;
        c.feature_mode = FeatureMode::four_features;
        c.ls = LsMode::automatic;
        finish(std::move(c), 100000, 4096000);
      }
      break;
    }
    case BenchmarkSuite::barrier:
      for (const auto& ref : barrier_references()) {
        ExperimentConfig c = options.base;
        c.model = RewardKind::max_call_barrier;
        c.dim = ref.dim;
        c.x0 = ref.x0;
        c.vol_mode = VolMode::symmetric;
        c.sigma = 0.2;
        c.maturity = 3.0;
        c.steps = 53;
        c.drift = 0.05;
        c.rate = 0.05;
        c.strike = 100.0;
        c.barrier = 170.0;
        c.feature_mode = FeatureMode::four_features;
        c.ls = LsMode::automatic;
        finish(std::move(c), 100000, 100000);
      }
      break;
  }

  // References are attached after overrides so they follow the final feature mode.
  for (auto& c : grid) {
    c.reference_v_test.reset();
    c.reference_ls_test.reset();
    switch (suite) {
      case BenchmarkSuite::put:
        for (const auto& ref : put_references()) {
          if (ref.sigma == c.sigma && ref.x0 == c.x0 && ref.maturity == c.maturity &&
              ref.steps == c.steps && c.feature_mode == FeatureMode::raw) {
            c.reference_v_test = ref.v_test;
            c.reference_ls_test = ref.ls_test;
          }
        }
        break;
      case BenchmarkSuite::maxcall_sym:
      case BenchmarkSuite::maxcall_asym:
        for (const auto& ref : max_call_references(suite == BenchmarkSuite::maxcall_sym)) {
          if (ref.dim != c.dim || ref.x0 != c.x0) continue;
          switch (c.feature_mode) {
            case FeatureMode::four_features:
              c.reference_v_test = ref.v_test_four_features;
              break;
            case FeatureMode::raw_plus_reward:
              c.reference_v_test = ref.v_test_raw_plus_reward;
              break;
            case FeatureMode::raw:
              c.reference_v_test = ref.v_test_raw;
              break;
          }
        }
        break;
      case BenchmarkSuite::barrier:
        for (const auto& ref : barrier_references()) {
          if (ref.dim == c.dim && ref.x0 == c.x0 &&
              c.feature_mode == FeatureMode::four_features) {
            c.reference_v_test = ref.v_test;
          }
        }
        break;
    }
  }
  return grid;
}

std::vector<BenchmarkRow> run_benchmark(BenchmarkSuite suite, const BenchmarkOptions& options,
                                        const std::function<void(const BenchmarkRow&)>& on_row) {
  std::vector<BenchmarkRow> rows;
  for (const auto& config : benchmark_grid(suite, options)) {
    const auto start = Clock::now();
    const auto result = run_experiment(config);
    BenchmarkRow row;
    row.config = config;
    row.v_train = result.find(ValuationKind::v_train)->value;
    const auto* test = result.find(ValuationKind::v_test);
    row.v_test = test->value;
    row.v_test_se = test->std_error;
    row.v_max = result.find(ValuationKind::v_max)->value;
    if (const auto* ls = result.find(ValuationKind::ls_test)) row.ls_test = ls->value;
    row.reference_v_test = config.reference_v_test;
    row.reference_ls_test = config.reference_ls_test;
    row.seconds = seconds_since(start);
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_benchmark_csv(std::ostream& out, BenchmarkSuite suite,
                         const std::vector<BenchmarkRow>& rows) {
  out << fmt::format("# suite={}\n", to_string(suite));
  out << "suite,dim,x0,sigma,maturity,steps,feature_mode,k_train,k_test,v_train,v_test,se,"
         "v_max,ls_test,reference,delta,reference_ls,delta_ls,config_hash\n";
  for (const auto& r : rows) {
    const auto& c = r.config;
    const std::string sigma =
        c.vol_mode == VolMode::asymmetric ? std::string("asym") : num(c.sigma);
    out << fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(suite), c.dim,
        num(c.x0), sigma, num(c.maturity), c.steps, to_string(c.feature_mode), c.k_train,
        c.k_test, num(r.v_train), num(r.v_test), num(r.v_test_se), num(r.v_max),
        opt_num(r.ls_test), opt_num(r.reference_v_test),
        r.reference_v_test ? num(r.v_test - *r.reference_v_test) : std::string{},
        opt_num(r.reference_ls_test),
        (r.reference_ls_test && r.ls_test) ? num(*r.ls_test - *r.reference_ls_test)
                                           : std::string{},
        hex64(c.hash()));
  }
}

void write_benchmark_timing_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "dim,x0,config_hash,seconds\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{:.3f}\n", r.config.dim, num(r.config.x0),
                       hex64(r.config.hash()), r.seconds);
  }
}

}  // namespace optstop
