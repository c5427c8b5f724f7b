// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "optstop/cart.hpp"
#include "optstop/experiment.hpp"
#include "optstop/valuation.hpp"
#include "../oracles.hpp"

using namespace optstop;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  fmt::print("criterion {:>2} {:<34} {}  {}\n", id, name, ok ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double value(const ExperimentResult& r, ValuationKind kind) { return r.find(kind)->value; }
double se(const ExperimentResult& r, ValuationKind kind) { return r.find(kind)->std_error; }

// Every experiment run here is also checked against its own v_max.
std::vector<std::string> dominance_log;
bool dominance_ok = true;

ExperimentResult run(const ExperimentConfig& c, const std::string& tag) {
  auto r = run_experiment(c);
  const double vt = value(r, ValuationKind::v_test);
  const double vm = value(r, ValuationKind::v_max);
  if (!(vt <= vm)) dominance_ok = false;
  dominance_log.push_back(fmt::format("{} {:.4f}<={:.4f}", tag, vt, vm));
  return r;
}

ExperimentConfig put_config(double x0) {
  ExperimentConfig c;
  c.x0 = x0;
  c.k_train = 50000;
  c.k_test = 50000;
  c.feature_mode = FeatureMode::raw;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

SampleSet random_sample_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 20), dims(1, 3), coord(0, 5), num(-16, 16);
  const std::size_t p = size(rng), d = dims(rng);
  std::vector<double> pts, del;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < d; ++j) pts.push_back(coord(rng));
    del.push_back(num(rng) / 8.0);
  }
  return removal(pts, d, del);
}

void criterion_put_reference() {
  const auto r = run(put_config(100.0), "put100");
  const double v = value(r, ValuationKind::v_test);
  const double ls = value(r, ValuationKind::ls_test);
  const bool ok = std::abs(v - 6.068) <= 0.15 && std::abs(ls - 6.049) <= 0.15;
  report(1, "put x=100 vs published", ok,
         fmt::format("v_test={:.4f} (6.068+-0.15) ls_test={:.4f} (6.049+-0.15)", v, ls));
}

void criterion_zero_rate() {
  auto c = put_config(100.0);
  c.rate = 0.0;
  c.drift = 0.0;
  const auto r = run(c, "put_r0");
  const double euro = oracle::black_scholes_put(100.0, 100.0, 0.0, 0.2, 1.0);
  const double v = value(r, ValuationKind::v_test);
  const double s = se(r, ValuationKind::v_test);
  const double ls = value(r, ValuationKind::ls_test);
  const double ls_se = se(r, ValuationKind::ls_test);
  const bool ok =
      std::abs(v - euro) <= 3.0 * s + 0.05 && std::abs(ls - euro) <= 3.0 * ls_se + 0.05;
  report(2, "zero-rate put vs European", ok,
         fmt::format("v_test={:.4f} ls_test={:.4f} european={:.4f} tol={:.4f}", v, ls, euro,
                     3.0 * s + 0.05));
}

void criterion_max_call() {
  ExperimentConfig c;
  c.model = RewardKind::max_call;
  c.dim = 5;
  c.x0 = 100.0;
  c.drift = -0.05;
  c.maturity = 3.0;
  c.steps = 9;
  c.sigma = 0.2;
  c.feature_mode = FeatureMode::four_features;
  c.k_train = 50000;
  c.k_test = 100000;
  const auto r = run(c, "maxcall5");
  const double v = value(r, ValuationKind::v_test);
  report(3, "symmetric max-call D=5 x=100", v >= 25.3 && v <= 26.4,
         fmt::format("v_test={:.4f} in [25.3, 26.4]", v));
}

void criterion_barrier() {
  ExperimentConfig c;
  c.model = RewardKind::max_call_barrier;
  c.dim = 4;
  c.x0 = 90.0;
  c.maturity = 3.0;
  c.steps = 53;
  c.barrier = 170.0;
  c.feature_mode = FeatureMode::four_features;
  c.k_train = 20000;
  c.k_test = 50000;
  const auto r = run(c, "barrier4");
  const double v = value(r, ValuationKind::v_test);
  report(4, "barrier max-call D=4 x=90", std::abs(v - 34.744) <= 0.03 * 34.744,
         fmt::format("v_test={:.4f} (34.744 +-3%)", v));
}

void criterion_split_optimality() {
  std::mt19937_64 rng(20240501);
  int mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto s = random_sample_set(rng);
    const auto got = delta_split(s);
    const auto want = oracle::exhaustive_delta_split(s);
    const bool same = got.is_leaf == want.is_leaf &&
                      (got.is_leaf ? got.weight == want.weight
                                   : got.dim == want.dim && got.threshold == want.threshold &&
                                         got.score == want.score);
    if (!same) ++mismatches;
  }
  const auto fig = delta_split(removal(std::vector<double>{2, 6, 5, 5, 3, 3, 6, 2}, 2,
                                       std::vector<double>{2, -0.5, -0.5, 2}));
  const bool fig_ok = fig.is_leaf && fig.weight == 0;
  report(5, "delta split vs exhaustive search", mismatches == 0 && fig_ok,
         fmt::format("{} mismatches in 1000 sets; cross example -> {}", mismatches,
                     fig_ok ? "Leaf 0" : "wrong"));
}

void criterion_prototype_identity() {
  std::mt19937_64 rng(777);
  int bad = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = random_sample_set(rng);
    const auto tree = grow(s, GrowConfig{64, 1, Splitter::prototype});
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      lhs += s.weight(i) * tree.predict(s.point(i));
      rhs += std::min(s.weight(i), 0.0);
    }
    if (lhs != rhs) ++bad;
  }
  report(6, "prototype training optimality", bad == 0,
         fmt::format("{} of 200 sets violate sum m*delta*g = sum min(m*delta, 0)", bad));
}

void criterion_markov_oracle() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> horizon(1, 4);
  int disagree = 0, exceed = 0, done = 0;
  double worst_gap = 0.0;
  while (done < 100) {
    const auto chain = oracle::random_chain(rng, horizon(rng), {70.0, 85.0, 100.0, 115.0});
    const auto paths = oracle::chain_ensemble(chain);
    if (paths.num_paths() < 2) continue;
    RewardSpec spec;
    spec.kind = RewardKind::put;
    spec.steps = chain.steps();
    spec.maturity = 0.25 * static_cast<double>(chain.steps());
    const double induction = oracle_enumerate(paths, spec).value;
    const double brute = oracle_brute_force(paths, spec).value;
    const double exact = oracle::chain_value(chain, [&](std::size_t n, double x) {
      return reward(spec, n, std::span<const double>(&x, 1));
    });
    const double tol = 1e-9 * std::max(1.0, std::abs(induction));
    if (std::abs(induction - brute) > tol || std::abs(induction - exact) > tol) ++disagree;

    TrainConfig cfg;
    cfg.bags = 2;
    cfg.grow.min_node_size = 1;
    cfg.seed_bagging = static_cast<std::uint64_t>(done);
    const auto stopper = train(paths, spec, cfg);
    const double trained = value_of_rule(apply(stopper, paths)).value;
    if (trained > induction + tol) ++exceed;
    worst_gap = std::max(worst_gap, induction - trained);
    ++done;
  }
  report(7, "Markov chain oracles", disagree == 0 && exceed == 0,
         fmt::format("100 chains: {} oracle disagreements, {} trained values above optimum "
                     "(largest shortfall {:.4f})",
                     disagree, exceed, worst_gap));
}

void criterion_determinism() {
  auto c = put_config(100.0);
  c.boundary = true;
  const auto a = fs::temp_directory_path() / "optstop_accept_a";
  const auto b = fs::temp_directory_path() / "optstop_accept_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto fa = write_artifacts(run(c, "put100_again1"), a);
  const auto fb = write_artifacts(run(c, "put100_again2"), b);
  bool same = fa.size() == fb.size();
  for (std::size_t i = 0; same && i < fa.size(); ++i) same = slurp(fa[i]) == slurp(fb[i]);
  report(9, "byte-identical outputs", same,
         fmt::format("{} files compared across two runs", fa.size()));
  fs::remove_all(a);
  fs::remove_all(b);
}

void criterion_boundary() {
  auto c = put_config(85.0);
  c.boundary = true;
  const auto r = run(c, "put85");
  const auto& b = *r.boundary;
  bool below = true;
  auto window_mean = [&](std::size_t lo, std::size_t hi) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t n = lo; n <= hi; ++n) {
      if (b.mean[n]) {
        sum += *b.mean[n];
        ++count;
      }
    }
    return count ? sum / count : std::nan("");
  };
  for (std::size_t n = 1; n < c.steps; ++n) {
    if (b.mean[n] && !(*b.mean[n] < 100.0)) below = false;
  }
  const double early = window_mean(1, 10);
  const double late = window_mean(40, 49);
  report(10, "put x=85 boundary shape", below && late > early,
         fmt::format("all means < 100: {}; mean steps 1-10 {:.3f}, steps 40-49 {:.3f}",
                     below ? "yes" : "no", early, late));
}

}  // namespace

int main() {
  try {
    criterion_put_reference();
    criterion_zero_rate();
    criterion_max_call();
    criterion_barrier();
    criterion_split_optimality();
    criterion_prototype_identity();
    criterion_markov_oracle();
    criterion_determinism();
    criterion_boundary();
    report(8, "v_test <= v_max on every run", dominance_ok,
           fmt::format("{} runs checked", dominance_log.size()));
  } catch (const std::exception& e) {
    fmt::print("acceptance aborted: {}\n", e.what());
    return 2;
  }
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
