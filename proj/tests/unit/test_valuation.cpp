#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "optstop/error.hpp"
#include "optstop/valuation.hpp"
#include "../oracles.hpp"

using namespace optstop;

namespace {

RewardSpec put_spec(std::size_t steps, double rate = 0.05, double maturity = 1.0) {
  RewardSpec s;
  s.kind = RewardKind::put;
  s.rate = rate;
  s.steps = steps;
  s.maturity = maturity;
  return s;
}

PathEnsemble gbm_put(double x0, double sigma, double drift, std::size_t steps, std::size_t K,
                     std::uint64_t seed, EnsembleLabel label) {
  GbmSpec g;
  g.x0 = x0;
  g.sigma_scalar = sigma;
  g.drift = drift;
  g.steps = steps;
  return generate_gbm(g, K, seed, label);
}

BaggedStopper leaf_stopper(const RewardSpec& spec, int w) {
  std::vector<CartTree> trees(2 * spec.steps, CartTree::leaf(1, w));
  return BaggedStopper(spec, FeatureMode::raw, 1, spec.steps, 2, std::move(trees));
}

}  // namespace

TEST_CASE("mean and standard error") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto r = mean_and_se(v);
  CHECK(r.mean == 2.5);
  CHECK(r.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const std::vector<double> same(10, 7.0);
  CHECK(mean_and_se(same).std_error == 0.0);
}

TEST_CASE("stop-at-start rule is worth u(0) exactly") {
  const auto spec = put_spec(10);
  const auto paths = gbm_put(90.0, 0.2, 0.05, 10, 100, 1, EnsembleLabel::test);
  const auto r = value_of_rule(apply(leaf_stopper(spec, 1), paths));
  CHECK(r.value == 10.0);
  CHECK(r.std_error == 0.0);
  CHECK(r.kind == ValuationKind::v_test);
  CHECK(r.count == 100);
}

TEST_CASE("v_max of a deterministic path and dominance") {
  const auto spec = put_spec(10);
  const auto flat = gbm_put(90.0, 0.0, -0.1, 10, 3, 1, EnsembleLabel::test);
  double best = 0.0;
  for (std::size_t n = 0; n <= 10; ++n) best = std::max(best, reward(spec, n, flat.state(0, n)));
  CHECK(v_max(flat, spec).value == doctest::Approx(best).epsilon(1e-15));

  const auto paths = gbm_put(100.0, 0.2, 0.05, 10, 2000, 4, EnsembleLabel::test);
  const auto top = v_max(paths, spec);
  for (int w : {0, 1}) CHECK(value_of_rule(apply(leaf_stopper(spec, w), paths)).value <= top.value);
}

TEST_CASE("Longstaff-Schwartz on a deterministic deep in-the-money put") {
  const auto spec = put_spec(10);
  const auto paths = gbm_put(1.0, 0.0, 0.05, 10, 50, 1, EnsembleLabel::training);
  const auto ls = ls_value(paths, paths, spec);
  CHECK(ls.exercise_at_start);
  CHECK(ls.train.value == 99.0);
  CHECK(ls.test.value == 99.0);
}

TEST_CASE("Longstaff-Schwartz against a binomial Bermudan put") {
  const std::size_t N = 50;
  const auto spec = put_spec(N);
  const auto train = gbm_put(100.0, 0.2, 0.05, N, 50000, 11, EnsembleLabel::training);
  const auto test = gbm_put(100.0, 0.2, 0.05, N, 50000, 12, EnsembleLabel::test);
  const auto ls = ls_value(train, test, spec);
  const double tree = oracle::crr_bermudan_put(100.0, 100.0, 0.05, 0.2, 1.0, N, 2000);
  CHECK(std::abs(ls.test.value - tree) <= 3.0 * ls.test.std_error + 0.05);
}

TEST_CASE("Longstaff-Schwartz is restricted to the one-dimensional put") {
  RewardSpec call;
  call.kind = RewardKind::max_call;
  call.steps = 5;
  GbmSpec g;
  g.dim = 2;
  g.steps = 5;
  const auto paths = generate_gbm(g, 20, 1, EnsembleLabel::training);
  CHECK_THROWS_AS(ls_value(paths, paths, call), UnsupportedError);
}

TEST_CASE("European prices") {
  CHECK(european_put_price(100, 100, 0.05, 0.05, 0.2, 1.0) ==
        doctest::Approx(oracle::black_scholes_put(100, 100, 0.05, 0.2, 1.0)).epsilon(1e-12));
  CHECK(european_put_price(100, 100, 0.05, 0.05, 0.2, 1.0) == doctest::Approx(5.573526));
  // put-call parity under the pricing drift
  const double c = european_call_price(95, 100, 0.03, 0.03, 0.3, 2.0);
  const double p = european_put_price(95, 100, 0.03, 0.03, 0.3, 2.0);
  CHECK(c - p == doctest::Approx(95 - 100 * std::exp(-0.06)).epsilon(1e-12));
}

TEST_CASE("oracle on one step with two terminal states") {
  RewardSpec spec = put_spec(1, 0.0);
  const PathEnsemble paths(2, 1, 1, {95.0, 100.0, 95.0, 92.0}, 0, EnsembleLabel::test);
  CHECK(oracle_enumerate(paths, spec).value == 5.0);
  CHECK(oracle_brute_force(paths, spec).value == 5.0);
}

TEST_CASE("oracle on a deterministic path is the best reward") {
  RewardSpec spec = put_spec(3, 0.0, 3.0);
  const PathEnsemble paths(1, 3, 1, {100.0, 90.0, 80.0, 95.0}, 0, EnsembleLabel::test);
  CHECK(oracle_enumerate(paths, spec).value == 20.0);
  CHECK(oracle_brute_force(paths, spec).value == 20.0);
}

TEST_CASE("backward induction and brute force agree on random chains") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    const auto chain = oracle::random_chain(rng, 3, {70.0, 85.0, 100.0});
    const auto paths = oracle::chain_ensemble(chain);
    const auto spec = put_spec(3, 0.05, 3.0);
    const double a = oracle_enumerate(paths, spec).value;
    const double b = oracle_brute_force(paths, spec).value;
    const double c = oracle::chain_value(chain, [&](std::size_t n, double x) {
      return reward(spec, n, std::span<const double>(&x, 1));
    });
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("brute force refuses oversized rule spaces") {
  const auto paths = gbm_put(100.0, 0.2, 0.05, 10, 100, 1, EnsembleLabel::test);
  CHECK_THROWS_AS(oracle_brute_force(paths, put_spec(10)), ParameterError);
}

TEST_CASE("boundary extraction") {
  const auto spec = put_spec(5);
  const auto paths = gbm_put(90.0, 0.2, 0.05, 5, 30, 2, EnsembleLabel::test);
  const auto never = extract_boundary(apply(leaf_stopper(spec, 0), paths), paths);
  CHECK(never.rows.empty());
  for (std::size_t n = 0; n < 5; ++n) CHECK(never.count[n] == 0);
  CHECK(never.count[5] == 30);

  StopResult one;
  one.stop_step = {3, 5, 2};
  one.reward = {20.0, 0.0, 0.0};
  one.stop_count = {0, 0, 1, 1, 0, 1};
  const PathEnsemble two(3, 5, 1,
                         {100, 95, 90, 80, 85, 90, 100, 100, 100, 100, 100, 100,  //
                          100, 105, 110, 104, 100, 99},
                         0, EnsembleLabel::test);
  const std::vector<double> theory{90, 90, 90, 85, 90, 100};
  const auto b = extract_boundary(one, two, std::span<const double>(theory));
  REQUIRE(b.rows.size() == 1);
  CHECK(b.rows[0].step == 3);
  CHECK(b.rows[0].value == 80.0);
  CHECK(b.rows[0].path == 0);
  CHECK(*b.rows[0].residual == -5.0);
  CHECK(*b.mean[3] == 80.0);
  CHECK(b.count[3] == 1);
  CHECK_FALSE(b.mean[2].has_value());
  CHECK(b.count[2] == 1);
  CHECK(b.zero_reward[2] == 1);
}
