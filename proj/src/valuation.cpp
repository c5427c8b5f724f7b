#include "optstop/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "optstop/error.hpp"

namespace optstop {

std::string_view to_string(ValuationKind kind) {
  switch (kind) {
    case ValuationKind::v_train:
      return "v_train";
    case ValuationKind::v_test:
      return "v_test";
    case ValuationKind::ls_train:
      return "ls_train";
    case ValuationKind::ls_test:
      return "ls_test";
    case ValuationKind::v_max:
      return "v_max";
    case ValuationKind::oracle:
      return "oracle";
    case ValuationKind::european_bs:
      return "european_bs";
  }
  return "?";
}

MeanSe mean_and_se(std::span<const double> values) {
  if (values.empty()) throw ParameterError("mean_and_se: no values");
  const auto count = static_cast<double>(values.size());
  // Summing offsets from the first value keeps constant inputs exact.
  const double shift = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double mean = shift + sum / count;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (count - 1.0) / count)};
}

ValuationReport value_of_rule(const StopResult& result) {
  if (result.reward.empty()) throw ParameterError("value_of_rule: empty result");
  const auto [mean, se] = mean_and_se(result.reward);
  return {result.label == EnsembleLabel::training ? ValuationKind::v_train
                                                  : ValuationKind::v_test,
          mean, se, result.seed, result.stopper_hash, result.reward.size()};
}

ValuationReport v_max(const PathEnsemble& paths, const RewardSpec& spec) {
  check_compatible(paths, spec);
  std::vector<double> best(paths.num_paths(), 0.0);
  for (std::size_t k = 0; k < paths.num_paths(); ++k) {
    double m = 0.0;
    for (std::size_t n = 0; n <= paths.num_steps(); ++n) {
      m = std::max(m, reward(spec, n, paths.state(k, n)));
    }
    best[k] = m;
  }
  const auto [mean, se] = mean_and_se(best);
  return {ValuationKind::v_max, mean, se, paths.seed(), 0, best.size()};
}

namespace {

std::array<double, 4> ls_basis(double x, double strike) {
  const double y = x / strike;
  return {1.0, y, y * y, y * y * y};
}

double ls_fitted(const std::array<double, 4>& beta, double x, double strike) {
  const auto b = ls_basis(x, strike);
  return beta[0] * b[0] + beta[1] * b[1] + beta[2] * b[2] + beta[3] * b[3];
}

void check_ls_input(const PathEnsemble& paths, const RewardSpec& spec) {
  if (spec.kind != RewardKind::put || paths.dim() != 1) {
    throw UnsupportedError("ls_value: Longstaff-Schwartz baseline supports the 1-D put only");
  }
  check_compatible(paths, spec);
}

}  // namespace

LsResult ls_value(const PathEnsemble& train, const PathEnsemble& test,
                  const RewardSpec& spec) {
  check_ls_input(train, spec);
  check_ls_input(test, spec);
  const std::size_t K = train.num_paths();
  const std::size_t N = train.num_steps();
  if (test.num_steps() != N) throw ParameterError("ls_value: horizons differ");

  LsResult out;
  out.coefficients.assign(N + 1, {0.0, 0.0, 0.0, 0.0});
  std::vector<double> cash(K);
  for (std::size_t k = 0; k < K; ++k) cash[k] = reward(spec, N, train.state(k, N));

  std::vector<std::size_t> itm;
  for (std::size_t n = N - 1; n >= 1; --n) {
    itm.clear();
    for (std::size_t k = 0; k < K; ++k) {
      if (reward(spec, n, train.state(k, n)) > 0.0) itm.push_back(k);
    }
    if (!itm.empty()) {
      Eigen::MatrixXd design(itm.size(), 4);
      Eigen::VectorXd target(itm.size());
      for (std::size_t i = 0; i < itm.size(); ++i) {
        const auto b = ls_basis(train.value(itm[i], n, 0), spec.strike);
        for (int j = 0; j < 4; ++j) design(static_cast<Eigen::Index>(i), j) = b[j];
        target(static_cast<Eigen::Index>(i)) = cash[itm[i]];
      }
      const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
      auto& coef = out.coefficients[n];
      for (int j = 0; j < 4; ++j) coef[j] = beta(j);
      for (auto k : itm) {
        const double now = reward(spec, n, train.state(k, n));
        if (now >= ls_fitted(coef, train.value(k, n, 0), spec.strike)) cash[k] = now;
      }
    }
  }

  // Step 0 is shared by all paths: compare with the plain average.
  const double start_reward = reward(spec, 0, train.state(0, 0));
  double sum = 0.0;
  for (double c : cash) sum += c;
  const double continuation = sum / static_cast<double>(K);
  out.exercise_at_start = start_reward > 0.0 && start_reward >= continuation;
  out.coefficients[0] = {continuation, 0.0, 0.0, 0.0};
  if (out.exercise_at_start) std::fill(cash.begin(), cash.end(), start_reward);
  const auto train_stats = mean_and_se(cash);
  out.train = {ValuationKind::ls_train, train_stats.mean, train_stats.std_error,
               train.seed(), 0, K};

  std::vector<double> realised(test.num_paths());
  for (std::size_t k = 0; k < test.num_paths(); ++k) {
    std::size_t tau = N;
    if (out.exercise_at_start) {
      tau = 0;
    } else {
      for (std::size_t n = 1; n < N; ++n) {
        const double now = reward(spec, n, test.state(k, n));
        if (now > 0.0 &&
            now >= ls_fitted(out.coefficients[n], test.value(k, n, 0), spec.strike)) {
          tau = n;
          break;
        }
      }
    }
    realised[k] = reward(spec, tau, test.state(k, tau));
  }
  const auto test_stats = mean_and_se(realised);
  out.test = {ValuationKind::ls_test, test_stats.mean, test_stats.std_error, test.seed(),
              0, test.num_paths()};
  return out;
}

namespace {

// Distinct states per step and, per path, the index of its state at each step.
struct StateTable {
  std::size_t steps = 0;
  std::vector<std::size_t> distinct;    // per step
  std::vector<std::size_t> offset;      // first rule bit of each step
  std::vector<std::uint32_t> state_of;  // [k * (N + 1) + n]
  std::vector<double> rewards;          // [k * (N + 1) + n]
  std::size_t decision_bits = 0;        // sum of distinct states over n < N
};

StateTable tabulate(const PathEnsemble& paths, const RewardSpec& spec,
                    std::uint64_t max_rules) {
  check_compatible(paths, spec);
  StateTable t;
  const std::size_t K = paths.num_paths();
  const std::size_t N = paths.num_steps();
  t.steps = N;
  t.distinct.assign(N + 1, 0);
  t.offset.assign(N + 1, 0);
  t.state_of.assign(K * (N + 1), 0);
  t.rewards.assign(K * (N + 1), 0.0);
  for (std::size_t n = 0; n <= N; ++n) {
    std::map<std::vector<double>, std::uint32_t> ids;
    for (std::size_t k = 0; k < K; ++k) {
      auto x = paths.state(k, n);
      std::vector<double> key(x.begin(), x.end());
      auto [it, inserted] = ids.try_emplace(std::move(key), static_cast<std::uint32_t>(ids.size()));
      t.state_of[k * (N + 1) + n] = it->second;
      t.rewards[k * (N + 1) + n] = reward(spec, n, x);
    }
    t.distinct[n] = ids.size();
    t.offset[n] = t.decision_bits;
    if (n < N) t.decision_bits += ids.size();
  }
  if (t.decision_bits >= 64 || (std::uint64_t{1} << t.decision_bits) > max_rules) {
    throw ParameterError(fmt::format(
        "oracle: {} distinct (step, state) decisions exceed the bound of {} rules",
        t.decision_bits, max_rules));
  }
  return t;
}

}  // namespace

ValuationReport oracle_enumerate(const PathEnsemble& paths, const RewardSpec& spec,
                                 std::uint64_t max_rules) {
  const auto t = tabulate(paths, spec, max_rules);
  const std::size_t K = paths.num_paths();
  const std::size_t N = t.steps;
  std::vector<double> realised(K);
  for (std::size_t k = 0; k < K; ++k) realised[k] = t.rewards[k * (N + 1) + N];
  for (std::size_t n = N; n-- > 0;) {
    // Sum of (stop now - continue) over all paths sharing each state.
    std::vector<double> gain(t.distinct[n], 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      gain[t.state_of[k * (N + 1) + n]] += t.rewards[k * (N + 1) + n] - realised[k];
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (gain[t.state_of[k * (N + 1) + n]] >= 0.0) realised[k] = t.rewards[k * (N + 1) + n];
    }
  }
  const auto [mean, se] = mean_and_se(realised);
  return {ValuationKind::oracle, mean, se, paths.seed(), 0, K};
}

ValuationReport oracle_brute_force(const PathEnsemble& paths, const RewardSpec& spec,
                                   std::uint64_t max_rules) {
  const auto t = tabulate(paths, spec, max_rules);
  const std::size_t K = paths.num_paths();
  const std::size_t N = t.steps;
  const std::uint64_t rules = std::uint64_t{1} << t.decision_bits;
  std::vector<double> realised(K);
  bool have_best = false;
  MeanSe best{0.0, 0.0};
  for (std::uint64_t rule = 0; rule < rules; ++rule) {
    for (std::size_t k = 0; k < K; ++k) {
      std::size_t tau = N;
      for (std::size_t n = 0; n < N; ++n) {
        const auto bit = t.offset[n] + t.state_of[k * (N + 1) + n];
        if ((rule >> bit) & 1u) {
          tau = n;
          break;
        }
      }
      realised[k] = t.rewards[k * (N + 1) + tau];
    }
    const auto stats = mean_and_se(realised);
    if (!have_best || stats.mean > best.mean) {
      best = stats;
      have_best = true;
    }
  }
  return {ValuationKind::oracle, best.mean, best.std_error, paths.seed(), 0, K};
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct ForwardTerms {
  double forward, discount, d1, d2;
};

ForwardTerms forward_terms(double x0, double strike, double rate, double drift,
                           double sigma, double maturity) {
  if (!(x0 > 0.0) || !(strike > 0.0) || !(sigma >= 0.0) || !(maturity > 0.0)) {
    throw ParameterError(
        "european price: x0, strike and maturity must be positive, sigma non-negative");
  }
  const double forward = x0 * std::exp(drift * maturity);
  const double vol = sigma * std::sqrt(maturity);
  if (vol == 0.0) {
    // Degenerate law: the terminal value is the forward itself.
    const double inf = forward > strike ? INFINITY : -INFINITY;
    return {forward, std::exp(-rate * maturity), inf, inf};
  }
  const double d1 = (std::log(forward / strike) + 0.5 * vol * vol) / vol;
  return {forward, std::exp(-rate * maturity), d1, d1 - vol};
}

}  // namespace

double european_put_price(double x0, double strike, double rate, double drift,
                          double sigma, double maturity) {
  const auto f = forward_terms(x0, strike, rate, drift, sigma, maturity);
  return f.discount * (strike * normal_cdf(-f.d2) - f.forward * normal_cdf(-f.d1));
}

double european_call_price(double x0, double strike, double rate, double drift,
                           double sigma, double maturity) {
  const auto f = forward_terms(x0, strike, rate, drift, sigma, maturity);
  return f.discount * (f.forward * normal_cdf(f.d1) - strike * normal_cdf(f.d2));
}

BoundaryScatter extract_boundary(const StopResult& result, const PathEnsemble& paths,
                                 std::optional<std::span<const double>> theoretical) {
  if (paths.dim() != 1) throw DimensionError("extract_boundary: needs a 1-D ensemble");
  const std::size_t K = paths.num_paths();
  const std::size_t N = paths.num_steps();
  if (result.stop_step.size() != K || result.reward.size() != K) {
    throw DimensionError("extract_boundary: result does not match the ensemble");
  }
  if (theoretical && theoretical->size() != N + 1) {
    throw DimensionError(fmt::format("extract_boundary: boundary needs {} values, got {}",
                                     N + 1, theoretical->size()));
  }
  BoundaryScatter out;
  out.count.assign(N + 1, 0);
  out.mean.assign(N + 1, std::nullopt);
  out.zero_reward.assign(N + 1, 0);
  std::vector<double> sum(N + 1, 0.0);
  std::vector<std::size_t> rows_at(N + 1, 0);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t n = result.stop_step[k];
    if (n > N) throw ParameterError("extract_boundary: stop step beyond horizon");
    ++out.count[n];
    if (n == 0 || n == N) continue;
    if (!(result.reward[k] > 0.0)) {
      ++out.zero_reward[n];
      continue;
    }
    const double x = paths.value(k, n, 0);
    BoundaryRow row{n, x, k, std::nullopt};
    if (theoretical) row.residual = x - (*theoretical)[n];
    out.rows.push_back(row);
    sum[n] += x;
    ++rows_at[n];
  }
  for (std::size_t n = 1; n < N; ++n) {
    if (rows_at[n] > 0) out.mean[n] = sum[n] / static_cast<double>(rows_at[n]);
  }
  return out;
}

}  // namespace optstop
