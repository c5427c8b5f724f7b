#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "optstop/ensemble.hpp"
#include "optstop/reward.hpp"
#include "optstop/stopper.hpp"

namespace optstop {

enum class ValuationKind { v_train, v_test, ls_train, ls_test, v_max, oracle, european_bs };

std::string_view to_string(ValuationKind kind);

struct ValuationReport {
  ValuationKind kind = ValuationKind::v_test;
  double value = 0.0;      // price units
  double std_error = 0.0;  // sample std / sqrt(K); 0 for closed forms
  std::uint64_t seed = 0;  // ensemble seed
  std::uint64_t stopper_hash = 0;
  std::size_t count = 0;   // number of paths averaged
};

struct MeanSe {
  double mean;
  double std_error;
};

/// Mean (offsets from the first value summed in index order, then divided by
/// the count) and standard error with the K-1 sample variance.
MeanSe mean_and_se(std::span<const double> values);

/// Ensemble average of realised rewards; tagged by the ensemble's label.
ValuationReport value_of_rule(const StopResult& result);

/// Average of per-path maximal rewards; no non-anticipating rule can exceed it.
ValuationReport v_max(const PathEnsemble& paths, const RewardSpec& spec);

struct LsResult {
  ValuationReport train;
  ValuationReport test;
  // Regression coefficients per step for the basis {1, y, y^2, y^3}, y = x / C.
  std::vector<std::array<double, 4>> coefficients;
  bool exercise_at_start = false;
};

/// Longstaff-Schwartz for the 1-D put: regress realised discounted cash flows
/// on the cubic basis over in-the-money paths, exercise when the immediate
/// reward is at least the fitted continuation. Coefficients are fitted on
/// `train` and reused unchanged on `test`.
LsResult ls_value(const PathEnsemble& train, const PathEnsemble& test,
                  const RewardSpec& spec);

/// Exact optimum over Markov rules on an ensemble with few distinct states per
/// step, by backward induction over the empirical conditional expectations.
/// Throws ParameterError when the number of candidate rules exceeds max_rules.
ValuationReport oracle_enumerate(const PathEnsemble& paths, const RewardSpec& spec,
                                 std::uint64_t max_rules = 1u << 20);

/// Same optimum by brute force over every STOP/CONTINUE assignment to the
/// distinct (step, state) pairs.
ValuationReport oracle_brute_force(const PathEnsemble& paths, const RewardSpec& spec,
                                   std::uint64_t max_rules = 1u << 20);

/// Closed-form expected discounted payoff e^{-rT} E[(C - X_T)^+] (or the call)
/// for a GBM with the given drift; equals Black-Scholes when drift == rate.
double european_put_price(double x0, double strike, double rate, double drift,
                          double sigma, double maturity);
double european_call_price(double x0, double strike, double rate, double drift,
                           double sigma, double maturity);

struct BoundaryRow {
  std::size_t step;
  double value;
  std::size_t path;
  std::optional<double> residual;
};

struct BoundaryScatter {
  std::vector<BoundaryRow> rows;
  std::vector<std::optional<double>> mean;  // per step 0..N; set where rows exist
  std::vector<std::size_t> count;           // stops per step 0..N
  std::vector<std::size_t> zero_reward;     // stops at 1 <= n < N with u = 0 (no row)
};

/// Stopped values of paths exercised at 1 <= n < N with a positive reward, the
/// per-step mean of those values, and per-step stop counts (all steps, all
/// rewards). Stops with zero reward are worth the same as continuing and are
/// counted in `zero_reward` instead of the scatter. With `theoretical` (b(n)
/// for n = 0..N), rows also carry x - b(n).
BoundaryScatter extract_boundary(const StopResult& result, const PathEnsemble& paths,
                                 std::optional<std::span<const double>> theoretical = {});

}  // namespace optstop
