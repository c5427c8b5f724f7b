#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace optstop {

enum class RewardKind { put, max_call, max_call_barrier };

std::string_view to_string(RewardKind kind);
RewardKind parse_reward_kind(std::string_view text);

/// Discounted payoff u(n, x) of the three supported products.
///
/// put:              e^{-r n T/N} (C - x)^+                     (x is 1-D)
/// max_call:         e^{-r n T/N} (max_d x[d] - C)^+
/// max_call_barrier: e^{-r n T/(N+1)} (max_{d<D} x[d] - C)^+ * x[D]
///
/// The barrier product discounts with N+1 in the denominator; this is kept as
/// published for that benchmark so the reference values remain comparable.
struct RewardSpec {
  RewardKind kind = RewardKind::put;
  double rate = 0.05;
  double strike = 100.0;
  double maturity = 1.0;
  std::size_t steps = 50;
  double barrier = 0.0;  // max_call_barrier only

  std::size_t discount_denominator() const {
    return kind == RewardKind::max_call_barrier ? steps + 1 : steps;
  }
  double discount(std::size_t n) const;
  /// Checks that a state of the given length is valid for this payoff.
  void check_state_dim(std::size_t state_dim) const;
  void validate() const;
  /// Canonical one-line description; hashed into model dumps.
  std::string describe() const;
  std::uint64_t hash() const;
};

double reward(const RewardSpec& spec, std::size_t n, std::span<const double> x);

enum class FeatureMode { raw, raw_plus_reward, four_features };

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view text);

/// Length of the feature vector produced for states of length `state_dim`.
std::size_t feature_dim(FeatureMode mode, const RewardSpec& spec,
                        std::size_t state_dim);

/// Writes the feature vector of (n, x) into `out` (length feature_dim(...)).
///
/// four_features yields (u(n,x), max, second max, max - second max) over the
/// price coordinates; the second max skips the first index attaining the max,
/// so tied maxima give a zero spread.
void features_into(FeatureMode mode, const RewardSpec& spec, std::size_t n,
                   std::span<const double> x, std::span<double> out);

std::vector<double> features(FeatureMode mode, const RewardSpec& spec,
                             std::size_t n, std::span<const double> x);

}  // namespace optstop
