#include "optstop/reward.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "optstop/error.hpp"
#include "optstop/hash.hpp"

namespace optstop {

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::put:
      return "put";
    case RewardKind::max_call:
      return "max_call";
    case RewardKind::max_call_barrier:
      return "max_call_barrier";
  }
  return "?";
}

RewardKind parse_reward_kind(std::string_view text) {
  if (text == "put") return RewardKind::put;
  if (text == "max_call") return RewardKind::max_call;
  if (text == "max_call_barrier" || text == "barrier") return RewardKind::max_call_barrier;
  throw ParameterError(fmt::format("unknown reward kind '{}'", text));
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::raw:
      return "raw";
    case FeatureMode::raw_plus_reward:
      return "raw_plus_reward";
    case FeatureMode::four_features:
      return "four_features";
  }
  return "?";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "raw") return FeatureMode::raw;
  if (text == "raw_plus_reward") return FeatureMode::raw_plus_reward;
  if (text == "four_features") return FeatureMode::four_features;
  throw ParameterError(fmt::format("unknown feature mode '{}'", text));
}

double RewardSpec::discount(std::size_t n) const {
  return std::exp(-rate * static_cast<double>(n) * maturity /
                  static_cast<double>(discount_denominator()));
}

void RewardSpec::check_state_dim(std::size_t state_dim) const {
  switch (kind) {
    case RewardKind::put:
      if (state_dim != 1) {
        throw DimensionError(fmt::format("put reward expects a 1-D state, got {}", state_dim));
      }
      break;
    case RewardKind::max_call:
      if (state_dim < 1) throw DimensionError("max_call reward expects a non-empty state");
      break;
    case RewardKind::max_call_barrier:
      if (state_dim < 2) {
        throw DimensionError(
            "barrier reward expects D price coordinates plus the barrier indicator");
      }
      break;
  }
}

void RewardSpec::validate() const {
  if (!(strike > 0.0)) throw ParameterError("reward: strike must be positive");
  if (!(maturity > 0.0)) throw ParameterError("reward: maturity must be positive");
  if (steps == 0) throw ParameterError("reward: steps must be positive");
  if (!std::isfinite(rate)) throw ParameterError("reward: rate must be finite");
  if (kind == RewardKind::max_call_barrier && !(barrier > 0.0)) {
    throw ParameterError("reward: barrier must be positive");
  }
}

std::string RewardSpec::describe() const {
  return fmt::format("kind={} rate={:.17g} strike={:.17g} maturity={:.17g} steps={} barrier={:.17g}",
                     to_string(kind), rate, strike, maturity, steps, barrier);
}

std::uint64_t RewardSpec::hash() const { return fnv1a64(describe()); }

double reward(const RewardSpec& spec, std::size_t n, std::span<const double> x) {
  spec.check_state_dim(x.size());
  if (n > spec.steps) {
    throw ParameterError(fmt::format("reward: step {} beyond horizon {}", n, spec.steps));
  }
  switch (spec.kind) {
    case RewardKind::put:
      return spec.discount(n) * std::max(spec.strike - x[0], 0.0);
    case RewardKind::max_call: {
      const double top = *std::max_element(x.begin(), x.end());
      return spec.discount(n) * std::max(top - spec.strike, 0.0);
    }
    case RewardKind::max_call_barrier: {
      const auto prices = x.first(x.size() - 1);
      const double top = *std::max_element(prices.begin(), prices.end());
      return spec.discount(n) * std::max(top - spec.strike, 0.0) * x.back();
    }
  }
  return 0.0;
}

std::size_t feature_dim(FeatureMode mode, const RewardSpec& spec, std::size_t state_dim) {
  spec.check_state_dim(state_dim);
  switch (mode) {
    case FeatureMode::raw:
      return state_dim;
    case FeatureMode::raw_plus_reward:
      return state_dim + 1;
    case FeatureMode::four_features: {
      const std::size_t prices =
          spec.kind == RewardKind::max_call_barrier ? state_dim - 1 : state_dim;
      if (prices < 2) {
        throw DimensionError("four_features needs at least two price coordinates");
      }
      return 4;
    }
  }
  return 0;
}

void features_into(FeatureMode mode, const RewardSpec& spec, std::size_t n,
                   std::span<const double> x, std::span<double> out) {
  if (out.size() != feature_dim(mode, spec, x.size())) {
    throw DimensionError("features: output buffer has the wrong length");
  }
  switch (mode) {
    case FeatureMode::raw:
      std::copy(x.begin(), x.end(), out.begin());
      return;
    case FeatureMode::raw_plus_reward:
      std::copy(x.begin(), x.end(), out.begin());
      out.back() = reward(spec, n, x);
      return;
    case FeatureMode::four_features: {
      const auto prices =
          spec.kind == RewardKind::max_call_barrier ? x.first(x.size() - 1) : x;
      const auto top = std::max_element(prices.begin(), prices.end());
      const auto top_index = static_cast<std::size_t>(top - prices.begin());
      double second = -INFINITY;
      for (std::size_t d = 0; d < prices.size(); ++d) {
        if (d != top_index) second = std::max(second, prices[d]);
      }
      out[0] = reward(spec, n, x);
      out[1] = *top;
      out[2] = second;
      out[3] = *top - second;
      return;
    }
  }
}

std::vector<double> features(FeatureMode mode, const RewardSpec& spec, std::size_t n,
                             std::span<const double> x) {
  std::vector<double> out(feature_dim(mode, spec, x.size()));
  features_into(mode, spec, n, x, out);
  return out;
}

}  // namespace optstop
