#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "optstop/cart.hpp"
#include "optstop/ensemble.hpp"
#include "optstop/reward.hpp"

namespace optstop {

struct TrainConfig {
  std::size_t bags = 10;
  GrowConfig grow;
  FeatureMode feature_mode = FeatureMode::raw;
  std::uint64_t seed_bagging = 0;

  void validate() const;
};

/// B x N trees; ĝ_n(x) = 1 iff at least half of the bag trees at step n vote STOP.
/// Step N always stops.
class BaggedStopper {
 public:
  BaggedStopper(RewardSpec reward, FeatureMode mode, std::size_t state_dim,
                std::size_t steps, std::size_t bags, std::vector<CartTree> trees);

  const RewardSpec& reward_spec() const { return reward_; }
  FeatureMode feature_mode() const { return mode_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t steps() const { return steps_; }
  std::size_t bags() const { return bags_; }

  const CartTree& tree(std::size_t bag, std::size_t step) const {
    return trees_[bag * steps_ + step];
  }

  /// ĝ_n evaluated on a feature vector.
  int decide(std::size_t n, std::span<const double> feature_vector) const;
  /// Number of bag trees voting STOP at step n.
  std::size_t votes(std::size_t n, const double* feature_vector) const;

  void write(std::ostream& out) const;
  static BaggedStopper read(std::istream& in);
  std::uint64_t hash() const;

  friend bool operator==(const BaggedStopper& a, const BaggedStopper& b);

 private:
  RewardSpec reward_;
  FeatureMode mode_;
  std::size_t state_dim_;
  std::size_t feature_dim_;
  std::size_t steps_;
  std::size_t bags_;
  std::vector<CartTree> trees_;  // bag-major
};

/// Bag index per path (value `bags` marks a path dropped so that every bag has
/// floor(K/B) members). Seeded Fisher-Yates shuffle, then contiguous blocks.
std::vector<std::uint32_t> assign_bags(std::size_t num_paths, std::size_t bags,
                                       std::uint64_t seed);

/// Leave-one-bag-out update at step n: a path of bag b stops at n when at least
/// half of the other B-1 trees vote STOP on its features; otherwise its
/// stopping step is left unchanged. `feature_rows` holds one row per path.
void update_stopping_steps(std::span<const CartTree> trees_at_step,
                           std::span<const double> feature_rows,
                           std::size_t feature_dim,
                           std::span<const std::uint32_t> bag_of, std::size_t n,
                           std::span<std::uint32_t> stop_step);

/// Per-(step, bag) view of the training data handed to each tree.
struct TrainingStepInfo {
  std::size_t step;
  std::size_t bag;
  std::span<const std::size_t> paths;
  std::span<const double> deltas;
  const SampleSet* samples;
};

BaggedStopper train(const PathEnsemble& paths, const RewardSpec& reward_spec,
                    const TrainConfig& config,
                    const std::function<void(const TrainingStepInfo&)>& observer = {});

struct StopResult {
  std::vector<std::uint32_t> stop_step;
  std::vector<double> reward;
  std::vector<std::size_t> stop_count;  // length N+1
  EnsembleLabel label = EnsembleLabel::test;
  std::uint64_t seed = 0;
  std::uint64_t stopper_hash = 0;
};

StopResult apply(const BaggedStopper& stopper, const PathEnsemble& paths);

/// Checks that `paths` can be used with `reward_spec` (horizon and state shape).
void check_compatible(const PathEnsemble& paths, const RewardSpec& reward_spec);

}  // namespace optstop
