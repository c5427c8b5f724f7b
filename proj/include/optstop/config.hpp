#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optstop/cart.hpp"
#include "optstop/ensemble.hpp"
#include "optstop/reward.hpp"
#include "optstop/stopper.hpp"

namespace optstop {

enum class LsMode { automatic, on, off };

/// Fully resolved experiment description. Defaults reproduce the 1-D American
/// put at x0 = 100, sigma = 0.2, T = 1, N = 50 with B = 10 and 10/10 limits.
struct ExperimentConfig {
  RewardKind model = RewardKind::put;
  std::size_t dim = 1;
  double x0 = 100.0;
  double drift = 0.05;
  double maturity = 1.0;
  std::size_t steps = 50;
  VolMode vol_mode = VolMode::symmetric;
  double sigma = 0.2;
  std::vector<double> vols;
  double rate = 0.05;
  double strike = 100.0;
  double barrier = 170.0;

  std::size_t k_train = 200000;
  std::size_t k_test = 200000;
  std::uint64_t seed_train = 1;
  std::uint64_t seed_test = 2;
  std::uint64_t seed_bagging = 3;

  std::size_t bags = 10;
  std::size_t max_depth = 10;
  std::size_t min_node_size = 10;
  Splitter splitter = Splitter::delta;
  FeatureMode feature_mode = FeatureMode::raw;

  LsMode ls = LsMode::automatic;
  bool boundary = false;
  std::string boundary_file;
  std::optional<double> reference_v_test;
  std::optional<double> reference_ls_test;

  // Not part of the fingerprint: changing it does not change any result.
  std::string out = "out";

  /// Applies one "key=value" assignment; `where` prefixes error messages.
  void set(std::string_view key, std::string_view value, std::string_view where = {});
  /// Cross-field checks (K >= B, feature mode vs dimension, LS support, ...).
  void validate() const;
  /// One "key = value" line per field in a fixed order.
  std::string serialize() const;
  /// FNV-1a of the serialized config without `out`.
  std::uint64_t hash() const;

  bool run_ls() const;

  GbmSpec gbm_spec() const;
  RewardSpec reward_spec() const;
  TrainConfig train_config() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the flat "key = value" text format ('#' starts a comment).
ExperimentConfig parse_config(std::string_view text,
                              ExperimentConfig base = ExperimentConfig{});
ExperimentConfig load_config(const std::string& path,
                             ExperimentConfig base = ExperimentConfig{});
/// Applies "key=value" overrides on top of `config` (command-line precedence).
void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides);

std::vector<std::string> config_keys();

}  // namespace optstop
