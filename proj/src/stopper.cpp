#include "optstop/stopper.hpp"

#include <algorithm>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "optstop/error.hpp"
#include "optstop/hash.hpp"

namespace optstop {

void TrainConfig::validate() const {
  if (bags < 2) throw ParameterError("bags must be at least 2 for cross-validation");
  grow.validate();
}

BaggedStopper::BaggedStopper(RewardSpec reward, FeatureMode mode, std::size_t state_dim,
                             std::size_t steps, std::size_t bags,
                             std::vector<CartTree> trees)
    : reward_(reward),
      mode_(mode),
      state_dim_(state_dim),
      feature_dim_(optstop::feature_dim(mode, reward, state_dim)),
      steps_(steps),
      bags_(bags),
      trees_(std::move(trees)) {
  if (bags_ == 0 || steps_ == 0) throw ParameterError("stopper: B and N must be positive");
  if (steps_ != reward_.steps) {
    throw ParameterError("stopper: horizon differs from the reward horizon");
  }
  if (trees_.size() != bags_ * steps_) {
    throw ParameterError(fmt::format("stopper: expected {} trees, got {}", bags_ * steps_,
                                     trees_.size()));
  }
  for (const auto& t : trees_) {
    if (t.input_dim() != feature_dim_) {
      throw DimensionError("stopper: tree input dimension differs from feature dimension");
    }
  }
}

std::size_t BaggedStopper::votes(std::size_t n, const double* feature_vector) const {
  std::size_t count = 0;
  for (std::size_t b = 0; b < bags_; ++b) {
    count += static_cast<std::size_t>(tree(b, n).predict_unchecked(feature_vector));
  }
  return count;
}

int BaggedStopper::decide(std::size_t n, std::span<const double> feature_vector) const {
  if (feature_vector.size() != feature_dim_) {
    throw DimensionError("stopper: feature vector has the wrong length");
  }
  if (n >= steps_) return 1;
  // χ(average) with χ = 1_{[1/2, ∞)}, evaluated in integers.
  return 2 * votes(n, feature_vector.data()) >= bags_ ? 1 : 0;
}

void BaggedStopper::write(std::ostream& out) const {
  out << "stopper 1\n";
  out << fmt::format("bags {}\nsteps {}\nstate_dim {}\nfeature_mode {}\n", bags_, steps_,
                     state_dim_, to_string(mode_));
  out << "reward " << reward_.describe() << "\n";
  out << "reward_hash " << hex64(reward_.hash()) << "\n";
  for (std::size_t b = 0; b < bags_; ++b) {
    for (std::size_t n = 0; n < steps_; ++n) {
      out << fmt::format("bag {} step {}\n", b, n);
      tree(b, n).write(out);
    }
  }
}

namespace {

std::string expect_line(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(key, 0) != 0 || line.size() <= key.size() ||
      line[key.size()] != ' ') {
    throw ConfigError(fmt::format("stopper dump: expected '{} ...'", key));
  }
  return line.substr(key.size() + 1);
}

RewardSpec parse_reward_description(const std::string& text) {
  RewardSpec spec;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError("stopper dump: bad reward token");
    const auto key = token.substr(0, eq);
    const auto val = token.substr(eq + 1);
    if (key == "kind") spec.kind = parse_reward_kind(val);
    else if (key == "rate") spec.rate = std::stod(val);
    else if (key == "strike") spec.strike = std::stod(val);
    else if (key == "maturity") spec.maturity = std::stod(val);
    else if (key == "steps") spec.steps = std::stoull(val);
    else if (key == "barrier") spec.barrier = std::stod(val);
    else throw ConfigError(fmt::format("stopper dump: unknown reward key '{}'", key));
  }
  return spec;
}

}  // namespace

BaggedStopper BaggedStopper::read(std::istream& in) {
  // Leading '#' lines carry provenance and are skipped.
  std::string comment;
  while (in.peek() == '#') std::getline(in, comment);
  if (expect_line(in, "stopper") != "1") throw ConfigError("stopper dump: unknown version");
  const auto bags = std::stoull(expect_line(in, "bags"));
  const auto steps = std::stoull(expect_line(in, "steps"));
  const auto state_dim = std::stoull(expect_line(in, "state_dim"));
  const auto mode = parse_feature_mode(expect_line(in, "feature_mode"));
  const auto reward = parse_reward_description(expect_line(in, "reward"));
  if (expect_line(in, "reward_hash") != hex64(reward.hash())) {
    throw ConfigError("stopper dump: reward hash mismatch");
  }
  std::vector<CartTree> trees;
  trees.reserve(bags * steps);
  for (std::size_t b = 0; b < bags; ++b) {
    for (std::size_t n = 0; n < steps; ++n) {
      std::string line;
      if (!std::getline(in, line) || line != fmt::format("bag {} step {}", b, n)) {
        throw ConfigError(fmt::format("stopper dump: expected tree for bag {} step {}", b, n));
      }
      trees.push_back(CartTree::read(in));
    }
  }
  return BaggedStopper(reward, mode, state_dim, steps, bags, std::move(trees));
}

std::uint64_t BaggedStopper::hash() const {
  std::ostringstream out;
  write(out);
  return fnv1a64(out.str());
}

bool operator==(const BaggedStopper& a, const BaggedStopper& b) {
  return a.reward_.describe() == b.reward_.describe() && a.mode_ == b.mode_ &&
         a.state_dim_ == b.state_dim_ && a.steps_ == b.steps_ && a.bags_ == b.bags_ &&
         a.trees_ == b.trees_;
}

std::vector<std::uint32_t> assign_bags(std::size_t num_paths, std::size_t bags,
                                       std::uint64_t seed) {
  if (bags == 0) throw ParameterError("assign_bags: bags must be positive");
  if (num_paths < bags) {
    throw ParameterError(fmt::format("K = {} is smaller than B = {}", num_paths, bags));
  }
  std::vector<std::size_t> perm(num_paths);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 engine(splitmix64(seed));
  // Fisher-Yates with rejection sampling; std::shuffle is not portable.
  for (std::size_t i = num_paths - 1; i > 0; --i) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = engine();
    } while (draw >= limit);
    std::swap(perm[i], perm[draw % bound]);
  }
  const std::size_t per_bag = num_paths / bags;
  std::vector<std::uint32_t> bag_of(num_paths, static_cast<std::uint32_t>(bags));
  for (std::size_t pos = 0; pos < per_bag * bags; ++pos) {
    bag_of[perm[pos]] = static_cast<std::uint32_t>(pos / per_bag);
  }
  return bag_of;
}

void update_stopping_steps(std::span<const CartTree> trees_at_step,
                           std::span<const double> feature_rows, std::size_t feature_dim,
                           std::span<const std::uint32_t> bag_of, std::size_t n,
                           std::span<std::uint32_t> stop_step) {
  const std::size_t bags = trees_at_step.size();
  if (bags < 2) throw ParameterError("update_stopping_steps: need at least two bags");
  if (feature_rows.size() != bag_of.size() * feature_dim ||
      stop_step.size() != bag_of.size()) {
    throw DimensionError("update_stopping_steps: inconsistent buffer lengths");
  }
  const auto count = static_cast<std::int64_t>(bag_of.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t kk = 0; kk < count; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const std::uint32_t own = bag_of[k];
    if (own >= bags) continue;
    const double* xi = feature_rows.data() + k * feature_dim;
    std::size_t votes = 0;
    for (std::size_t b = 0; b < bags; ++b) {
      if (b != own) votes += static_cast<std::size_t>(trees_at_step[b].predict_unchecked(xi));
    }
    if (2 * votes >= bags - 1) stop_step[k] = static_cast<std::uint32_t>(n);
  }
}

void check_compatible(const PathEnsemble& paths, const RewardSpec& reward_spec) {
  reward_spec.validate();
  if (paths.num_steps() != reward_spec.steps) {
    throw ParameterError(fmt::format("ensemble has {} steps but the reward expects {}",
                                     paths.num_steps(), reward_spec.steps));
  }
  reward_spec.check_state_dim(paths.dim());
  if ((reward_spec.kind == RewardKind::max_call_barrier) != paths.has_barrier_indicator()) {
    throw ParameterError(
        "barrier reward requires an ensemble with the barrier indicator, and only then");
  }
}

namespace {

void compute_features(const PathEnsemble& paths, const RewardSpec& spec, FeatureMode mode,
                      std::size_t n, std::size_t fdim, std::vector<double>& out) {
  out.resize(paths.num_paths() * fdim);
  const auto count = static_cast<std::int64_t>(paths.num_paths());
#pragma omp parallel for schedule(static)
  for (std::int64_t kk = 0; kk < count; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    features_into(mode, spec, n, paths.state(k, n),
                  std::span<double>(out.data() + k * fdim, fdim));
  }
}

}  // namespace

BaggedStopper train(const PathEnsemble& paths, const RewardSpec& reward_spec,
                    const TrainConfig& config,
                    const std::function<void(const TrainingStepInfo&)>& observer) {
  config.validate();
  check_compatible(paths, reward_spec);
  const std::size_t K = paths.num_paths();
  const std::size_t N = paths.num_steps();
  const std::size_t B = config.bags;
  const std::size_t fdim = feature_dim(config.feature_mode, reward_spec, paths.dim());

  const auto bag_of = assign_bags(K, B, config.seed_bagging);
  std::vector<std::vector<std::size_t>> members(B);
  for (std::size_t k = 0; k < K; ++k) {
    if (bag_of[k] < B) members[bag_of[k]].push_back(k);
  }
  const double scale = 1.0 / static_cast<double>(members[0].size() * B);

  // Continuation state per path: its stopping step under its bag's rule, and
  // the reward realised there.
  std::vector<std::uint32_t> stop_step(K, static_cast<std::uint32_t>(N));
  std::vector<double> realized(K);
  for (std::size_t k = 0; k < K; ++k) realized[k] = reward(reward_spec, N, paths.state(k, N));

  std::vector<CartTree> trees(B * N);
  std::vector<double> feats;
  std::vector<double> now(K);
  for (std::size_t step = N; step-- > 0;) {
    compute_features(paths, reward_spec, config.feature_mode, step, fdim, feats);
    for (std::size_t k = 0; k < K; ++k) now[k] = reward(reward_spec, step, paths.state(k, step));

    const auto bag_count = static_cast<std::int64_t>(B);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t bb = 0; bb < bag_count; ++bb) {
      const auto b = static_cast<std::size_t>(bb);
      const auto& ks = members[b];
      std::vector<double> points(ks.size() * fdim);
      std::vector<double> deltas(ks.size());
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto k = ks[i];
        std::copy_n(feats.data() + k * fdim, fdim, points.data() + i * fdim);
        deltas[i] = scale * (realized[k] - now[k]);
      }
      const auto samples = removal(points, fdim, deltas);
      trees[b * N + step] = grow(samples, config.grow);
      if (observer) {
#pragma omp critical(optstop_train_observer)
        observer(TrainingStepInfo{step, b, ks, deltas, &samples});
      }
    }

    std::vector<CartTree> at_step(B);
    for (std::size_t b = 0; b < B; ++b) at_step[b] = trees[b * N + step];
    const auto before = stop_step;
    update_stopping_steps(at_step, feats, fdim, bag_of, step, stop_step);
    for (std::size_t k = 0; k < K; ++k) {
      if (stop_step[k] != before[k]) realized[k] = now[k];
    }
  }
  return BaggedStopper(reward_spec, config.feature_mode, paths.dim(), N, B,
                       std::move(trees));
}

StopResult apply(const BaggedStopper& stopper, const PathEnsemble& paths) {
  check_compatible(paths, stopper.reward_spec());
  if (paths.num_steps() != stopper.steps() || paths.dim() != stopper.state_dim()) {
    throw DimensionError(fmt::format(
        "apply: ensemble shape (N={}, D={}) differs from the stopper's (N={}, D={})",
        paths.num_steps(), paths.dim(), stopper.steps(), stopper.state_dim()));
  }
  const std::size_t K = paths.num_paths();
  const std::size_t N = paths.num_steps();
  const std::size_t B = stopper.bags();
  const std::size_t fdim = stopper.feature_dim();
  const auto& spec = stopper.reward_spec();

  StopResult result;
  result.stop_step.assign(K, static_cast<std::uint32_t>(N));
  result.reward.assign(K, 0.0);
  result.label = paths.label();
  result.seed = paths.seed();
  result.stopper_hash = stopper.hash();

  const auto count = static_cast<std::int64_t>(K);
#pragma omp parallel
  {
    std::vector<double> buf(fdim);
#pragma omp for schedule(static)
    for (std::int64_t kk = 0; kk < count; ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      std::size_t tau = N;
      for (std::size_t n = 0; n < N; ++n) {
        features_into(stopper.feature_mode(), spec, n, paths.state(k, n), buf);
        if (2 * stopper.votes(n, buf.data()) >= B) {
          tau = n;
          break;
        }
      }
      result.stop_step[k] = static_cast<std::uint32_t>(tau);
      result.reward[k] = reward(spec, tau, paths.state(k, tau));
    }
  }
  result.stop_count.assign(N + 1, 0);
  for (auto s : result.stop_step) ++result.stop_count[s];
  return result;
}

}  // namespace optstop
