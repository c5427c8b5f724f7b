#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace optstop {

enum class EnsembleLabel { training, test };

std::string_view to_string(EnsembleLabel label);
EnsembleLabel parse_ensemble_label(std::string_view text);

enum class VolMode { explicit_vols, symmetric, asymmetric };

std::string_view to_string(VolMode mode);
VolMode parse_vol_mode(std::string_view text);

/// Discretised geometric Brownian motion with independent coordinates.
///
/// In `symmetric` mode every coordinate uses `sigma_scalar`; in `asymmetric`
/// mode the per-coordinate volatilities follow the fixed ladder
/// 0.08 + 0.32 (d-1)/(D-1) for D <= 5 and 0.1 + d/(2D) for D > 5 (1-based d);
/// in `explicit_vols` mode `vols` is used as given (one entry, or D entries).
struct GbmSpec {
  std::size_t dim = 1;
  double x0 = 100.0;
  double drift = 0.05;
  double maturity = 1.0;
  std::size_t steps = 50;
  VolMode vol_mode = VolMode::symmetric;
  double sigma_scalar = 0.2;
  std::vector<double> vols;
  // Optional per-coordinate initial point; overrides x0 when non-empty.
  std::vector<double> initial;

  /// Per-coordinate volatilities after applying the vol mode.
  std::vector<double> resolved_vols() const;
  /// Per-coordinate initial point after broadcasting x0.
  std::vector<double> resolved_initial() const;
  void validate() const;
};

/// Volatility ladder of the asymmetric max-call experiments (1-based d).
double asymmetric_vol(std::size_t d, std::size_t dim);

/// K sampled paths of length N+1 in D dimensions, immutable after construction.
/// Storage is step-major per path: value(k, n, d) lives at (k*(N+1) + n)*D + d.
class PathEnsemble {
 public:
  PathEnsemble(std::size_t num_paths, std::size_t num_steps, std::size_t dim,
               std::vector<double> data, std::uint64_t seed,
               EnsembleLabel label, bool has_barrier_indicator = false);

  std::size_t num_paths() const { return num_paths_; }
  std::size_t num_steps() const { return num_steps_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  EnsembleLabel label() const { return label_; }
  // True when the last coordinate is the running barrier indicator.
  bool has_barrier_indicator() const { return has_indicator_; }

  std::span<const double> state(std::size_t k, std::size_t n) const {
    return {data_.data() + (k * (num_steps_ + 1) + n) * dim_, dim_};
  }
  double value(std::size_t k, std::size_t n, std::size_t d) const {
    return data_[(k * (num_steps_ + 1) + n) * dim_ + d];
  }
  std::span<const double> raw() const { return data_; }

  std::vector<double> initial_point() const;

 private:
  std::size_t num_paths_;
  std::size_t num_steps_;
  std::size_t dim_;
  std::vector<double> data_;
  std::uint64_t seed_;
  EnsembleLabel label_;
  bool has_indicator_;
};

/// Simulates K paths. Path k draws its normals from its own generator seeded
/// from (seed, k), so the output does not depend on thread count.
PathEnsemble generate_gbm(const GbmSpec& spec, std::size_t num_paths,
                          std::uint64_t seed, EnsembleLabel label);

/// Appends the running barrier indicator 1{max_{d, n' <= n} x[n'][d] <= barrier}.
PathEnsemble augment_barrier(const PathEnsemble& paths, double barrier);

/// Debug dump: '#'-prefixed header line, then "k,n,d,value" rows.
void write_ensemble_csv(std::ostream& out, const PathEnsemble& paths);
PathEnsemble read_ensemble_csv(std::istream& in);

/// Deterministic per-path standard normal stream: std::mt19937_64 seeded by
/// splitmix64(seed, stream), 53-bit uniforms, Box-Muller (cosine draw first,
/// then the sine draw).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);
  double next();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace optstop
