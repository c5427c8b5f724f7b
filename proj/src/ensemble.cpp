#include "optstop/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "optstop/error.hpp"
#include "optstop/hash.hpp"

namespace optstop {

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

std::string_view to_string(EnsembleLabel label) {
  return label == EnsembleLabel::training ? "training" : "test";
}

EnsembleLabel parse_ensemble_label(std::string_view text) {
  if (text == "training" || text == "train") return EnsembleLabel::training;
  if (text == "test") return EnsembleLabel::test;
  throw ParameterError(fmt::format("unknown ensemble label '{}'", text));
}

std::string_view to_string(VolMode mode) {
  switch (mode) {
    case VolMode::explicit_vols:
      return "explicit";
    case VolMode::symmetric:
      return "symmetric";
    case VolMode::asymmetric:
      return "asymmetric";
  }
  return "?";
}

VolMode parse_vol_mode(std::string_view text) {
  if (text == "explicit") return VolMode::explicit_vols;
  if (text == "symmetric") return VolMode::symmetric;
  if (text == "asymmetric") return VolMode::asymmetric;
  throw ParameterError(fmt::format("unknown vol mode '{}'", text));
}

double asymmetric_vol(std::size_t d, std::size_t dim) {
  if (d < 1 || d > dim) throw ParameterError("asymmetric_vol: index out of range");
  if (dim == 1) return 0.08;
  const auto dd = static_cast<double>(d);
  const auto dimd = static_cast<double>(dim);
  if (dim <= 5) return 0.08 + 0.32 * (dd - 1.0) / (dimd - 1.0);
  return 0.1 + dd / (2.0 * dimd);
}

std::vector<double> GbmSpec::resolved_vols() const {
  std::vector<double> out(dim);
  switch (vol_mode) {
    case VolMode::symmetric:
      std::fill(out.begin(), out.end(), sigma_scalar);
      break;
    case VolMode::asymmetric:
      for (std::size_t d = 0; d < dim; ++d) out[d] = asymmetric_vol(d + 1, dim);
      break;
    case VolMode::explicit_vols:
      if (vols.size() == 1) {
        std::fill(out.begin(), out.end(), vols.front());
      } else if (vols.size() == dim) {
        out = vols;
      } else {
        throw ParameterError(fmt::format(
            "explicit vols: expected 1 or {} entries, got {}", dim, vols.size()));
      }
      break;
  }
  return out;
}

std::vector<double> GbmSpec::resolved_initial() const {
  if (initial.empty()) return std::vector<double>(dim, x0);
  if (initial.size() != dim) {
    throw ParameterError(fmt::format("initial point: expected {} entries, got {}",
                                     dim, initial.size()));
  }
  return initial;
}

void GbmSpec::validate() const {
  if (dim == 0) throw ParameterError("gbm: dim must be positive");
  if (steps == 0) throw ParameterError("gbm: steps must be positive");
  if (!(maturity > 0.0) || !std::isfinite(maturity)) {
    throw ParameterError("gbm: maturity must be positive");
  }
  if (!std::isfinite(drift)) throw ParameterError("gbm: drift must be finite");
  for (double x : resolved_initial()) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ParameterError("gbm: initial value must be positive");
    }
  }
  // Zero volatility is accepted: it yields deterministic paths.
  for (double s : resolved_vols()) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ParameterError("gbm: volatility must be non-negative");
    }
  }
}

PathEnsemble::PathEnsemble(std::size_t num_paths, std::size_t num_steps,
                           std::size_t dim, std::vector<double> data,
                           std::uint64_t seed, EnsembleLabel label,
                           bool has_barrier_indicator)
    : num_paths_(num_paths),
      num_steps_(num_steps),
      dim_(dim),
      data_(std::move(data)),
      seed_(seed),
      label_(label),
      has_indicator_(has_barrier_indicator) {
  if (num_paths_ == 0 || num_steps_ == 0 || dim_ == 0) {
    throw ParameterError("ensemble: K, N and D must be positive");
  }
  if (data_.size() != num_paths_ * (num_steps_ + 1) * dim_) {
    throw DimensionError(fmt::format("ensemble: expected {} values, got {}",
                                     num_paths_ * (num_steps_ + 1) * dim_,
                                     data_.size()));
  }
}

std::vector<double> PathEnsemble::initial_point() const {
  auto s = state(0, 0);
  return {s.begin(), s.end()};
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ stream)) {}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double kScale = 0x1.0p-53;
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * kScale;
  const double u2 = static_cast<double>(engine_() >> 11) * kScale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

PathEnsemble generate_gbm(const GbmSpec& spec, std::size_t num_paths,
                          std::uint64_t seed, EnsembleLabel label) {
  if (num_paths == 0) throw ParameterError("gbm: K must be positive");
  spec.validate();
  const std::size_t dim = spec.dim;
  const std::size_t steps = spec.steps;
  const auto vols = spec.resolved_vols();
  const auto x0 = spec.resolved_initial();
  const double dt = spec.maturity / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);

  std::vector<double> drift_per_step(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    drift_per_step[d] = spec.drift - 0.5 * vols[d] * vols[d];
  }

  std::vector<double> data(num_paths * (steps + 1) * dim);
  const auto paths = static_cast<std::int64_t>(num_paths);
#pragma omp parallel for schedule(static)
  for (std::int64_t kk = 0; kk < paths; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    NormalStream normals(seed, k);
    std::vector<double> eps_sum(dim, 0.0);
    double* row = data.data() + k * (steps + 1) * dim;
    std::copy(x0.begin(), x0.end(), row);
    for (std::size_t n = 1; n <= steps; ++n) {
      const double t = static_cast<double>(n) * spec.maturity / static_cast<double>(steps);
      for (std::size_t d = 0; d < dim; ++d) {
        eps_sum[d] += normals.next();
        row[n * dim + d] =
            x0[d] * std::exp(drift_per_step[d] * t + vols[d] * sqrt_dt * eps_sum[d]);
      }
    }
  }
  return PathEnsemble(num_paths, steps, dim, std::move(data), seed, label);
}

PathEnsemble augment_barrier(const PathEnsemble& paths, double barrier) {
  if (!(barrier > 0.0) || !std::isfinite(barrier)) {
    throw ParameterError("augment_barrier: barrier must be positive");
  }
  if (paths.has_barrier_indicator()) {
    throw ParameterError("augment_barrier: ensemble already carries an indicator");
  }
  const std::size_t K = paths.num_paths();
  const std::size_t N = paths.num_steps();
  const std::size_t D = paths.dim();
  std::vector<double> data(K * (N + 1) * (D + 1));
  for (std::size_t k = 0; k < K; ++k) {
    double running_max = -INFINITY;
    for (std::size_t n = 0; n <= N; ++n) {
      auto x = paths.state(k, n);
      double* out = data.data() + (k * (N + 1) + n) * (D + 1);
      std::copy(x.begin(), x.end(), out);
      running_max = std::max(running_max, *std::max_element(x.begin(), x.end()));
      out[D] = running_max <= barrier ? 1.0 : 0.0;
    }
  }
  return PathEnsemble(K, N, D + 1, std::move(data), paths.seed(), paths.label(),
                      true);
}

void write_ensemble_csv(std::ostream& out, const PathEnsemble& paths) {
  out << fmt::format("# K={},N={},D={},seed={},label={},indicator={}\n",
                     paths.num_paths(), paths.num_steps(), paths.dim(), paths.seed(),
                     to_string(paths.label()), paths.has_barrier_indicator() ? 1 : 0);
  out << "k,n,d,value\n";
  for (std::size_t k = 0; k < paths.num_paths(); ++k) {
    for (std::size_t n = 0; n <= paths.num_steps(); ++n) {
      for (std::size_t d = 0; d < paths.dim(); ++d) {
        out << fmt::format("{},{},{},{:.17g}\n", k, n, d, paths.value(k, n, d));
      }
    }
  }
}

PathEnsemble read_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ConfigError("ensemble csv: missing '# K=...' header");
  }
  std::size_t K = 0, N = 0, D = 0;
  std::uint64_t seed = 0;
  EnsembleLabel label = EnsembleLabel::training;
  bool indicator = false;
  std::stringstream header(line.substr(2));
  std::string field;
  while (std::getline(header, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError("ensemble csv: bad header field");
    const auto key = field.substr(0, eq);
    const auto val = field.substr(eq + 1);
    if (key == "K") K = std::stoull(val);
    else if (key == "N") N = std::stoull(val);
    else if (key == "D") D = std::stoull(val);
    else if (key == "seed") seed = std::stoull(val);
    else if (key == "label") label = parse_ensemble_label(val);
    else if (key == "indicator") indicator = val == "1";
  }
  if (!std::getline(in, line) || line != "k,n,d,value") {
    throw ConfigError("ensemble csv: missing column header");
  }
  std::vector<double> data(K * (N + 1) * D);
  std::vector<char> seen(data.size(), 0);
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t k, n, d;
    double v;
    char c1, c2, c3;
    std::stringstream row(line);
    if (!(row >> k >> c1 >> n >> c2 >> d >> c3 >> v) || k >= K || n > N || d >= D) {
      throw ConfigError(fmt::format("ensemble csv: bad row at line {}", line_no));
    }
    const auto idx = (k * (N + 1) + n) * D + d;
    data[idx] = v;
    seen[idx] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ConfigError("ensemble csv: missing rows");
  }
  return PathEnsemble(K, N, D, std::move(data), seed, label, indicator);
}

}  // namespace optstop
