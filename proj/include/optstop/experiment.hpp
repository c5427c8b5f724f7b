#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optstop/config.hpp"
#include "optstop/ensemble.hpp"
#include "optstop/stopper.hpp"
#include "optstop/valuation.hpp"

namespace optstop {

/// Simulates the training or test ensemble of `config` (with the barrier
/// indicator appended for the barrier model).
PathEnsemble make_ensemble(const ExperimentConfig& config, EnsembleLabel label);

struct ExperimentResult {
  ExperimentConfig config;
  BaggedStopper stopper;
  std::vector<ValuationReport> reports;
  std::optional<BoundaryScatter> boundary;
  double train_seconds = 0.0;
  double total_seconds = 0.0;

  const ValuationReport* find(ValuationKind kind) const;
};

/// Train on a fresh training ensemble, then value on both ensembles.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Values an existing stopper on the test ensemble of `config` only.
ExperimentResult evaluate_stopper(const ExperimentConfig& config, BaggedStopper stopper);

/// Reads a "n,b" CSV with one theoretical boundary value per step 0..steps.
std::vector<double> read_boundary_file(const std::filesystem::path& path, std::size_t steps);

// Writers. Every file starts with a '#' provenance line carrying the config
// hash and seeds. Numbers use the "%.10g" format.
std::string provenance_line(const ExperimentConfig& config);
void write_valuation_csv(std::ostream& out, const ExperimentConfig& config,
                         const std::vector<ValuationReport>& reports);
void write_boundary_csv(std::ostream& out, const ExperimentConfig& config,
                        const BoundaryScatter& boundary);
void write_boundary_summary_csv(std::ostream& out, const ExperimentConfig& config,
                                const BoundaryScatter& boundary);
void write_stopper(std::ostream& out, const ExperimentConfig& config,
                   const BaggedStopper& stopper);

/// Writes valuation.csv, stopper.txt, config.resolved.txt and, when present,
/// boundary.csv and boundary_summary.csv into `dir`. Returns the file paths.
std::vector<std::filesystem::path> write_artifacts(const ExperimentResult& result,
                                                   const std::filesystem::path& dir);

enum class BenchmarkSuite { put, maxcall_sym, maxcall_asym, barrier };

std::string_view to_string(BenchmarkSuite suite);
BenchmarkSuite parse_benchmark_suite(std::string_view text);

struct BenchmarkRow {
  ExperimentConfig config;
  double v_train = 0.0;
  double v_test = 0.0;
  double v_test_se = 0.0;
  double v_max = 0.0;
  std::optional<double> ls_test;
  std::optional<double> reference_v_test;
  std::optional<double> reference_ls_test;
  double seconds = 0.0;
};

struct BenchmarkOptions {
  double scale = 1.0;
  std::size_t max_dim = 0;  // 0: no limit
  std::vector<std::string> overrides;
  ExperimentConfig base;
};

/// Resolved configs of a suite's grid, without running them.
std::vector<ExperimentConfig> benchmark_grid(BenchmarkSuite suite,
                                             const BenchmarkOptions& options);

std::vector<BenchmarkRow> run_benchmark(
    BenchmarkSuite suite, const BenchmarkOptions& options,
    const std::function<void(const BenchmarkRow&)>& on_row = {});

/// Deterministic table (no wall time).
void write_benchmark_csv(std::ostream& out, BenchmarkSuite suite,
                         const std::vector<BenchmarkRow>& rows);
/// Wall time per row, kept apart so the table stays byte-identical across runs.
void write_benchmark_timing_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

}  // namespace optstop
