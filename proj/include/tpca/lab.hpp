#pragma once

#include <string>
#include <vector>

#include "tpca/calibration.hpp"
#include "tpca/io.hpp"
#include "tpca/stats.hpp"

namespace tpca {

struct ExperimentManifest {
  std::string algorithm = "unfold";  // unfold | titi | symmetric | sdp
  std::vector<int> n_values;
  int k = 3;
  std::vector<double> tau_multipliers;  // tau = mult * n^{k/4} log(n)^{1/4}
  std::vector<std::string> noise_kinds = {"iid_gaussian"};
  int trials = 10;
  uint64_t base_seed = 1;
  std::string out_prefix = "sweep";

  static ExperimentManifest from_json_file(const std::string& path);
  std::string to_json() const;
};

struct CellSummary {
  std::string algo;
  int n = 0;
  int k = 3;
  double tau = 0.0;
  std::string noise;
  double corr_sq_median = 0.0;
  double corr_sq_q25 = 0.0;
  double corr_sq_q75 = 0.0;
  double matvecs_median = 0.0;
  double time_ms_median = 0.0;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<CellSummary> cells;
};

SweepResult run_phase_sweep(const ExperimentManifest& manifest);
void write_sweep(const std::string& prefix, const SweepResult& result);

struct ConcentrationRecord {
  std::string statistic;
  int n = 0;
  double norm_median = 0.0;
  std::vector<double> norms;
  int reps = 0;
};

struct ConcentrationFit {
  std::string statistic;
  std::vector<ConcentrationRecord> records;
  LineFit fit;          // log norm vs log n (log-corrected where stated)
  bool log_corrected = false;
};

// statistic in {titi_centered_norm, square_opnorm, rect_opnorm,
// gram_deviation, vA_norm}
ConcentrationFit run_concentration(const std::string& statistic, const std::vector<int>& n_list,
                                   int reps, uint64_t seed);

struct BenchmarkResult {
  std::vector<ResultRow> rows;  // one row per (trial, algorithm)
  std::vector<CellSummary> summary;
};

// Figure-1 style comparison: titi vs shifted unfolding vs naive unfolding.
BenchmarkResult run_benchmark(int n, int trials, uint64_t seed);
void write_benchmark(const std::string& prefix, const BenchmarkResult& result, int n);

Calibration calibrate_thresholds(const std::vector<int>& titi_n, int titi_reps,
                                 const std::vector<int>& sdp_n, int sdp_reps, uint64_t seed);

}  // namespace tpca
