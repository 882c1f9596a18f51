#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpca/instance.hpp"
#include "tpca/moment_matrix.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

// Binary format: 16-byte header (8-byte magic "TPCATNSR", u32 version, u32
// reserved), then little-endian u32 k, u32 n, then n^k little-endian f64.
// Matrices use the same header with k = 2 semantics and n = side length.
void write_tensor(const std::string& path, const DenseTensor& t);
DenseTensor read_tensor(const std::string& path);

void write_matrix(const std::string& path, const MatrixXd& m);
MatrixXd read_matrix(const std::string& path);

// Sidecar JSON metadata next to a tensor file.
void write_instance(const std::string& path, const SpikedInstance& inst);
SpikedInstance read_instance(const std::string& path);

// Fixed-schema result row; the CSV column order is part of the interface.
struct ResultRow {
  std::string algo;
  int n = 0;
  int k = 0;
  double tau = 0.0;
  uint64_t seed = 0;
  uint64_t stream = 0;
  double correlation = 0.0;
  double corr_sq = 0.0;
  int64_t matvecs = 0;
  double time_ms = 0.0;
  std::string verdict;  // empty, "certify", "fail", "degenerate", "nonconv"
  double lambda_cert = 0.0;
};

std::string csv_header();
std::string csv_line(const ResultRow& r);
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::string format_double(double v);

// JSON serialization of result rows (CLI --format json).
std::string rows_to_json(const std::vector<ResultRow>& rows);

// Minimal self-contained SVG line plot with error bars; series share x values.
struct PlotSeries {
  std::string label;
  std::vector<double> y;
  std::vector<double> yerr;
};
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<double>& x, const std::vector<PlotSeries>& series,
                    bool loglog = false);

}  // namespace tpca
