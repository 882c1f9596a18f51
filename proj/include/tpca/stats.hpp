#pragma once

#include <vector>

namespace tpca {

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);  // q in [0,1], linear interpolation

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci95 = 0.0;  // 1.96 * stderr
  int points = 0;
};

// Least-squares fit of y against x (callers pass logs for log-log slopes).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// One-sided Mann-Kendall trend test: returns true when a DECREASING trend is
// significant at the given level (normal approximation).
bool mann_kendall_decreasing(const std::vector<double>& v, double alpha = 0.05);

}  // namespace tpca
