#include "tpca/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpca {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  size_t lo = size_t(std::floor(pos));
  size_t hi = size_t(std::ceil(pos));
  double frac = pos - double(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  int n = int(x.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[size_t(i)];
    sy += y[size_t(i)];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[size_t(i)] - mx) * (x[size_t(i)] - mx);
    sxy += (x[size_t(i)] - mx) * (y[size_t(i)] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_line: degenerate x");
  LineFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (int i = 0; i < n; ++i) {
    double r = y[size_t(i)] - (f.intercept + f.slope * x[size_t(i)]);
    sse += r * r;
  }
  if (n > 2) f.slope_stderr = std::sqrt(sse / double(n - 2) / sxx);
  f.ci95 = 1.96 * f.slope_stderr;
  return f;
}

namespace {

// standard normal quantile, Acklam's rational approximation
double probit(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  if (p <= 0 || p >= 1) throw std::invalid_argument("probit: p in (0,1) required");
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) return -probit(1 - p);
  double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

bool mann_kendall_decreasing(const std::vector<double>& v, double alpha) {
  int n = int(v.size());
  if (n < 3) return false;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = v[size_t(j)] - v[size_t(i)];
      s += d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
    }
  double var = double(n) * (n - 1) * (2 * n + 5) / 18.0;
  double z;
  if (s > 0)
    z = (s - 1) / std::sqrt(var);
  else if (s < 0)
    z = (s + 1) / std::sqrt(var);
  else
    z = 0;
  // one-sided: significant decreasing trend when z < -z_{1-alpha}
  return z < probit(alpha);
}

}  // namespace tpca
