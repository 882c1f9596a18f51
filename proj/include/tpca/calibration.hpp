#pragma once

#include <map>
#include <string>

namespace tpca {

// Constants behind the paper-style O(.) thresholds, pinned by pure-noise
// Monte-Carlo quantiles. A table ships with the repo (data/calibration.json)
// and can be regenerated with `tpca-lab calibrate`.
struct Calibration {
  // 99th percentile of ||sum_i A_i (x) A_i - n ww^T|| on pure iid noise.
  std::map<int, double> titi_noise_q99;
  // 99th percentile of the pure-noise moment-SDP optimum.
  std::map<int, double> sdp_noise_q99;

  // Numeric constants for the lower-bound preconditions.
  double lb3_corr_coeff = 0.5;    // <A, sum_pi A^pi> >= coeff * n^3
  double lb3_spec_coeff = 1.0;    // lambda_min(Psi_pi) >= -coeff * lambda^2 / 18
  double lb3_trace_coeff = 4.0;   // <Idsym-sum, F F^T> <= coeff * lambda^2 n^2
  double lb3_delta_cap = 10.0;    // n d1 + n^{3/2} d2' + n^2 d2 <= cap
  double lb4_corr_coeff = 0.5;
  double lb4_spec_coeff = 1.0;    // lambda_min(sym(A^pi)) >= -coeff * lambda^2
  double lb4_trace_coeff = 4.0;   // |<Idsym-sum, A>| <= coeff * lambda^2 n^{3/2}
  double lb4_delta_cap = 10.0;

  // Recommended lambda choices for the constructions: lambda = lb3_lambda_mult
  // * n^{3/4} log(n)^{1/4} and lambda^2 = lb4_lambda_mult * n.
  double lb3_lambda_mult = 7.0;
  double lb4_lambda_mult = 1.8;

  // Multipliers used when a requested n is absent from a table: the nearest
  // entry is scaled by the theory growth law.
  double titi_threshold(int n) const;
  double sdp_threshold(int n) const;

  static Calibration load(const std::string& path);
  void save(const std::string& path) const;
  // Shipped table if present, otherwise built-in defaults.
  static const Calibration& get();
  static void set(const Calibration& c);
  static std::string default_path();
};

}  // namespace tpca
