#pragma once

#include "tpca/pseudo.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

struct LowerBoundDiagnostics {
  double correlation = 0.0;      // <A, sum_pi A^pi>
  double spec_min = 0.0;         // worst lambda_min over the permutation family
  double spec_threshold = 0.0;   // the bound it was checked against
  double trace_stat = 0.0;
  double trace_threshold = 0.0;
  double delta_combo = 0.0;      // n d1 + n^{3/2} d2' + n^2 d2
  double delta_cap = 0.0;
  bool spec_converged = true;
};

// Degree-3 lower-bound pseudo-expectation from the noise tensor alone:
// degree-3 moments (1/(lambda n^{3/2})) sum_pi A^pi, per-permutation Schur
// extension of the degree-4 block, sphere correction, then uniform mixing.
// Throws precondition_error naming the failed numeric condition.
PseudoExpectation build_lb_deg3(const DenseTensor& a, double lambda,
                                const Calibration& cal = Calibration::get(),
                                LowerBoundDiagnostics* diag = nullptr);

// Degree-4 analogue: fourth moments (1/(24 n^2 lambda^2)) sum_{pi in S4} A^pi
// added to uniform moments, then the same correction/mixing pipeline.
PseudoExpectation build_lb_deg4(const DenseTensor& a, double lambda,
                                const Calibration& cal = Calibration::get(),
                                LowerBoundDiagnostics* diag = nullptr);

}  // namespace tpca
