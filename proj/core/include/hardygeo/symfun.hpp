#pragma once

#include <vector>

namespace hardygeo {

// Elementary symmetric polynomials sigma_0..sigma_n of v, computed by the
// coefficient recurrence for prod_i (1 + v_i t). Stable in O(n^2); no
// subset enumeration.
std::vector<double> sigma_all(const std::vector<double>& v);

// sigma_k(v); k outside [0, n] returns 0.
double sigma_k(const std::vector<double>& v, int k);

// Newton-Maclaurin chain for a positive vector v of length n:
//   terms[j] = c(n,k) * sigma_{k-1}(v) / sigma_k(v)  for k = n, n-1, ..., 1
// with c(n,k) = n(n-k+1)/k, so terms runs from sigma_{n-1}/sigma_n up to
// n^2/sigma_1 and is non-increasing, with equality throughout iff all
// entries of v are equal.
struct NewtonChain {
  std::vector<double> terms;  // k = n down to 1
  std::vector<double> cnk;    // matching constants c(n,k)
  bool nonincreasing = false; // chain holds within tol (relative)
  bool equality_case = false; // all v_i equal within tol (relative)
};
NewtonChain newton_chain(const std::vector<double>& v, double tol = 1e-12);

// Curvature-sum bound: for kappa = (kappa_1..kappa_n), delta >= 0 with
// 1 - delta*kappa_i > 0 for all i,
//   lhs = sum_i kappa_i/(1 - delta kappa_i) >= n H / (n - delta H) = rhs,
// H = sum_i kappa_i, with equality iff all kappa_i are equal.
struct CurvatureSumBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double H = 0.0;
  bool admissible = false;  // all denominators positive
  bool holds = false;       // lhs >= rhs - tol (only meaningful if admissible)
  bool equality = false;    // |lhs - rhs| <= eq_tol * scale
};
CurvatureSumBound curvature_sum_bound(const std::vector<double>& kappa, double delta,
                                      double tol = 1e-12, double eq_tol = 1e-9);

}  // namespace hardygeo
