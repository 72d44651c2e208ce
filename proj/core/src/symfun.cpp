#include "hardygeo/symfun.hpp"

#include <cmath>
#include <cstddef>

namespace hardygeo {

std::vector<double> sigma_all(const std::vector<double>& v) {
  std::size_t n = v.size();
  std::vector<double> s(n + 1, 0.0);
  s[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k >= 1; --k) s[k] += v[i] * s[k - 1];
  }
  return s;
}

double sigma_k(const std::vector<double>& v, int k) {
  if (k < 0 || k > static_cast<int>(v.size())) return 0.0;
  return sigma_all(v)[static_cast<std::size_t>(k)];
}

NewtonChain newton_chain(const std::vector<double>& v, double tol) {
  NewtonChain out;
  int n = static_cast<int>(v.size());
  if (n == 0) return out;
  std::vector<double> s = sigma_all(v);
  out.terms.reserve(static_cast<std::size_t>(n));
  out.cnk.reserve(static_cast<std::size_t>(n));
  for (int k = n; k >= 1; --k) {
    double c = static_cast<double>(n) * static_cast<double>(n - k + 1) / static_cast<double>(k);
    out.cnk.push_back(c);
    out.terms.push_back(c * s[static_cast<std::size_t>(k - 1)] / s[static_cast<std::size_t>(k)]);
  }
  out.nonincreasing = true;
  for (std::size_t j = 1; j < out.terms.size(); ++j) {
    double scale = std::fmax(std::fabs(out.terms[j - 1]), std::fabs(out.terms[j]));
    if (out.terms[j] > out.terms[j - 1] + tol * std::fmax(1.0, scale)) {
      out.nonincreasing = false;
      break;
    }
  }
  double vmin = v[0], vmax = v[0];
  for (double x : v) {
    vmin = std::fmin(vmin, x);
    vmax = std::fmax(vmax, x);
  }
  out.equality_case = (vmax - vmin) <= tol * std::fmax(1.0, std::fabs(vmax));
  return out;
}

CurvatureSumBound curvature_sum_bound(const std::vector<double>& kappa, double delta,
                                      double tol, double eq_tol) {
  CurvatureSumBound out;
  int n = static_cast<int>(kappa.size());
  if (n == 0) return out;
  out.admissible = true;
  double lhs = 0.0, H = 0.0;
  for (double k : kappa) {
    double den = 1.0 - delta * k;
    if (den <= 0.0) out.admissible = false;
    lhs += k / den;
    H += k;
  }
  out.H = H;
  out.lhs = lhs;
  double nd = static_cast<double>(n);
  out.rhs = nd * H / (nd - delta * H);
  if (out.admissible) {
    double scale = std::fmax(1.0, std::fmax(std::fabs(out.lhs), std::fabs(out.rhs)));
    out.holds = out.lhs >= out.rhs - tol * scale;
    out.equality = std::fabs(out.lhs - out.rhs) <= eq_tol * scale;
  }
  return out;
}

}  // namespace hardygeo
