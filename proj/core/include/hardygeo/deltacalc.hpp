#pragma once

#include <cstdint>
#include <vector>

#include "hardygeo/distfield.hpp"
#include "hardygeo/domains.hpp"

namespace hardygeo {

// -Delta delta on the good set, by curvature formula and by stencil.
struct LaplacianField {
  std::vector<double> neg_lap_formula;  // sum_i kappa_i(N)/(1 - delta kappa_i)
  std::vector<double> neg_lap_fd;       // -(centered second-difference Laplacian)
  std::vector<double> bound_field;      // n H(N) / (n - delta H(N))
  std::vector<std::uint8_t> good;       // inside, solved, non-singular
  std::vector<std::uint8_t> fd_valid;   // good, >= 3 cells from S and boundary
  long good_count = 0;
  long inconsistent = 0;        // good cells with 1 - delta kappa_i <= 0
  double inf_formula = 0.0;     // inf of neg_lap_formula over good cells
  double max_rel_mismatch = 0;  // |formula - fd| / max(1,|formula|) on fd_valid
};

// Evaluates the curvature formula and bound per good cell and the stencil
// Laplacian on fd_valid cells (cylindrical grids add the d_s/s term; cells
// within 1.5h of the axis are excluded from fd_valid). Throws
// InvariantViolation when inconsistent cells exceed 0.1% of good cells.
LaplacianField neg_laplacian_formula(const Domain& dom, const DistanceField& f);

// Smooth non-negative bump amp * exp(1 - 1/(1 - r^2/rad^2)) on r < rad.
struct TestBump {
  Vec center{0, 0, 0};
  double rad = 1.0;
  double amp = 1.0;
};
double bump_value(const TestBump& b, const Vec& x);
Vec bump_grad(const TestBump& b, const Vec& x);

// Deterministic random bumps with support strictly inside the domain and off
// the truncation faces (two-cell margin). min_rad_cells sets the smallest
// radius in cell widths; quadrature-sensitive consumers (the L2 identity
// needs ~16 cells across a bump for 1e-2 accuracy) pass a larger floor.
std::vector<TestBump> random_bumps(const Domain& dom, const DistanceField& f,
                                   int count, std::uint64_t seed,
                                   int min_rad_cells = 4);

struct DistributionalResult {
  double lhs = 0.0;       // integral of grad(delta) . grad(phi)
  double rhs = 0.0;       // integral of nH/(n - delta H) phi
  double residual = 0.0;  // lhs - rhs; expected >= -eps_quad
  double eps_quad = 0.0;  // C h |supp phi| max |discrete gradient of integrand|
  double max_phi = 0.0;
};

// Midpoint quadrature of the distributional superharmonicity inequality.
// Singular cells participate in both integrals; the second integrand uses the
// recorded nearest point's H there. Throws ConfigurationError when the bump
// support touches the truncation faces or leaves the domain.
DistributionalResult distributional_check(const Domain& dom,
                                          const DistanceField& f,
                                          const LaplacianField& lap,
                                          const TestBump& phi);

struct InfEquivalenceResult {
  double inf_neg_lap = 0.0;  // inf of the curvature formula over good cells
  double inf_H = 0.0;        // H0 from the convexity report
  double gap = 0.0;
  bool verdict_match = false;  // sign agreement at tolerance
  double tol = 0.0;
};
InfEquivalenceResult inf_equivalence(const DistanceField& f,
                                     const LaplacianField& lap,
                                     const ConvexityReport& conv);

// Counts good cells violating
//   -Delta delta >= p H0^p (p/(p-1))^(p-1) delta^(p-1) / n^(p-1)
// beyond a relative tolerance. Throws ConfigurationError when H0 < 0.
struct GrowthCheckResult {
  long violations = 0;
  double min_margin = 0.0;  // min of formula - bound over good cells
  double p = 2.0;
  double H0 = 0.0;
};
GrowthCheckResult growth_estimate_check(const Domain& dom,
                                        const DistanceField& f,
                                        const LaplacianField& lap, double p,
                                        double H0);

}  // namespace hardygeo
