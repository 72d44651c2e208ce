#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hardygeo/deltacalc.hpp"
#include "hardygeo/distfield.hpp"
#include "hardygeo/domains.hpp"

namespace hardygeo {

// Grid function vanishing outside a compact sub-region of the domain.
// `kind` records the construction so that quotient evaluation can pick the
// right quadrature; eps/cutoff/p are the profile parameters of
// boundary-layer trials and are meaningless for the other kinds.
struct TrialFunction {
  std::vector<double> values;  // one per grid cell, zero outside the support
  std::string description;
  std::string kind = "custom";  // boundary_layer | random_bump | eigen_iterate | custom
  double eps = 0.0;
  double cutoff = 0.0;
  double p = 0.0;
};

struct SolverOptions {
  int max_iter = 500;
  double tol = 1e-8;
  std::uint64_t seed = 1;
};

struct QuotientReport {
  double value = 0.0;
  double p = 2.0;
  double q = 0.0;  // hs_quotient only
  std::string kind;  // mu_p | bm_lambda | lambda_lower | hs_quotient
  int iterations = 0;
  std::vector<double> history;  // accepted quotient values per iteration
  int grid_resolution = 0;
  std::uint64_t seed = 0;
  bool unconverged = false;
  bool breakdown = false;        // indefinite Brezis-Marcus form
  bool upper_bound_only = false; // p != 2 descent reports an upper bound
  std::vector<std::string> flags;
};

struct RemainderTable {
  double lambda_BM = 0.0;   // 1/(4 diam^2)
  double lambda_HHL = 0.0;  // c(n)/|Omega|^{2/(n+1)}
  double lambda_FMT = 0.0;  // 3/(4 R_int^2)
  double lambda_EL = 0.0;   // 6 lambda_HHL
  double lambda_AW = 0.0;   // j0^2/R_int^2, j0 = 0.940 (three decimals, as cited)
  double lambda_paper = 0.0;  // inf (-Delta delta)/(2 delta)
  double diam = 0.0, volume = 0.0, R_int = 0.0, sphere_measure = 0.0;
  int n = 1;  // boundary dimension = ambient - 1
  bool truncation_dependent = false;

  double max_entry() const;
};

// Trial builders. Boundary-layer profile min(delta, cutoff)^{(p-1)/p + eps},
// faded to zero within four cells of any truncation face.
TrialFunction boundary_layer_trial(const Domain& dom, const DistanceField& f,
                                   double eps, double cutoff, double p = 2.0);
TrialFunction bump_trial(const DistanceField& f, const TestBump& b);
TrialFunction trial_from_function(const DistanceField& f,
                                  const std::function<double(const Vec&)>& fn,
                                  const std::string& description);

// (sum_cells vol |grad_h f|^p) / (sum_cells vol |f/delta|^p). Boundary-layer
// profiles are integrated in closed form against the cell measure (the
// forward-difference energy of a fractional power of delta never converges
// to its integral on a fixed grid, most of it sits below the cell scale);
// all other trials use forward differences with f = 0 outside the domain, so
// each boundary face is penalized once. Eigen iterates at p = 2 must go
// through the domain overload: reproducing the ground-state form that
// produced them needs the ghost closure and the curvature potential, so
// this signature throws ConfigurationError for that combination. Throws
// ConfigurationError on f == 0.
double rayleigh_quotient(const TrialFunction& f, const DistanceField& field,
                         double p);

// Same quotient with the domain available. Eigen iterates are re-evaluated
// through the exact ground-state quadratic form estimate_mu assembled, so
// the value reproduces the reported eigenvalue to rounding; other trial
// kinds defer to the overload above.
double rayleigh_quotient(const Domain& dom, const TrialFunction& f,
                         const DistanceField& field, double p);

// Best Hardy quotient. p = 2: the energy is rewritten through the ground
// state, f = sqrt(delta) g, which turns the quadratic form into a sum of
// delta-weighted differences of g plus the potential delta (-Delta
// sqrt(delta)) - 1/4 vol/delta = vol (-Delta delta)/2; the singular ridge
// share of that potential is recovered from the discrete Laplacian of the
// distance field itself. mu is 1/4 plus the smallest eigenvalue of the
// resulting form against the vol/delta mass, by inverse power iteration
// (warm-up, then Rayleigh shifts), started at g = 1 (the delta^{1/2}
// profile). p != 2: deterministic sharpening over the boundary-layer family
// delta^{(p-1)/p + eps}, halving eps; the result is an upper bound on the
// continuum constant and is flagged as such. If `minimizer` is non-null it
// receives the final iterate.
QuotientReport estimate_mu(const Domain& dom, const DistanceField& f, double p,
                           const SolverOptions& opts,
                           TrialFunction* minimizer = nullptr);

struct LambdaLowerBound {
  double value = 0.0;       // p=2: inf formula/(2 delta); general p as below
  double h0_reference = 0.0;  // (p/n^{p-1}) H0^p
  bool contract_ok = false;   // value >= reference - tol
  double argmin_delta = 0.0;
  Vec argmin_point{0, 0, 0};
};

// Grid evaluation of lambda(n,p,Omega) = ((p-1)/p)^{p-1} inf over good cells
// of neg_lap_formula/delta^{p-1} (the p=2 case reduces to inf/(2 delta)).
// Throws ConfigurationError unless the convexity verdict is weakly mean
// convex.
LambdaLowerBound lambda_lower_bound(const DistanceField& f,
                                    const LaplacianField& lap, double p,
                                    const ConvexityReport& conv);

struct AnalyticLambda {
  double value = 0.0;
  double argmin_delta = 0.0;
  Vec argmin_point{0, 0, 0};
  bool used_censored_ray = false;
  long samples = 0;
};

// Closed-form lambda(n,Omega): minimizes [sum_i kappa_i/(1 - t kappa_i)]/(2t)
// over boundary samples and a dense t-schedule on (0, rho_bar), uniform plus
// a logarithmic tail toward t = 0. Requires closed-form curvatures and ridge
// distances (catalog kinds).
AnalyticLambda analytic_lambda(const Domain& dom, int nsamples = 4096,
                               int ndelta = 4096);

// Brezis-Marcus constant: smallest eigenvalue of the form
// integral |grad f|^2 - 1/4 integral f^2/delta^2 against the plain mass, in
// the same ground-state variables as estimate_mu. Indefinite forms (discrete
// mu < 1/4) are reported with the breakdown flag. The inverse-iteration
// shift is kept below table.max_entry().
QuotientReport estimate_bm_lambda(const Domain& dom, const DistanceField& f,
                                  const RemainderTable& table,
                                  const SolverOptions& opts);

// The six remainder constants. diam/volume/R_int use closed forms for
// catalog kinds and grid fallbacks otherwise; for truncated domains the
// diam/volume entries are flagged truncation-dependent.
RemainderTable remainder_table(const Domain& dom, const DistanceField& f,
                               const LaplacianField& lap);

struct IdentityCheckResult {
  double lhs = 0.0, rhs = 0.0;
  double residual_rel = 0.0;  // |lhs - rhs| / energy
  double energy = 0.0;
};

// L2 Hardy identity under midpoint quadrature with forward differences of
// each composite field:
//   int |grad f|^2 - 1/4 int f^2/d^2
//     = int |grad f - f grad d/(2d)|^2 + int grad d . grad(f^2/(2d)).
IdentityCheckResult identity_check_L2(const TrialFunction& f,
                                      const DistanceField& field);

// |X|^p - |Y|^p >= p |Y|^{p-2} <X - Y, Y> over random pairs in dims 2..4.
long vector_inequality_check(double p, long trials, std::uint64_t seed);

struct CorrectedCheckResult {
  long violations = 0;
  int trials = 0;
  double min_margin_rel = 0.0;
};

// Non-mean-convex corrected inequality on random bumps:
//   int |grad f|^p + ((p-1)/p)^{p-1} |H0| int |f|^p/d^{p-1}
//     >= ((p-1)/p)^p int |f|^p/d^p  (within quadrature tolerance).
// Throws ConfigurationError when H0 >= 0 (plain sharp inequality applies).
CorrectedCheckResult corrected_inequality_check(const Domain& dom,
                                                const DistanceField& f,
                                                double p, int trials,
                                                std::uint64_t seed, double H0);

// Hardy-Sobolev-Maz'ya quotient
//   (int |grad f|^p - ((p-1)/p)^p int |f/d|^p)
//     / (int d^{-q + d_amb (q-p)/p} |f|^q)^{p/q},
// with the exponent window 2 <= p < d_amb, p < q <= p d_amb/(d_amb - p) read
// in the ambient dimension (flagged in the report). Evidence of positivity
// only; never a sharp-constant claim.
QuotientReport hardy_sobolev_quotient(const Domain& dom,
                                      const DistanceField& field,
                                      const TrialFunction& f, double p,
                                      double q);

// Closed-form radial version of the ball case (any ambient dimension
// d >= 3): boundary-layer trial min(R - t, cutoff)^{(p-1)/p + eps}
// integrated exactly against the t^{d-1} weight. Every integrand is a real
// power of R - t times a polynomial in t, so the binomial expansion gives
// the integrals exactly; no quadrature grid is involved.
double hs_quotient_radial_ball(double R, int d, double p, double q, double eps,
                               double cutoff);

}  // namespace hardygeo
