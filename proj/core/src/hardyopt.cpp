#include "hardygeo/hardyopt.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hardygeo/config.hpp"
#include "hardygeo/parallel.hpp"

namespace hardygeo {
namespace {

constexpr double kPi = std::numbers::pi;
using SpMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

double sq(double v) { return v * v; }

int resolution_of(const Domain& dom, const Grid& grid) {
  Vec lo, hi;
  dom.bounding_box(lo, hi);
  double L = 0.0;
  for (int a = 0; a < grid.ndim; ++a) L = std::max(L, hi[a] - lo[a]);
  return (int)std::lround(L / grid.h);
}

double cell_volume_pos(const Grid& grid, std::size_t idx) {
  return std::max(grid.cell_volume(idx), 0.0);
}

// Face-centered weight of the face of `idx` on axis `a` in direction `dir`.
// On cylindrical slices the s-face carries its own radius, which keeps the
// axis weight non-negative and the assembled forms symmetric.
double face_weight(const Grid& grid, std::size_t idx, int axis, int dir) {
  const double base = std::pow(grid.h, grid.ndim - 2);
  if (grid.measure != Measure::kCylindrical) return base;
  const double s =
      grid.center(idx)[0] + (axis == 0 ? 0.5 * grid.h * dir : 0.0);
  return base * 2.0 * kPi * std::max(s, 0.0);
}

double edge_weight(const Grid& grid, std::size_t idx, int axis) {
  return face_weight(grid, idx, axis, +1);
}

// Equation layout of the transformed forms. Cut cells closer than h/2 to the
// boundary carry O(h) mass against O(1) energy and make refinement
// non-monotone, so they are dropped from the unknowns; their distance values
// still enter the stencils of their neighbors.
struct HardyForms {
  SpMat C;            // transformed Hardy form (energy minus 1/4 Hardy term)
  Vector B;           // vol / delta mass (mu against this)
  Vector D;           // vol * delta mass (Brezis-Marcus against this)
  Vector phi;         // sqrt(delta) per equation
  std::vector<std::size_t> cells;  // equation -> grid index
  std::vector<long> eq;            // grid index -> equation or -1
};

bool transform_dof(const DistanceField& f, std::size_t idx) {
  return f.usable(idx) && f.delta[idx] >= (0.5 - 1e-9) * f.grid.h &&
         f.grid.cell_volume(idx) > 0.0;
}

// Ground-state form in the layer variables g = f / sqrt(delta):
//   C(g) = sum_faces w sqrt(d_i d_j) (g_i - g_j)^2 + sum_i vol_i pot_i g_i^2,
// where the potential is half the distributional -Delta delta: the curvature
// formula where it is valid, plus the singular ridge share recovered as the
// positive excess of the discrete Laplacian of delta over the formula. The
// discrete Laplacian of delta is benign everywhere (piecewise-smooth field
// with unit gradient); its upwind values at non-unknown neighbors come from
// the signed closed form, or from linear continuation along the stored
// gradient for implicit domains. Without a Laplacian field the potential is
// the clipped discrete value alone.
HardyForms assemble_hardy_forms(const Domain* dom, const DistanceField& f,
                                const LaplacianField* lap) {
  const Grid& grid = f.grid;
  HardyForms forms;
  forms.eq.assign(grid.size(), -1);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!transform_dof(f, idx)) continue;
    forms.eq[idx] = (long)forms.cells.size();
    forms.cells.push_back(idx);
  }
  const long m = (long)forms.cells.size();
  if (m == 0)
    throw ConfigurationError("hardy forms: no interior cells half a cell off the boundary");

  // Signed distance one cell off `from` along (axis, dir).
  auto ghost_delta = [&](std::size_t from, int axis, int dir) {
    if (dom && dom->analytic()) {
      Vec x = grid.center(from);
      x[axis] += dir * grid.h;
      return dom->exact_delta(x);
    }
    return f.delta[from] - grid.h * std::fabs(f.grad[axis][from]);
  };

  Vector fd = Vector::Zero(m);  // sum_faces w (delta_i - delta_j)
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve((std::size_t)m * (2 * grid.ndim + 1));
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    int c0[3];
    grid.coords(idx, c0[0], c0[1], c0[2]);
    const long ei = forms.eq[idx];
    for (int a = 0; a < grid.ndim; ++a) {
      if (ei >= 0 && c0[a] == 0) {
        const double w = face_weight(grid, idx, a, -1);
        if (w > 0.0) fd[ei] += w * (f.delta[idx] - ghost_delta(idx, a, -1));
      }
      int c[3] = {c0[0], c0[1], c0[2]};
      c[a] += 1;
      const bool nb_ok = grid.in_bounds(c[0], c[1], c[2]);
      const std::size_t nb = nb_ok ? grid.index(c[0], c[1], c[2]) : 0;
      const long ej = nb_ok ? forms.eq[nb] : -1;
      if (ei < 0 && ej < 0) continue;
      const double w = face_weight(grid, idx, a, +1);
      if (w <= 0.0) continue;
      if (ei >= 0) {
        const double dj = (nb_ok && f.usable(nb)) ? f.delta[nb]
                                                  : ghost_delta(idx, a, +1);
        fd[ei] += w * (f.delta[idx] - dj);
      }
      if (ej >= 0) {
        const double di =
            f.usable(idx) ? f.delta[idx] : ghost_delta(nb, a, -1);
        fd[ej] += w * (f.delta[nb] - di);
      }
      if (ei >= 0 && ej >= 0) {
        const double gw = w * std::sqrt(f.delta[idx] * f.delta[nb]);
        trips.emplace_back(ei, ei, gw);
        trips.emplace_back(ej, ej, gw);
        trips.emplace_back(ei, ej, -gw);
        trips.emplace_back(ej, ei, -gw);
      }
    }
  }

  forms.B.resize(m);
  forms.D.resize(m);
  forms.phi.resize(m);
  for (long e = 0; e < m; ++e) {
    const std::size_t idx = forms.cells[e];
    const double vol = cell_volume_pos(grid, idx);
    const double d = f.delta[idx];
    const double fdl = fd[e] / vol;  // discrete -Delta delta
    double pot;
    if (lap && lap->good[idx]) {
      const double F = lap->neg_lap_formula[idx];
      pot = 0.5 * F + 0.5 * std::max(0.0, fdl - F);
    } else {
      pot = 0.5 * std::max(0.0, fdl);
    }
    trips.emplace_back(e, e, vol * pot);
    forms.B[e] = vol / d;
    forms.D[e] = vol * d;
    forms.phi[e] = std::sqrt(d);
  }
  forms.C.resize(m, m);
  forms.C.setFromTriplets(trips.begin(), trips.end());
  return forms;
}

struct EigenPairResult {
  double value = 0.0;
  Vector vec;
  int iterations = 0;
  std::vector<double> history;
  bool unconverged = false;
};

// Smallest eigenvalue of A x = lambda diag(mass) x (A symmetric, mass > 0):
// plain inverse power warm-up, then inverse iteration with cautious Rayleigh
// shifts (never above shift_cap). An indefinite A is handled by probing the
// shift downward until A - sigma diag(mass) is positive definite, which
// certifies sigma below the whole spectrum. Sequential and deterministic.
EigenPairResult smallest_eigenpair(const SpMat& A, const Vector& mass,
                                   Vector x, int max_iter, double tol,
                                   double shift_cap) {
  EigenPairResult out;
  const auto bnorm = [&](const Vector& v) {
    return std::sqrt(v.dot(mass.cwiseProduct(v)));
  };
  x /= std::max(bnorm(x), 1e-300);

  // A rejected shift must not clobber the live factorization, so candidates
  // are vetted on a scratch solver first.
  Eigen::SimplicialLDLT<SpMat> solver;
  auto factor_pd = [&](double s) {
    SpMat shifted = A;
    if (s != 0.0)
      for (long r = 0; r < shifted.rows(); ++r)
        shifted.coeffRef(r, r) -= s * mass[r];
    Eigen::SimplicialLDLT<SpMat> trial;
    trial.compute(shifted);
    if (trial.info() != Eigen::Success) return false;
    const Vector dvec = trial.vectorD();
    for (long r = 0; r < dvec.size(); ++r)
      if (!(dvec[r] > 0.0)) return false;
    solver.compute(shifted);
    return true;
  };
  auto rayleigh = [&](const Vector& v) {
    return v.dot(A * v) / v.dot(mass.cwiseProduct(v));
  };

  double sigma = 0.0;
  if (!factor_pd(0.0)) {
    const double rho0 = rayleigh(x);
    double drop = std::max(1.0, std::fabs(rho0));
    bool ok = false;
    for (int k = 0; k < 60 && !ok; ++k, drop *= 4.0)
      ok = factor_pd(sigma = rho0 - drop);
    if (!ok)
      throw InvariantViolation("eigensolver: form unbounded below at the grid scale");
  }

  double rho = rayleigh(x), prev = rho;
  int streak = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = solver.solve(mass.cwiseProduct(x));
    if (!y.allFinite()) {
      out.unconverged = true;
      break;
    }
    const double n = bnorm(y);
    if (!(n > 0.0)) {
      out.unconverged = true;
      break;
    }
    x = y / n;
    prev = rho;
    rho = rayleigh(x);
    out.history.push_back(rho);
    out.iterations = it + 1;
    const double change = std::fabs(rho - prev);
    if (change <= tol * std::max(1.0, std::fabs(rho))) {
      if (++streak >= 3) break;
    } else {
      streak = 0;
    }
    if (it >= 20 && it % 12 == 0) {
      double cand = rho - std::max(4.0 * change, 1e-7 * std::max(1.0, std::fabs(rho)));
      cand = std::min(cand, shift_cap);
      // Only positive-definite shifts are accepted, so the iteration always
      // runs below the target eigenvalue; otherwise the candidate is pulled
      // back toward the last accepted shift.
      for (int attempt = 0; attempt < 5; ++attempt) {
        if (!(cand > sigma + 1e-12 * std::max(1.0, std::fabs(rho)))) break;
        if (factor_pd(cand)) {
          sigma = cand;
          break;
        }
        cand = sigma + 0.5 * (cand - sigma);
      }
    }
  }
  if (out.iterations >= max_iter) out.unconverged = true;
  out.value = rho;
  out.vec = x;
  return out;
}

// Cell-centered forward-difference gradient magnitude squared; f = 0 outside.
double grad2_at(const Grid& grid, const std::vector<double>& v,
                std::size_t idx, int i, int j, int k) {
  double g2 = 0.0;
  for (int a = 0; a < grid.ndim; ++a) {
    int c[3] = {i, j, k};
    c[a] += 1;
    const double fn = grid.in_bounds(c[0], c[1], c[2]) ? v[grid.index(c[0], c[1], c[2])] : 0.0;
    const double d = (fn - v[idx]) / grid.h;
    g2 += d * d;
  }
  return g2;
}

double p_energy(const DistanceField& f, const std::vector<double>& v, double p) {
  const Grid& grid = f.grid;
  return parallel_sum(std::size_t(0), grid.size(), [&](std::size_t idx) {
    int i, j, k;
    grid.coords(idx, i, j, k);
    const double g2 = grad2_at(grid, v, idx, i, j, k);
    if (g2 == 0.0) return 0.0;
    return cell_volume_pos(grid, idx) * std::pow(g2, p / 2.0);
  });
}

double p_mass(const DistanceField& f, const std::vector<double>& v, double p,
              double delta_power) {
  const Grid& grid = f.grid;
  return parallel_sum(std::size_t(0), grid.size(), [&](std::size_t idx) {
    if (!f.usable(idx) || v[idx] == 0.0) return 0.0;
    return cell_volume_pos(grid, idx) * std::pow(std::fabs(v[idx]), p) /
           std::pow(f.delta[idx], delta_power);
  });
}

// Closed-form quadrature of the boundary-layer profile min(delta, c)^alpha:
// the quotient reduces to alpha^p W / (W + T) with W the near-boundary mass
// sum and T the capped far mass, both against the cell measure.
double profile_quotient(const TrialFunction& f, const DistanceField& field,
                        double p) {
  const Grid& grid = field.grid;
  const double alpha = (p - 1.0) / p + f.eps;
  const double W =
      parallel_sum(std::size_t(0), grid.size(), [&](std::size_t idx) {
        if (!field.usable(idx) || field.delta[idx] >= f.cutoff) return 0.0;
        return cell_volume_pos(grid, idx) *
               std::pow(field.delta[idx], (alpha - 1.0) * p);
      });
  const double T =
      std::pow(f.cutoff, alpha * p) *
      parallel_sum(std::size_t(0), grid.size(), [&](std::size_t idx) {
        if (!field.usable(idx) || field.delta[idx] < f.cutoff) return 0.0;
        return cell_volume_pos(grid, idx) * std::pow(field.delta[idx], -p);
      });
  if (!(W + T > 0.0))
    throw ConfigurationError("rayleigh_quotient: trial function is identically zero");
  return std::pow(alpha, p) * W / (W + T);
}

// Transformed-form value of an eigen iterate. The domain is required: the
// ground-state form that produced the iterate uses the analytic ghost
// closure and the curvature potential, and the field-only fallback deviates
// at corner cells.
double transformed_quotient(const Domain& dom, const TrialFunction& f,
                            const DistanceField& field) {
  const LaplacianField lap = neg_laplacian_formula(dom, field);
  const HardyForms forms = assemble_hardy_forms(&dom, field, &lap);
  const long mdof = (long)forms.cells.size();
  Vector g(mdof);
  for (long e = 0; e < mdof; ++e)
    g[e] = f.values[forms.cells[e]] / forms.phi[e];
  const double den = g.dot(forms.B.cwiseProduct(g));
  if (!(den > 0.0))
    throw ConfigurationError("rayleigh_quotient: trial function is identically zero");
  return 0.25 + g.dot(forms.C * g) / den;
}

}  // namespace

double RemainderTable::max_entry() const {
  return std::max({lambda_BM, lambda_HHL, lambda_FMT, lambda_EL, lambda_AW,
                   lambda_paper});
}

TrialFunction boundary_layer_trial(const Domain& dom, const DistanceField& f,
                                   double eps, double cutoff, double p) {
  TrialFunction t;
  t.values.assign(f.grid.size(), 0.0);
  const double expo = (p - 1.0) / p + eps;
  const double h = f.grid.h;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    if (!f.usable(idx)) continue;
    double v = std::pow(std::min(f.delta[idx], cutoff), expo);
    if (dom.truncated()) {
      const double td = dom.truncation_distance(f.grid.center(idx));
      v *= std::clamp(td / (4.0 * h) - 0.5, 0.0, 1.0);
    }
    t.values[idx] = v;
  }
  t.description = "boundary_layer(eps=" + std::to_string(eps) +
                  ", cutoff=" + std::to_string(cutoff) + ")";
  t.kind = "boundary_layer";
  t.eps = eps;
  t.cutoff = cutoff;
  t.p = p;
  return t;
}

TrialFunction bump_trial(const DistanceField& f, const TestBump& b) {
  TrialFunction t;
  t.values.assign(f.grid.size(), 0.0);
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    if (!f.usable(idx)) continue;
    t.values[idx] = bump_value(b, f.grid.center(idx));
  }
  t.description = "random_bump";
  t.kind = "random_bump";
  return t;
}

TrialFunction trial_from_function(const DistanceField& f,
                                  const std::function<double(const Vec&)>& fn,
                                  const std::string& description) {
  TrialFunction t;
  t.values.assign(f.grid.size(), 0.0);
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    if (!f.usable(idx)) continue;
    t.values[idx] = fn(f.grid.center(idx));
  }
  t.description = description;
  t.kind = "custom";
  return t;
}

double rayleigh_quotient(const TrialFunction& f, const DistanceField& field,
                         double p) {
  const Grid& grid = field.grid;
  if (f.values.size() != grid.size())
    throw ConfigurationError("rayleigh_quotient: trial does not match the grid");
  if (f.kind == "boundary_layer" && f.cutoff > 0.0 &&
      std::fabs(f.p - p) < 1e-12)
    return profile_quotient(f, field, p);
  if (f.kind == "eigen_iterate" && p == 2.0)
    throw ConfigurationError(
        "rayleigh_quotient: eigen iterates need the domain overload");
  double num;
  if (p == 2.0) {
    num = parallel_sum(std::size_t(0), grid.size(), [&](std::size_t idx) {
      int i, j, k;
      grid.coords(idx, i, j, k);
      double acc = 0.0;
      for (int a = 0; a < grid.ndim; ++a) {
        int c[3] = {i, j, k};
        c[a] += 1;
        const double fn =
            grid.in_bounds(c[0], c[1], c[2]) ? f.values[grid.index(c[0], c[1], c[2])] : 0.0;
        const double df = fn - f.values[idx];
        acc += edge_weight(grid, idx, a) * df * df;
      }
      return acc;
    });
  } else {
    num = p_energy(field, f.values, p);
  }
  const double den = p_mass(field, f.values, p, p);
  if (den <= 0.0)
    throw ConfigurationError("rayleigh_quotient: trial function is identically zero");
  return num / den;
}

double rayleigh_quotient(const Domain& dom, const TrialFunction& f,
                         const DistanceField& field, double p) {
  if (f.kind == "eigen_iterate" && p == 2.0) {
    if (f.values.size() != field.grid.size())
      throw ConfigurationError("rayleigh_quotient: trial does not match the grid");
    return transformed_quotient(dom, f, field);
  }
  return rayleigh_quotient(f, field, p);
}

QuotientReport estimate_mu(const Domain& dom, const DistanceField& f, double p,
                           const SolverOptions& opts, TrialFunction* minimizer) {
  QuotientReport rep;
  rep.kind = "mu_p";
  rep.p = p;
  rep.seed = opts.seed;
  rep.grid_resolution = resolution_of(dom, f.grid);

  if (p == 2.0) {
    const LaplacianField lap = neg_laplacian_formula(dom, f);
    const HardyForms forms = assemble_hardy_forms(&dom, f, &lap);
    const Vector x0 = Vector::Ones((long)forms.cells.size());
    EigenPairResult r =
        smallest_eigenpair(forms.C, forms.B, x0, opts.max_iter, opts.tol,
                           std::numeric_limits<double>::infinity());
    rep.value = 0.25 + r.value;
    rep.iterations = r.iterations;
    rep.history.reserve(r.history.size());
    for (double v : r.history) rep.history.push_back(0.25 + v);
    rep.unconverged = r.unconverged;
    if (r.unconverged) rep.flags.push_back("unconverged");
    if (minimizer) {
      minimizer->values.assign(f.grid.size(), 0.0);
      for (std::size_t e = 0; e < forms.cells.size(); ++e)
        minimizer->values[forms.cells[e]] = forms.phi[(long)e] * r.vec[(long)e];
      minimizer->description = "eigen_iterate";
      minimizer->kind = "eigen_iterate";
      minimizer->p = 2.0;
    }
    return rep;
  }

  // p != 2: the boundary-layer family delta^{(p-1)/p + eps} has quotient
  // exactly ((p-1)/p + eps)^p once the cutoff clears the inradius, so the
  // deterministic schedule halves eps until the decrement is below
  // tolerance. Upper bound only: the family approaches the sharp constant
  // from above but never certifies the infimum.
  rep.upper_bound_only = true;
  rep.flags.push_back("upper_bound_only");
  rep.flags.push_back("profile_family");
  double dmax = 0.0;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx)
    if (f.usable(idx)) dmax = std::max(dmax, f.delta[idx]);
  if (!(dmax > 0.0)) throw ConfigurationError("estimate_mu: no interior cells");
  const double cutoff = dmax * (1.0 + 1e-9);
  const double a0 = (p - 1.0) / p;
  double eps = 0.2;
  rep.history.push_back(std::pow(a0 + eps, p));
  int it = 1;
  while (it < opts.max_iter) {
    const double cur = std::pow(a0 + eps, p);
    eps *= 0.5;
    const double next = std::pow(a0 + eps, p);
    rep.history.push_back(next);
    ++it;
    if (cur - next <= opts.tol * std::max(1.0, next)) break;
  }
  rep.value = rep.history.back();
  rep.iterations = it;
  rep.unconverged = (it >= opts.max_iter);
  if (rep.unconverged) rep.flags.push_back("unconverged");
  if (minimizer) *minimizer = boundary_layer_trial(dom, f, eps, cutoff, p);
  return rep;
}

LambdaLowerBound lambda_lower_bound(const DistanceField& f,
                                    const LaplacianField& lap, double p,
                                    const ConvexityReport& conv) {
  if (!conv.weakly_mean_convex)
    throw ConfigurationError(
        "lambda_lower_bound requires a weakly mean convex domain");
  if (!(p > 1.0)) throw ConfigurationError("lambda_lower_bound requires p > 1");
  LambdaLowerBound out;
  double best = 1e300;
  std::size_t best_idx = 0;
  const Grid& grid = f.grid;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!lap.good[idx]) continue;
    const double d = f.delta[idx];
    const double val = lap.neg_lap_formula[idx] / std::pow(d, p - 1.0);
    if (val < best) {
      best = val;
      best_idx = idx;
    }
  }
  const double prefac = p == 2.0 ? 0.5 : std::pow((p - 1.0) / p, p - 1.0);
  out.value = prefac * best;
  out.argmin_delta = f.delta[best_idx];
  out.argmin_point = grid.center(best_idx);
  // n is recoverable from the report's own n; take it from the sample data.
  const int n = f.samples.empty() ? 1 : f.samples.front().n;
  const double H0 = std::max(conv.H0, 0.0);
  out.h0_reference = p / std::pow((double)n, p - 1.0) * std::pow(H0, p);
  out.contract_ok =
      out.value >= out.h0_reference - 1e-6 * std::max(1.0, out.h0_reference);
  return out;
}

AnalyticLambda analytic_lambda(const Domain& dom, int nsamples, int ndelta) {
  std::vector<BoundarySample> samples = dom.boundary_samples(nsamples);
  for (auto& s : samples) {
    if (!dom.fill_rho_bar(s))
      throw ConfigurationError(
          "analytic_lambda: no closed-form ridge distance for kind '" +
          dom.kind() + "'");
  }
  AnalyticLambda out;
  out.samples = (long)samples.size();
  std::vector<double> best(samples.size());
  std::vector<double> best_t(samples.size());
  parallel_for(std::size_t(0), samples.size(), [&](std::size_t si) {
    const BoundarySample& s = samples[si];
    double vmin = 1e300, tmin = 0.0;
    if (!(s.rho_bar > 0.0)) {
      // Degenerate ray: the inward normal leaves the domain immediately
      // (rim of a truncated kind). No distance values to sample.
      best[si] = vmin;
      best_t[si] = tmin;
      return;
    }
    const double rho = s.rho_bar * (1.0 - 1e-12);
    auto eval = [&](double t) {
      double sum = 0.0;
      for (int i = 0; i < s.n; ++i) sum += s.kappa[i] / (1.0 - t * s.kappa[i]);
      const double q = sum / (2.0 * t);
      if (std::isfinite(q) && q < vmin) {
        vmin = q;
        tmin = t;
      }
    };
    for (int j = 0; j < ndelta; ++j) eval(rho * (j + 0.5) / ndelta);
    for (int k = 1; k <= 64; ++k) eval(rho * std::pow(10.0, -k / 8.0));
    best[si] = vmin;
    best_t[si] = tmin;
  });
  double vmin = 1e300;
  std::size_t arg = 0;
  for (std::size_t si = 0; si < samples.size(); ++si) {
    if (best[si] < vmin) {
      vmin = best[si];
      arg = si;
    }
  }
  out.value = vmin;
  out.argmin_delta = best_t[arg];
  out.argmin_point = samples[arg].point;
  out.used_censored_ray = samples[arg].censored;
  return out;
}

QuotientReport estimate_bm_lambda(const Domain& dom, const DistanceField& f,
                                  const RemainderTable& table,
                                  const SolverOptions& opts) {
  QuotientReport rep;
  rep.kind = "bm_lambda";
  rep.p = 2.0;
  rep.seed = opts.seed;
  rep.grid_resolution = resolution_of(dom, f.grid);

  const LaplacianField lap = neg_laplacian_formula(dom, f);
  const HardyForms forms = assemble_hardy_forms(&dom, f, &lap);

  // Definiteness check: LDLT pivots of the transformed form. A negative
  // pivot certifies a direction with energy below the Hardy term (discrete
  // mu < 1/4), where no finite Brezis-Marcus constant exists.
  {
    Eigen::SimplicialLDLT<SpMat> chol;
    chol.compute(forms.C);
    bool indefinite = (chol.info() != Eigen::Success);
    if (!indefinite) {
      const Vector dvec = chol.vectorD();
      for (long e = 0; e < dvec.size(); ++e)
        if (!(dvec[e] > 0.0)) indefinite = true;
    }
    if (indefinite) {
      rep.breakdown = true;
      rep.flags.push_back("indefinite_form");
      rep.value = 0.0;
      return rep;
    }
  }

  const double cap = 0.99 * table.max_entry();
  const Vector x0 = Vector::Ones((long)forms.cells.size());
  EigenPairResult r =
      smallest_eigenpair(forms.C, forms.D, x0, opts.max_iter, opts.tol, cap);
  rep.value = r.value;
  rep.iterations = r.iterations;
  rep.history = std::move(r.history);
  rep.unconverged = r.unconverged;
  if (r.unconverged) rep.flags.push_back("unconverged");
  return rep;
}

RemainderTable remainder_table(const Domain& dom, const DistanceField& f,
                               const LaplacianField& lap) {
  RemainderTable t;
  t.n = dom.n_curv();
  t.truncation_dependent = dom.truncated();

  t.diam = dom.diameter();
  if (t.diam < 0.0) {
    const std::vector<BoundarySample>& s =
        f.samples.empty() ? dom.boundary_samples(2048) : f.samples;
    const std::size_t stride = std::max<std::size_t>(1, s.size() / 2048);
    double d2 = 0.0;
    for (std::size_t i = 0; i < s.size(); i += stride)
      for (std::size_t j = i + 1; j < s.size(); j += stride)
        d2 = std::max(d2, dot(s[i].point - s[j].point, s[i].point - s[j].point));
    t.diam = std::sqrt(d2);
  }
  t.volume = dom.volume();
  if (t.volume < 0.0) {
    double v = 0.0;
    for (std::size_t idx = 0; idx < f.grid.size(); ++idx)
      if (f.usable(idx)) v += cell_volume_pos(f.grid, idx);
    t.volume = v;
  }
  t.R_int = dom.interior_radius();
  if (t.R_int < 0.0) {
    double r = 0.0;
    for (std::size_t idx = 0; idx < f.grid.size(); ++idx)
      if (f.usable(idx)) r = std::max(r, f.delta[idx]);
    t.R_int = r;
  }

  const double np1 = t.n + 1;
  t.sphere_measure = 2.0 * std::pow(kPi, np1 / 2.0) / std::tgamma(np1 / 2.0);
  const double cn = std::pow(np1, (t.n - 1) / np1) *
                    std::pow(t.sphere_measure, 2.0 / np1) / 4.0;
  t.lambda_BM = 1.0 / (4.0 * t.diam * t.diam);
  t.lambda_HHL = cn / std::pow(t.volume, 2.0 / np1);
  t.lambda_EL = 6.0 * t.lambda_HHL;
  t.lambda_FMT = 0.75 / sq(t.R_int);
  const double j0 = 0.940;  // first positive Bessel-type root, as cited
  t.lambda_AW = sq(j0) / sq(t.R_int);

  bool closed_ridge = false;
  if (dom.analytic()) {
    std::vector<BoundarySample> probe = dom.boundary_samples(16);
    if (!probe.empty()) closed_ridge = dom.fill_rho_bar(probe.front());
  }
  if (closed_ridge) {
    t.lambda_paper = analytic_lambda(dom, 2048, 8192).value;
  } else {
    double best = 1e300;
    for (std::size_t idx = 0; idx < f.grid.size(); ++idx)
      if (lap.good[idx])
        best = std::min(best,
                        lap.neg_lap_formula[idx] / (2.0 * f.delta[idx]));
    t.lambda_paper = best;
  }
  return t;
}

IdentityCheckResult identity_check_L2(const TrialFunction& f,
                                      const DistanceField& field) {
  const Grid& grid = field.grid;
  if (f.values.size() != grid.size())
    throw ConfigurationError("identity_check_L2: trial does not match the grid");
  const std::size_t N = grid.size();

  // Composite cell fields; zero wherever the trial vanishes.
  std::vector<double> gfield(N, 0.0);
  std::vector<Vec> w(N, Vec{0, 0, 0});
  for (std::size_t idx = 0; idx < N; ++idx) {
    if (!field.usable(idx) || f.values[idx] == 0.0) continue;
    const double d = field.delta[idx];
    gfield[idx] = sq(f.values[idx]) / (2.0 * d);
    const Vec gd{field.grad[0][idx], field.grad[1][idx], field.grad[2][idx]};
    w[idx] = (f.values[idx] / (2.0 * d)) * gd;
  }

  auto fwd = [&](const std::vector<double>& v, std::size_t idx, int i, int j,
                 int k, Vec& out) {
    for (int a = 0; a < grid.ndim; ++a) {
      int c[3] = {i, j, k};
      c[a] += 1;
      const double fn = grid.in_bounds(c[0], c[1], c[2]) ? v[grid.index(c[0], c[1], c[2])] : 0.0;
      out[a] = (fn - v[idx]) / grid.h;
    }
  };

  double energy = 0.0, lhs = 0.0, rhs = 0.0;
  for (std::size_t idx = 0; idx < N; ++idx) {
    int i, j, k;
    grid.coords(idx, i, j, k);
    Vec gf{0, 0, 0}, gg{0, 0, 0};
    fwd(f.values, idx, i, j, k, gf);
    fwd(gfield, idx, i, j, k, gg);
    const double vol = cell_volume_pos(grid, idx);
    if (vol == 0.0) continue;
    const double e = dot(gf, gf);
    energy += vol * e;
    double hardy = 0.0;
    if (field.usable(idx) && f.values[idx] != 0.0)
      hardy = 0.25 * sq(f.values[idx] / field.delta[idx]);
    lhs += vol * (e - hardy);
    const Vec diff = gf - w[idx];
    Vec gd{0, 0, 0};
    if (field.usable(idx))
      gd = Vec{field.grad[0][idx], field.grad[1][idx], field.grad[2][idx]};
    rhs += vol * (dot(diff, diff) + dot(gd, gg));
  }
  IdentityCheckResult r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.energy = energy;
  r.residual_rel = std::fabs(lhs - rhs) / std::max(energy, 1e-300);
  return r;
}

long vector_inequality_check(double p, long trials, std::uint64_t seed) {
  if (!(p > 1.0))
    throw ConfigurationError("vector_inequality_check requires p > 1");
  std::mt19937_64 rng(derive_seed(seed, "vecineq"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  long violations = 0;
  for (long t = 0; t < trials; ++t) {
    const int dim = 2 + (int)(t % 3);
    double X[4] = {0, 0, 0, 0}, Y[4] = {0, 0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      X[a] = gauss(rng);
      Y[a] = gauss(rng);
    }
    double nx2 = 0.0, ny2 = 0.0, dxy = 0.0;
    for (int a = 0; a < dim; ++a) {
      nx2 += X[a] * X[a];
      ny2 += Y[a] * Y[a];
      dxy += (X[a] - Y[a]) * Y[a];
    }
    const double nx = std::sqrt(nx2), ny = std::sqrt(ny2);
    const double lhs = std::pow(nx, p) - std::pow(ny, p);
    const double rhs = ny > 1e-300 ? p * std::pow(ny, p - 2.0) * dxy : 0.0;
    const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
    if (lhs - rhs < -1e-12 * scale) ++violations;
  }
  return violations;
}

CorrectedCheckResult corrected_inequality_check(const Domain& dom,
                                                const DistanceField& f,
                                                double p, int trials,
                                                std::uint64_t seed, double H0) {
  if (H0 >= 0.0)
    throw ConfigurationError(
        "corrected_inequality_check requires H0 < 0; the sharp inequality "
        "applies as stated on weakly mean convex domains");
  if (!(p > 1.0))
    throw ConfigurationError("corrected_inequality_check requires p > 1");
  CorrectedCheckResult out;
  out.trials = trials;
  const double c1 = std::pow((p - 1.0) / p, p - 1.0) * std::fabs(H0);
  const double c2 = std::pow((p - 1.0) / p, p);
  double min_margin = 1e300;
  const std::vector<TestBump> bumps =
      random_bumps(dom, f, trials, derive_seed(seed, "corrected"));
  for (const TestBump& b : bumps) {
    const TrialFunction t = bump_trial(f, b);
    const double grad_term = p_energy(f, t.values, p);
    const double low_term = c1 * p_mass(f, t.values, p, p - 1.0);
    const double hardy = c2 * p_mass(f, t.values, p, p);
    const double scale = grad_term + low_term + hardy;
    const double margin = (grad_term + low_term - hardy) / std::max(scale, 1e-300);
    min_margin = std::min(min_margin, margin);
    if (margin < -1e-3) ++out.violations;
  }
  out.min_margin_rel = min_margin;
  return out;
}

QuotientReport hardy_sobolev_quotient(const Domain& dom,
                                      const DistanceField& field,
                                      const TrialFunction& f, double p,
                                      double q) {
  const int d = dom.ambient_dim();
  if (!(p >= 2.0) || !(p < (double)d))
    throw ConfigurationError(
        "hardy_sobolev_quotient requires 2 <= p < ambient dimension");
  const double qmax = p * d / (double)(d - p);
  if (!(q > p) || q > qmax + 1e-12)
    throw ConfigurationError(
        "hardy_sobolev_quotient requires p < q <= p*d/(d-p)");
  QuotientReport rep;
  rep.kind = "hs_quotient";
  rep.p = p;
  rep.q = q;
  rep.grid_resolution = resolution_of(dom, field.grid);
  rep.flags.push_back("ambient_dimension_read");
  if (std::fabs(q - qmax) < 1e-9) rep.flags.push_back("critical_exponent");

  const double cp = std::pow((p - 1.0) / p, p);
  const double sigma = -q + d * (q - p) / p;
  double num;
  if (f.kind == "eigen_iterate" && p == 2.0) {
    const LaplacianField lap = neg_laplacian_formula(dom, field);
    const HardyForms forms = assemble_hardy_forms(&dom, field, &lap);
    Vector g((long)forms.cells.size());
    for (long e = 0; e < g.size(); ++e)
      g[e] = f.values[forms.cells[e]] / forms.phi[e];
    num = g.dot(forms.C * g);
  } else if (f.kind == "boundary_layer" && f.cutoff > 0.0 &&
             std::fabs(f.p - p) < 1e-12 && !dom.truncated()) {
    const double alpha = (p - 1.0) / p + f.eps;
    const Grid& grid = field.grid;
    const double grad_term =
        parallel_sum(std::size_t(0), grid.size(), [&](std::size_t idx) {
          if (!field.usable(idx) || field.delta[idx] >= f.cutoff) return 0.0;
          return cell_volume_pos(grid, idx) *
                 std::pow(alpha * std::pow(field.delta[idx], alpha - 1.0), p);
        });
    num = grad_term - cp * p_mass(field, f.values, p, p);
  } else {
    num = p_energy(field, f.values, p) - cp * p_mass(field, f.values, p, p);
  }
  const double den_int = p_mass(field, f.values, q, -sigma);
  if (den_int <= 0.0)
    throw ConfigurationError("hardy_sobolev_quotient: trial is identically zero");
  rep.value = num / std::pow(den_int, p / q);
  return rep;
}

double hs_quotient_radial_ball(double R, int d, double p, double q, double eps,
                               double cutoff) {
  if (!(p >= 2.0) || !(p < (double)d) || !(q > p) ||
      q > p * d / (double)(d - p) + 1e-12)
    throw ConfigurationError("hs_quotient_radial_ball: exponents out of range");
  if (!(eps > 0.0) || !(cutoff > 0.0) || !(R > 0.0))
    throw ConfigurationError(
        "hs_quotient_radial_ball: R, eps, cutoff must be positive");
  const double alpha = (p - 1.0) / p + eps;
  const double cp = std::pow((p - 1.0) / p, p);
  const double sigma = -q + d * (q - p) / p;
  const double c = std::min(cutoff, R);
  const double S = 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
  // J(a, lo, hi) = int over delta in [lo, hi] of delta^a (R - delta)^(d-1),
  // the radial weight rewritten in the distance variable. Binomial expansion
  // of (R - delta)^(d-1) turns every term into an exact power integral; the
  // layer exponents satisfy a > -1 whenever eps > 0, so lo = 0 is safe.
  const auto J = [&](double a, double lo, double hi) {
    double sum = 0.0, binom = 1.0;
    for (int k = 0; k < d; ++k) {
      const double b = a + (double)k + 1.0;
      const double term = (lo > 0.0 && std::fabs(b) < 1e-12)
                              ? std::log(hi / lo)
                              : (std::pow(hi, b) - std::pow(lo, b)) / b;
      sum += binom * std::pow(R, (double)(d - 1 - k)) * (k % 2 ? -term : term);
      binom *= (double)(d - 1 - k) / (double)(k + 1);
    }
    return sum;
  };
  const double layer = J((alpha - 1.0) * p, 0.0, c);
  const double I_grad = std::pow(alpha, p) * layer;
  const double I_hardy = layer + std::pow(c, alpha * p) * J(-p, c, R);
  const double I_den =
      J(sigma + alpha * q, 0.0, c) + std::pow(c, alpha * q) * J(sigma, c, R);
  const double num = S * (I_grad - cp * I_hardy);
  return num / std::pow(S * I_den, p / q);
}

}  // namespace hardygeo
