#include "hardygeo/deltacalc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hardygeo/config.hpp"
#include "hardygeo/parallel.hpp"

namespace hardygeo {
namespace {

// Bound denominator guard: n - delta H crosses machine zero only within a
// cell or two of the ridge; keep the sign, avoid the exact pole.
double safe_den(double d) {
  const double eps = 1e-14;
  if (std::fabs(d) < eps) return d < 0.0 ? -eps : eps;
  return d;
}

}  // namespace

LaplacianField neg_laplacian_formula(const Domain& dom, const DistanceField& f) {
  const Grid& grid = f.grid;
  const std::size_t N = grid.size();
  LaplacianField lap;
  lap.neg_lap_formula.assign(N, 0.0);
  lap.neg_lap_fd.assign(N, 0.0);
  lap.bound_field.assign(N, 0.0);
  lap.good.assign(N, 0);
  lap.fd_valid.assign(N, 0);

  std::vector<std::size_t> ids;
  for (std::size_t idx = 0; idx < N; ++idx) {
    if (!f.usable(idx)) continue;
    if (!f.singular[idx]) lap.good[idx] = 1;
    ids.push_back(idx);
  }

  const int ncurv = dom.n_curv();
  std::vector<std::uint8_t> inconsistent_mask(N, 0);
  parallel_for(std::size_t(0), ids.size(), [&](std::size_t t) {
    const std::size_t idx = ids[t];
    const double d = f.delta[idx];
    std::array<double, 2> kap{};
    dom.curvature_at(f.nearest[idx], kap);
    double sum = 0.0, H = 0.0;
    bool bad = false;
    for (int i = 0; i < ncurv; ++i) {
      const double den = 1.0 - d * kap[i];
      if (den <= 0.0) bad = true;
      sum += kap[i] / safe_den(den);
      H += kap[i];
    }
    lap.neg_lap_formula[idx] = sum;
    lap.bound_field[idx] = ncurv * H / safe_den(ncurv - d * H);
    if (bad && lap.good[idx]) inconsistent_mask[idx] = 1;
  });

  long good_count = 0, inconsistent = 0;
  double inf_formula = 1e300;
  for (std::size_t idx : ids) {
    if (!lap.good[idx]) continue;
    ++good_count;
    if (inconsistent_mask[idx]) {
      ++inconsistent;
      continue;  // misclassified singular cell; keep it out of the infimum
    }
    inf_formula = std::min(inf_formula, lap.neg_lap_formula[idx]);
  }
  lap.good_count = good_count;
  lap.inconsistent = inconsistent;
  lap.inf_formula = inf_formula;
  if (good_count > 0 && inconsistent > good_count / 1000) {
    throw InvariantViolation(
        "neg_laplacian_formula: " + std::to_string(inconsistent) +
        " inconsistent cells (1 - delta kappa <= 0 off S) out of " +
        std::to_string(good_count) + " good cells exceeds the 0.1% budget");
  }

  // Stencil validity: good cells >= 3 cells from both S and the boundary
  // (and off the symmetry axis of cylindrical slices, where a mirrored
  // neighbor would be needed).
  std::vector<std::uint8_t> nearS = f.singular;
  for (int round = 0; round < 3; ++round) {
    std::vector<std::uint8_t> next = nearS;
    for (std::size_t idx = 0; idx < N; ++idx) {
      if (nearS[idx]) continue;
      int i, j, k;
      grid.coords(idx, i, j, k);
      for (int a = 0; a < grid.ndim; ++a) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          int c[3] = {i, j, k};
          c[a] += sgn;
          if (grid.in_bounds(c[0], c[1], c[2]) &&
              nearS[grid.index(c[0], c[1], c[2])]) {
            next[idx] = 1;
          }
        }
      }
    }
    nearS.swap(next);
  }
  const double h = grid.h;
  for (std::size_t idx : ids) {
    if (!lap.good[idx] || nearS[idx] || f.near_boundary[idx]) continue;
    if (grid.measure == Measure::kCylindrical &&
        grid.center(idx)[0] < 1.5 * h)
      continue;
    int i, j, k;
    grid.coords(idx, i, j, k);
    bool ok = true;
    for (int a = 0; a < grid.ndim && ok; ++a) {
      for (int sgn = -1; sgn <= 1 && ok; sgn += 2) {
        int c[3] = {i, j, k};
        c[a] += sgn;
        ok = grid.in_bounds(c[0], c[1], c[2]) &&
             f.usable(grid.index(c[0], c[1], c[2]));
      }
    }
    if (ok) lap.fd_valid[idx] = 1;
  }

  double max_rel = 0.0;
  for (std::size_t idx : ids) {
    if (!lap.fd_valid[idx]) continue;
    int i, j, k;
    grid.coords(idx, i, j, k);
    double lap_delta = 0.0;
    for (int a = 0; a < grid.ndim; ++a) {
      int cp[3] = {i, j, k}, cm[3] = {i, j, k};
      cp[a] += 1;
      cm[a] -= 1;
      const double vp = f.delta[grid.index(cp[0], cp[1], cp[2])];
      const double vm = f.delta[grid.index(cm[0], cm[1], cm[2])];
      lap_delta += (vp - 2.0 * f.delta[idx] + vm) / (h * h);
      if (a == 0 && grid.measure == Measure::kCylindrical)
        lap_delta += (vp - vm) / (2.0 * h) / grid.center(idx)[0];
    }
    lap.neg_lap_fd[idx] = -lap_delta;
    const double rel = std::fabs(lap.neg_lap_formula[idx] - lap.neg_lap_fd[idx]) /
                       std::max(1.0, std::fabs(lap.neg_lap_formula[idx]));
    max_rel = std::max(max_rel, rel);
  }
  lap.max_rel_mismatch = max_rel;
  return lap;
}

double bump_value(const TestBump& b, const Vec& x) {
  const double t = dot(x - b.center, x - b.center) / (b.rad * b.rad);
  if (t >= 1.0) return 0.0;
  return b.amp * std::exp(1.0 - 1.0 / (1.0 - t));
}

Vec bump_grad(const TestBump& b, const Vec& x) {
  const Vec d = x - b.center;
  const double t = dot(d, d) / (b.rad * b.rad);
  if (t >= 1.0) return {0, 0, 0};
  const double v = b.amp * std::exp(1.0 - 1.0 / (1.0 - t));
  const double dv_dt = -v / ((1.0 - t) * (1.0 - t));
  return (dv_dt * 2.0 / (b.rad * b.rad)) * d;
}

std::vector<TestBump> random_bumps(const Domain& dom, const DistanceField& f,
                                   int count, std::uint64_t seed,
                                   int min_rad_cells) {
  const Grid& grid = f.grid;
  const double h = grid.h;
  const double floor = min_rad_cells * h;
  std::vector<std::size_t> inside_cells;
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
    if (f.usable(idx)) inside_cells.push_back(idx);
  if (inside_cells.empty())
    throw ConfigurationError("random_bumps: no interior cells");

  std::mt19937_64 rng(derive_seed(seed, "bumps"));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<TestBump> out;
  out.reserve(count);
  int guard = 0;
  while ((int)out.size() < count && guard < 100000) {
    ++guard;
    const std::size_t idx =
        inside_cells[(std::size_t)(u01(rng) * (double)inside_cells.size()) %
                     inside_cells.size()];
    const Vec c = grid.center(idx);
    const double room =
        std::min(f.delta[idx], dom.truncated()
                                   ? dom.truncation_distance(c)
                                   : 1e300) -
        2.0 * h;
    if (room < floor) continue;
    TestBump b;
    b.center = c;
    b.rad = floor + u01(rng) * (0.8 * room - floor);
    if (b.rad < floor || b.rad > room) continue;
    b.amp = 0.5 + 1.5 * u01(rng);
    out.push_back(b);
  }
  if ((int)out.size() < count)
    throw ConfigurationError(
        "random_bumps: domain too thin to place requested bumps at this "
        "resolution");
  return out;
}

DistributionalResult distributional_check(const Domain& dom,
                                          const DistanceField& f,
                                          const LaplacianField& lap,
                                          const TestBump& phi) {
  const Grid& grid = f.grid;
  const double h = grid.h;

  // Support must stay strictly inside and clear of truncation faces.
  if (dom.truncated() &&
      dom.truncation_distance(phi.center) <= phi.rad + 0.5 * h)
    throw ConfigurationError(
        "distributional_check: bump support touches a truncation face");
  {
    std::size_t cidx;
    if (!grid.locate(phi.center, cidx) || !f.usable(cidx) ||
        f.delta[cidx] <= phi.rad)
      throw ConfigurationError(
          "distributional_check: bump support is not strictly inside the "
          "domain");
  }

  // Cells overlapping the support.
  std::vector<std::size_t> cells;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!f.usable(idx)) continue;
    if (norm(grid.center(idx) - phi.center) < phi.rad + h) cells.push_back(idx);
  }

  DistributionalResult r;
  r.max_phi = phi.amp;
  r.lhs = parallel_sum(std::size_t(0), cells.size(), [&](std::size_t t) {
    const std::size_t idx = cells[t];
    const Vec g{f.grad[0][idx], f.grad[1][idx], f.grad[2][idx]};
    return dot(g, bump_grad(phi, grid.center(idx))) * grid.cell_volume(idx);
  });
  r.rhs = parallel_sum(std::size_t(0), cells.size(), [&](std::size_t t) {
    const std::size_t idx = cells[t];
    return lap.bound_field[idx] * bump_value(phi, grid.center(idx)) *
           grid.cell_volume(idx);
  });
  r.residual = r.lhs - r.rhs;

  // Midpoint error bound from the discrete Lipschitz constants of both
  // integrands over the support.
  double lip = 0.0, meas = 0.0;
  for (std::size_t idx : cells) {
    meas += grid.cell_volume(idx);
    int i, j, k;
    grid.coords(idx, i, j, k);
    const Vec gc{f.grad[0][idx], f.grad[1][idx], f.grad[2][idx]};
    const double i1 = dot(gc, bump_grad(phi, grid.center(idx)));
    const double i2 = lap.bound_field[idx] * bump_value(phi, grid.center(idx));
    for (int a = 0; a < grid.ndim; ++a) {
      int c[3] = {i, j, k};
      c[a] += 1;
      if (!grid.in_bounds(c[0], c[1], c[2])) continue;
      const std::size_t nb = grid.index(c[0], c[1], c[2]);
      if (!f.usable(nb)) continue;
      const Vec gn{f.grad[0][nb], f.grad[1][nb], f.grad[2][nb]};
      const double j1 = dot(gn, bump_grad(phi, grid.center(nb)));
      const double j2 = lap.bound_field[nb] * bump_value(phi, grid.center(nb));
      lip = std::max({lip, std::fabs(i1 - j1) / h, std::fabs(i2 - j2) / h});
    }
  }
  r.eps_quad = 0.5 * h * meas * lip;
  return r;
}

InfEquivalenceResult inf_equivalence(const DistanceField& f,
                                     const LaplacianField& lap,
                                     const ConvexityReport& conv) {
  InfEquivalenceResult r;
  r.inf_neg_lap = lap.inf_formula;
  r.inf_H = conv.H0;
  r.gap = r.inf_neg_lap - r.inf_H;
  // Resolution-dependent tolerance: the infimum over good cells sits one
  // half-layer of cells away from the boundary where the formula differs
  // from H by O(delta * sum kappa^2).
  r.tol = std::max(0.05, 10.0 * f.grid.h);
  const bool lap_nonneg = r.inf_neg_lap >= -r.tol;
  const bool H_nonneg = conv.weakly_mean_convex;
  r.verdict_match = (lap_nonneg == H_nonneg);
  return r;
}

GrowthCheckResult growth_estimate_check(const Domain& dom,
                                        const DistanceField& f,
                                        const LaplacianField& lap, double p,
                                        double H0) {
  if (H0 < 0.0)
    throw ConfigurationError(
        "growth_estimate_check requires H0 >= 0 (weakly mean convex domain)");
  if (!(p > 1.0))
    throw ConfigurationError("growth_estimate_check requires p > 1");
  GrowthCheckResult r;
  r.p = p;
  r.H0 = H0;
  const int n = dom.n_curv();
  const double coeff = p * std::pow(H0, p) *
                       std::pow(p / (p - 1.0), p - 1.0) /
                       std::pow((double)n, p - 1.0);
  double min_margin = 1e300;
  long violations = 0;
  const Grid& grid = f.grid;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!lap.good[idx]) continue;
    const double rhs = coeff * std::pow(f.delta[idx], p - 1.0);
    const double margin = lap.neg_lap_formula[idx] - rhs;
    min_margin = std::min(min_margin, margin);
    const double scale = std::max({1.0, std::fabs(rhs),
                                   std::fabs(lap.neg_lap_formula[idx])});
    if (margin < -1e-9 * scale) ++violations;
  }
  r.violations = violations;
  r.min_margin = min_margin;
  return r;
}

}  // namespace hardygeo
