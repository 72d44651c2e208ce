#include "hardygeo/distfield.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "hardygeo/config.hpp"
#include "hardygeo/parallel.hpp"

namespace hardygeo {
namespace {

// Godunov update: solve sum_a max(u - m_a, 0)^2 = h^2 over the available
// per-axis neighbor minima, taken in ascending order.
double eikonal_update(double* m, int n, double h) {
  std::sort(m, m + n);
  double u = m[0] + h;
  for (int k = 1; k < n; ++k) {
    if (u <= m[k]) break;
    double s = 0.0, s2 = 0.0;
    for (int a = 0; a <= k; ++a) {
      s += m[a];
      s2 += m[a] * m[a];
    }
    const double nn = k + 1;
    const double disc = s * s - nn * (s2 - h * h);
    if (disc < 0.0) break;
    u = (s + std::sqrt(disc)) / nn;
  }
  return u;
}

struct BucketIndex {
  double b = 1.0;
  Vec lo{0, 0, 0};
  int ndim = 2;
  std::unordered_map<long long, std::vector<int>> cells;

  static long long key(int i, int j, int k) {
    return ((long long)(i + 1000000) << 42) ^ ((long long)(j + 1000000) << 21) ^
           (long long)(k + 1000000);
  }
  void build(const std::vector<BoundarySample>& samples, int nd) {
    ndim = nd;
    lo = samples[0].point;
    double avg = 0.0;
    for (const auto& s : samples) {
      for (int a = 0; a < 3; ++a) lo[a] = std::min(lo[a], s.point[a]);
      avg += s.spacing;
    }
    avg /= (double)samples.size();
    b = std::max(2.0 * avg, 1e-12);
    for (int si = 0; si < (int)samples.size(); ++si) {
      int c[3] = {0, 0, 0};
      for (int a = 0; a < ndim; ++a)
        c[a] = (int)std::floor((samples[si].point[a] - lo[a]) / b);
      cells[key(c[0], c[1], c[2])].push_back(si);
    }
  }
  int nearest(const std::vector<BoundarySample>& samples, const Vec& p) const {
    int c[3] = {0, 0, 0};
    for (int a = 0; a < ndim; ++a)
      c[a] = (int)std::floor((p[a] - lo[a]) / b);
    int best = -1;
    double best_d = 1e300;
    for (int ring = 0; ring < 64; ++ring) {
      const int r0 = ring;
      bool found_any = best >= 0;
      for (int di = -r0; di <= r0; ++di) {
        for (int dj = -r0; dj <= r0; ++dj) {
          const int kmax = ndim == 3 ? r0 : 0;
          for (int dk = -kmax; dk <= kmax; ++dk) {
            if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != r0)
              continue;  // shell only
            auto it = cells.find(key(c[0] + di, c[1] + dj, c[2] + dk));
            if (it == cells.end()) continue;
            for (int si : it->second) {
              const double d = norm(samples[si].point - p);
              if (d < best_d) {
                best_d = d;
                best = si;
              }
            }
          }
        }
      }
      // One extra shell after the first hit guarantees the true nearest.
      if (found_any) break;
    }
    if (best < 0) {
      for (int si = 0; si < (int)samples.size(); ++si) {
        const double d = norm(samples[si].point - p);
        if (d < best_d) {
          best_d = d;
          best = si;
        }
      }
    }
    return best;
  }
};

}  // namespace

DistanceField solve_eikonal(const Domain& dom, const Grid& grid) {
  DistanceField f;
  f.grid = grid;
  const std::size_t N = grid.size();
  f.delta_fsm.assign(N, kUnsolved);
  std::vector<std::uint8_t> seed(N, 0);
  const double h = grid.h;

  long inside_count = 0;
  if (dom.analytic()) {
    for (std::size_t idx = 0; idx < N; ++idx) {
      if (!grid.inside[idx]) continue;
      ++inside_count;
      const double d = dom.exact_delta(grid.center(idx));
      if (d <= 3.5 * h) {
        f.delta_fsm[idx] = std::max(d, 0.0);
        seed[idx] = 1;
      }
    }
  } else {
    // Layer 0: inside cells with an outside face-neighbor; grow two more
    // layers by BFS, then seed each band cell with its projected distance.
    std::vector<std::uint8_t> layer(N, 255);
    std::deque<std::size_t> queue;
    for (std::size_t idx = 0; idx < N; ++idx) {
      if (!grid.inside[idx]) continue;
      ++inside_count;
      int i, j, k;
      grid.coords(idx, i, j, k);
      bool edge = false;
      for (int a = 0; a < grid.ndim && !edge; ++a) {
        for (int sgn = -1; sgn <= 1 && !edge; sgn += 2) {
          int c[3] = {i, j, k};
          c[a] += sgn;
          if (!grid.in_bounds(c[0], c[1], c[2]) ||
              !grid.inside[grid.index(c[0], c[1], c[2])])
            edge = true;
        }
      }
      if (edge) {
        layer[idx] = 0;
        queue.push_back(idx);
      }
    }
    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      if (layer[idx] >= 2) continue;
      int i, j, k;
      grid.coords(idx, i, j, k);
      for (int a = 0; a < grid.ndim; ++a) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          int c[3] = {i, j, k};
          c[a] += sgn;
          if (!grid.in_bounds(c[0], c[1], c[2])) continue;
          const std::size_t nb = grid.index(c[0], c[1], c[2]);
          if (!grid.inside[nb] || layer[nb] != 255) continue;
          layer[nb] = layer[idx] + 1;
          queue.push_back(nb);
        }
      }
    }
    for (std::size_t idx = 0; idx < N; ++idx) {
      if (layer[idx] > 2) continue;
      const Vec x = grid.center(idx);
      const Vec y = dom.nearest_boundary(x);
      double d = norm(x - y);
      if (!(d >= 0.0) || d > 6.0 * h) d = (layer[idx] + 0.5) * h;
      f.delta_fsm[idx] = d;
      seed[idx] = 1;
    }
  }
  f.inside_count = inside_count;

  // Sweeps in all 2^ndim axis orientations until stationary. Sequential by
  // construction, so results do not depend on the worker thread count.
  const int ndim = grid.ndim;
  const int nsweeps = 1 << ndim;
  for (int round = 0; round < 8; ++round) {
    double max_change = 0.0;
    for (int sw = 0; sw < nsweeps; ++sw) {
      const int si = (sw & 1) ? -1 : 1;
      const int sj = (sw & 2) ? -1 : 1;
      const int sk = (sw & 4) ? -1 : 1;
      for (int kk = 0; kk < grid.dims[2]; ++kk) {
        const int k = sk > 0 ? kk : grid.dims[2] - 1 - kk;
        for (int jj = 0; jj < grid.dims[1]; ++jj) {
          const int j = sj > 0 ? jj : grid.dims[1] - 1 - jj;
          for (int ii = 0; ii < grid.dims[0]; ++ii) {
            const int i = si > 0 ? ii : grid.dims[0] - 1 - ii;
            const std::size_t idx = grid.index(i, j, k);
            if (!grid.inside[idx] || seed[idx]) continue;
            double m[3];
            int nm = 0;
            for (int a = 0; a < ndim; ++a) {
              double best = kUnsolved;
              for (int sgn = -1; sgn <= 1; sgn += 2) {
                int c[3] = {i, j, k};
                c[a] += sgn;
                if (!grid.in_bounds(c[0], c[1], c[2])) continue;
                const std::size_t nb = grid.index(c[0], c[1], c[2]);
                if (grid.inside[nb]) best = std::min(best, f.delta_fsm[nb]);
              }
              if (best < kUnsolved) m[nm++] = best;
            }
            if (nm == 0) continue;
            const double u = eikonal_update(m, nm, h);
            if (u < f.delta_fsm[idx]) {
              max_change = std::max(max_change, f.delta_fsm[idx] < kUnsolved
                                                    ? f.delta_fsm[idx] - u
                                                    : 1.0);
              f.delta_fsm[idx] = u;
            }
          }
        }
      }
    }
    if (max_change < 1e-12 * std::max(1.0, h)) break;
  }

  // Upwind residual off seeds, and exact error where a closed form exists.
  double res = 0.0, err = 0.0;
  for (std::size_t idx = 0; idx < N; ++idx) {
    if (!grid.inside[idx] || f.delta_fsm[idx] >= kUnsolved) continue;
    if (!seed[idx]) {
      int i, j, k;
      grid.coords(idx, i, j, k);
      double g2 = 0.0;
      for (int a = 0; a < ndim; ++a) {
        double best = kUnsolved;
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          int c[3] = {i, j, k};
          c[a] += sgn;
          if (!grid.in_bounds(c[0], c[1], c[2])) continue;
          const std::size_t nb = grid.index(c[0], c[1], c[2]);
          if (grid.inside[nb] && f.delta_fsm[nb] < kUnsolved)
            best = std::min(best, f.delta_fsm[nb]);
        }
        if (best < kUnsolved) {
          const double q = std::max(f.delta_fsm[idx] - best, 0.0) / h;
          g2 += q * q;
        }
      }
      res = std::max(res, std::fabs(std::sqrt(g2) - 1.0));
    }
    if (dom.analytic())
      err = std::max(err, std::fabs(f.delta_fsm[idx] -
                                    dom.exact_delta(grid.center(idx))));
  }
  f.eikonal_residual = res;
  f.eikonal_error = dom.analytic() ? err : -1.0;

  // Working field: closed-form distance wherever available.
  if (dom.analytic()) {
    f.delta.assign(N, kUnsolved);
    std::vector<std::size_t> ids;
    ids.reserve(inside_count);
    for (std::size_t idx = 0; idx < N; ++idx)
      if (grid.inside[idx]) ids.push_back(idx);
    parallel_for(std::size_t(0), ids.size(), [&](std::size_t t) {
      const std::size_t idx = ids[t];
      f.delta[idx] = std::max(dom.exact_delta(grid.center(idx)), 0.0);
    });
  } else {
    f.delta = f.delta_fsm;
  }
  return f;
}

void nearest_and_singular(const Domain& dom, DistanceField& f, double angle_tol) {
  const Grid& grid = f.grid;
  const std::size_t N = grid.size();
  f.angle_tol = angle_tol;
  f.nearest.assign(N, Vec{0, 0, 0});
  for (int a = 0; a < 3; ++a) f.grad[a].assign(N, 0.0);
  f.singular.assign(N, 0);
  f.near_boundary.assign(N, 0);
  const double h = grid.h;

  std::vector<std::size_t> ids;
  for (std::size_t idx = 0; idx < N; ++idx)
    if (f.usable(idx)) ids.push_back(idx);

  if (dom.analytic()) {
    parallel_for(std::size_t(0), ids.size(), [&](std::size_t t) {
      const std::size_t idx = ids[t];
      const Vec x = grid.center(idx);
      const Vec y = dom.nearest_boundary(x);
      f.nearest[idx] = y;
      const Vec d = x - y;
      const double dn = std::max(norm(d), 1e-300);
      for (int a = 0; a < 3; ++a) f.grad[a][idx] = d[a] / dn;
    });
  } else {
    // Central differences of the solved field, one-sided at the rim.
    parallel_for(std::size_t(0), ids.size(), [&](std::size_t t) {
      const std::size_t idx = ids[t];
      int i, j, k;
      grid.coords(idx, i, j, k);
      Vec g{0, 0, 0};
      for (int a = 0; a < grid.ndim; ++a) {
        int cp[3] = {i, j, k}, cm[3] = {i, j, k};
        cp[a] += 1;
        cm[a] -= 1;
        const bool okp = grid.in_bounds(cp[0], cp[1], cp[2]) &&
                         f.usable(grid.index(cp[0], cp[1], cp[2]));
        const bool okm = grid.in_bounds(cm[0], cm[1], cm[2]) &&
                         f.usable(grid.index(cm[0], cm[1], cm[2]));
        const double v = f.delta[idx];
        const double vp = okp ? f.delta[grid.index(cp[0], cp[1], cp[2])] : v;
        const double vm = okm ? f.delta[grid.index(cm[0], cm[1], cm[2])] : v;
        if (okp && okm)
          g[a] = (vp - vm) / (2.0 * h);
        else if (okp)
          g[a] = (vp - v) / h;
        else if (okm)
          g[a] = (v - vm) / h;
      }
      const Vec gn = normalized(g);
      for (int a = 0; a < 3; ++a) f.grad[a][idx] = gn[a];
      const Vec x = grid.center(idx);
      Vec y = x - f.delta[idx] * gn;
      y = dom.nearest_boundary(y);  // gradient-flow refinement onto {F = 0}
      f.nearest[idx] = y;
    });
  }

  for (std::size_t idx : ids)
    if (f.delta[idx] <= 3.0 * h) f.near_boundary[idx] = 1;

  // Divergence of the unit gradient or of the nearest-point map between
  // face-neighbors flags the medial set. The nearest-point threshold grows
  // with delta (cone) plus a two-cell floor for grid jitter.
  long singular_count = 0;
  for (std::size_t idx : ids) {
    int i, j, k;
    grid.coords(idx, i, j, k);
    const Vec gc{f.grad[0][idx], f.grad[1][idx], f.grad[2][idx]};
    bool hit = false;
    for (int a = 0; a < grid.ndim && !hit; ++a) {
      for (int sgn = -1; sgn <= 1 && !hit; sgn += 2) {
        int c[3] = {i, j, k};
        c[a] += sgn;
        if (!grid.in_bounds(c[0], c[1], c[2])) continue;
        const std::size_t nb = grid.index(c[0], c[1], c[2]);
        if (!f.usable(nb)) continue;
        const Vec gg{f.grad[0][nb], f.grad[1][nb], f.grad[2][nb]};
        if (norm(gc - gg) > angle_tol) hit = true;
        if (norm(f.nearest[idx] - f.nearest[nb]) >
            angle_tol * f.delta[idx] + 2.0 * h)
          hit = true;
      }
    }
    if (hit) {
      f.singular[idx] = 1;
      ++singular_count;
    }
  }
  f.singular_count = singular_count;
}

void ridge_and_h(const Domain& dom, DistanceField& f, int nsamples) {
  const Grid& grid = f.grid;
  const double h = grid.h;
  if (nsamples <= 0) {
    const int res = std::max({grid.dims[0], grid.dims[1], grid.dims[2]}) - 6;
    nsamples = grid.ndim == 3 ? std::clamp(res * res / 2, 2048, 60000)
                              : std::clamp(4 * res, 512, 60000);
  }
  f.samples = dom.boundary_samples(nsamples);

  // Longest possible chord in the grid caps every ray.
  double tmax = 0.0;
  for (int a = 0; a < grid.ndim; ++a) tmax += grid.dims[a] * h;

  auto singular_at = [&](const Vec& p) {
    std::size_t idx;
    if (!grid.locate(p, idx)) return true;
    if (!grid.inside[idx]) return true;
    return f.singular[idx] != 0;
  };

  long censored = 0;
  parallel_for(std::size_t(0), f.samples.size(), [&](std::size_t si) {
    BoundarySample& s = f.samples[si];
    const Vec d = -1.0 * s.normal;
    double t = 0.5 * h;
    bool cut = false;
    while (t < tmax) {
      const Vec p = s.point + t * d;
      std::size_t idx;
      if (!grid.locate(p, idx) || !grid.inside[idx]) {
        cut = true;
        break;
      }
      if (dom.truncated() && dom.truncation_distance(p) < 0.5 * h) {
        cut = true;
        break;
      }
      if (f.singular[idx]) break;
      t += 0.5 * h;
    }
    if (t >= tmax) cut = true;
    if (!cut) {
      double lo = std::max(t - 0.5 * h, 0.0), hi = t;
      for (int it = 0; it < 20; ++it) {
        const double mid = 0.5 * (lo + hi);
        (singular_at(s.point + mid * d) ? hi : lo) = mid;
      }
      t = 0.5 * (lo + hi);
    }
    s.rho_bar = std::max(t, 0.5 * h);
    s.censored = cut;
  });
  for (const auto& s : f.samples)
    if (s.censored) ++censored;
  f.censored_rays = censored;

  BucketIndex bucket;
  bucket.build(f.samples, grid.ndim);

  const std::size_t N = grid.size();
  f.ridge_dist.assign(N, 0.0);
  f.hfield.assign(N, 0.0);
  std::vector<std::size_t> ids;
  for (std::size_t idx = 0; idx < N; ++idx)
    if (f.usable(idx)) ids.push_back(idx);
  parallel_for(std::size_t(0), ids.size(), [&](std::size_t t) {
    const std::size_t idx = ids[t];
    const int si = bucket.nearest(f.samples, f.nearest[idx]);
    const double lam = std::max(f.samples[si].rho_bar, 0.5 * h);
    f.ridge_dist[idx] = lam;
    f.hfield[idx] = f.singular[idx] ? 1.0 : std::min(1.0, f.delta[idx] / lam);
  });
}

DistanceField build_distance_field(const Domain& dom, const Grid& grid,
                                   const DistFieldOptions& opt) {
  DistanceField f = solve_eikonal(dom, grid);
  nearest_and_singular(dom, f, opt.angle_tol);
  if (opt.with_ridge) ridge_and_h(dom, f, opt.boundary_samples);
  return f;
}

}  // namespace hardygeo
