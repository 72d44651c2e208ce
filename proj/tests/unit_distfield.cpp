#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "hardygeo/distfield.hpp"
#include "hardygeo/domains.hpp"

using namespace hardygeo;

namespace {

std::unique_ptr<Domain> mk(const std::string& kind,
                           std::vector<std::pair<std::string, double>> num,
                           int dim = 0) {
  DomainSpec spec;
  spec.kind = kind;
  spec.num = std::move(num);
  spec.dim = dim;
  return make_domain(spec);
}

std::size_t cell_near(const DistanceField& f, double x, double y,
                      bool usable_only = true) {
  std::size_t best_idx = 0;
  double best = 1e300;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (usable_only && !f.usable(i)) continue;
    const Vec c = f.grid.center(i);
    const double d2 = (c[0] - x) * (c[0] - x) + (c[1] - y) * (c[1] - y);
    if (d2 < best) {
      best = d2;
      best_idx = i;
    }
  }
  return best_idx;
}

}  // namespace

TEST_CASE("square distance field: exact seeds, ridge on the diagonals") {
  std::unique_ptr<Domain> sq = mk("box", {{"a", 1.0}, {"b", 1.0}});
  const Grid g = make_grid(*sq, 64);
  const DistanceField f = build_distance_field(*sq, g);

  CHECK(f.inside_count == 4096);
  CHECK(f.eikonal_residual <= 1e-10);
  // first-order sweeping against the closed form
  CHECK(f.eikonal_error <= g.h);
  CHECK(f.censored_rays == 0);
  CHECK(f.singular_count > 0);

  // analytic delta is the primary field
  for (std::size_t i = 0; i < g.size(); ++i)
    if (f.usable(i))
      CHECK(f.delta[i] ==
            doctest::Approx(sq->exact_delta(g.center(i))).epsilon(1e-12));

  // center cell sits on the ridge
  const std::size_t ic = cell_near(f, 0.5, 0.5);
  CHECK(f.singular[ic] == 1);
  CHECK(f.hfield[ic] == doctest::Approx(1.0));

  // wall cell: unit gradient toward the nearest wall, ridge at the diagonal
  const std::size_t iw = cell_near(f, 0.25, 0.1);
  CHECK(f.singular[iw] == 0);
  CHECK(std::fabs(f.grad[0][iw]) <= 1e-9);
  CHECK(f.grad[1][iw] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.ridge_dist[iw] > 0.19);
  CHECK(f.ridge_dist[iw] < 0.27);
  CHECK(f.hfield[iw] ==
        doctest::Approx(std::min(1.0, f.delta[iw] / f.ridge_dist[iw])));

  // boundary samples carry marched ridge distances
  CHECK(f.samples.size() >= 64);
  for (const BoundarySample& s : f.samples) {
    CHECK(s.rho_bar > 0.0);
    CHECK(s.rho_bar <= 0.5 + g.h);
  }
}

TEST_CASE("disk distance field: nearest map and gradient") {
  std::unique_ptr<Domain> disk = mk("ball", {{"radius", 1.0}}, 2);
  const Grid g = make_grid(*disk, 64);
  const DistanceField f = build_distance_field(*disk, g);

  CHECK(f.eikonal_residual <= 1e-10);
  CHECK(f.eikonal_error <= 2.0 * g.h);

  const std::size_t ix = cell_near(f, 0.6, 0.0);
  const Vec c = g.center(ix);
  const Vec n = f.nearest[ix];
  CHECK(std::hypot(n[0], n[1]) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.delta[ix] == doctest::Approx(disk->exact_delta(c)).epsilon(1e-12));
  // gradient points inward along the radius
  const double r = std::hypot(c[0], c[1]);
  CHECK(f.grad[0][ix] == doctest::Approx(-c[0] / r).epsilon(1e-9));
  CHECK(f.grad[1][ix] == doctest::Approx(-c[1] / r).epsilon(1e-9));

  // only the center cluster is singular
  CHECK(f.singular_count > 0);
  CHECK(f.singular_count < 40);
  const std::size_t i0 = cell_near(f, 0.0, 0.0);
  CHECK(f.singular[i0] == 1);
}

TEST_CASE("torus slice field is cylindrical with unit-gradient delta") {
  std::unique_ptr<Domain> torus = mk("torus", {{"r", 1.0}, {"R", 2.0}});
  const Grid g = make_grid(*torus, 96);
  const DistanceField f = build_distance_field(*torus, g);
  CHECK(g.measure == Measure::kCylindrical);
  CHECK(f.inside_count > 0);
  const std::size_t ix = cell_near(f, 2.3, 0.1);
  const Vec c = g.center(ix);
  CHECK(f.delta[ix] == doctest::Approx(torus->exact_delta(c)).epsilon(1e-12));
  const double gn = std::hypot(f.grad[0][ix], f.grad[1][ix]);
  CHECK(gn == doctest::Approx(1.0).epsilon(1e-9));
  // ridge is the tube center circle; marching stops half a mask early
  for (const BoundarySample& s : f.samples)
    CHECK(s.rho_bar == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("catenoid slab marks censored rim rays") {
  std::unique_ptr<Domain> slab =
      mk("catenoid_slab", {{"neck", 1.0}, {"thickness", 2.0}});
  const DistanceField f = build_distance_field(*slab, make_grid(*slab, 96));
  CHECK(f.censored_rays > 0);
  long censored = 0;
  for (const BoundarySample& s : f.samples)
    if (s.censored) ++censored;
  CHECK(censored == f.censored_rays);
}

TEST_CASE("implicit domains fall back to the sweeping solution") {
  DomainSpec spec;
  spec.kind = "implicit";
  spec.levelset = "hypot(x, y) - 1";
  spec.bbox_lo = {-1.1, -1.1, 0};
  spec.bbox_hi = {1.1, 1.1, 0};
  spec.dim = 2;
  std::unique_ptr<Domain> dom = make_domain(spec);
  const Grid g = make_grid(*dom, 64);
  const DistanceField f = build_distance_field(*dom, g);
  CHECK(f.eikonal_error < 0.0);  // no closed form to compare against
  const std::size_t ix = cell_near(f, 0.5, 0.0);
  // projection-seeded sweeping recovers the disk value closely
  CHECK(f.delta[ix] == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("angle tolerance controls the singular mask") {
  std::unique_ptr<Domain> sq = mk("box", {{"a", 1.0}, {"b", 1.0}});
  const Grid g = make_grid(*sq, 64);
  DistFieldOptions tight;
  tight.angle_tol = 0.1;
  DistFieldOptions loose;
  loose.angle_tol = 1.5;
  const DistanceField ft = build_distance_field(*sq, g, tight);
  const DistanceField fl = build_distance_field(*sq, g, loose);
  CHECK(ft.angle_tol == doctest::Approx(0.1));
  CHECK(ft.singular_count >= fl.singular_count);
  CHECK(fl.singular_count > 0);
}
