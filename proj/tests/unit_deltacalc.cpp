#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "hardygeo/config.hpp"
#include "hardygeo/deltacalc.hpp"
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

}  // namespace

TEST_CASE("disk: curvature formula against finite differences") {
  std::unique_ptr<Domain> disk = mk("ball", {{"radius", 1.0}}, 2);
  const DistanceField f = build_distance_field(*disk, make_grid(*disk, 128));
  const LaplacianField lap = neg_laplacian_formula(*disk, f);

  CHECK(lap.good_count > 12000);
  CHECK(lap.inconsistent == 0);
  CHECK(lap.max_rel_mismatch <= 0.05);
  // -Delta delta = 1/(1 - delta) >= 1 on the disk
  CHECK(lap.inf_formula >= 1.0 - 1e-12);
  CHECK(lap.inf_formula <= 1.01);

  // n = 1: the mean-curvature bound coincides with the formula
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    if (lap.good[i])
      CHECK(std::fabs(lap.neg_lap_formula[i] - lap.bound_field[i]) <= 1e-12);
}

TEST_CASE("torus: mean bound is strictly below the formula off the equators") {
  std::unique_ptr<Domain> torus = mk("torus", {{"r", 1.0}, {"R", 2.0}});
  const DistanceField f = build_distance_field(*torus, make_grid(*torus, 128));
  const LaplacianField lap = neg_laplacian_formula(*torus, f);
  CHECK(lap.max_rel_mismatch <= 0.05);
  double max_gap = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    if (lap.good[i]) {
      CHECK(lap.neg_lap_formula[i] >= lap.bound_field[i] - 1e-9);
      max_gap = std::max(max_gap, lap.neg_lap_formula[i] - lap.bound_field[i]);
    }
  CHECK(max_gap > 1.0);
}

TEST_CASE("fd_valid stays away from the singular set and the boundary") {
  std::unique_ptr<Domain> disk = mk("ball", {{"radius", 1.0}}, 2);
  const DistanceField f = build_distance_field(*disk, make_grid(*disk, 96));
  const LaplacianField lap = neg_laplacian_formula(*disk, f);
  long nvalid = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (!lap.fd_valid[i]) continue;
    ++nvalid;
    CHECK(lap.good[i] == 1);
    CHECK(f.singular[i] == 0);
    CHECK(f.near_boundary[i] == 0);
  }
  CHECK(nvalid > 0);
  CHECK(nvalid < lap.good_count);
}

TEST_CASE("bump quadrature: value and gradient are consistent") {
  TestBump b;
  b.center = {0.3, 0.4, 0.0};
  b.rad = 0.2;
  b.amp = 1.5;
  CHECK(bump_value(b, {0.3, 0.4, 0.0}) == doctest::Approx(1.5));
  CHECK(bump_value(b, {0.51, 0.4, 0.0}) == 0.0);
  // central difference vs analytic gradient
  const Vec x{0.35, 0.45, 0.0};
  const double eps = 1e-6;
  const Vec g = bump_grad(b, x);
  for (int a = 0; a < 2; ++a) {
    Vec xp = x, xm = x;
    xp[a] += eps;
    xm[a] -= eps;
    const double fd = (bump_value(b, xp) - bump_value(b, xm)) / (2.0 * eps);
    CHECK(g[a] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("random bumps respect the radius floor and interior support") {
  std::unique_ptr<Domain> sq = mk("box", {{"a", 1.0}, {"b", 1.0}});
  const DistanceField f = build_distance_field(*sq, make_grid(*sq, 64));
  const double h = f.grid.h;
  const std::vector<TestBump> small = random_bumps(*sq, f, 30, 5);
  for (const TestBump& b : small) {
    CHECK(b.rad >= 4.0 * h);
    CHECK(b.rad <= sq->exact_delta(b.center));
    CHECK(b.amp >= 0.5);
  }
  const std::vector<TestBump> wide = random_bumps(*sq, f, 10, 5, 16);
  for (const TestBump& b : wide) CHECK(b.rad >= 16.0 * h);
  // same seed, same floor: identical draw
  const std::vector<TestBump> again = random_bumps(*sq, f, 30, 5);
  REQUIRE(again.size() == small.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].center[0] == small[i].center[0]);
    CHECK(again[i].rad == small[i].rad);
  }
  // an impossible floor reports a configuration problem
  CHECK_THROWS_AS(random_bumps(*sq, f, 10, 5, 64), ConfigurationError);
}

TEST_CASE("distributional superharmonicity on the disk") {
  std::unique_ptr<Domain> disk = mk("ball", {{"radius", 1.0}}, 2);
  const DistanceField f = build_distance_field(*disk, make_grid(*disk, 128));
  const LaplacianField lap = neg_laplacian_formula(*disk, f);
  for (const TestBump& b : random_bumps(*disk, f, 10, 3)) {
    const DistributionalResult r = distributional_check(*disk, f, lap, b);
    CHECK(r.max_phi > 0.0);
    CHECK(r.eps_quad > 0.0);
    CHECK(r.residual >= -1e-3 * r.max_phi);
  }
  // support leaving the domain is rejected
  TestBump bad;
  bad.center = {0.9, 0.0, 0.0};
  bad.rad = 0.5;
  CHECK_THROWS_AS(distributional_check(*disk, f, lap, bad),
                  ConfigurationError);
}

TEST_CASE("inf equivalence: formula sign matches the convexity verdict") {
  std::unique_ptr<Domain> disk = mk("ball", {{"radius", 1.0}}, 2);
  const DistanceField fd = build_distance_field(*disk, make_grid(*disk, 128));
  const LaplacianField lapd = neg_laplacian_formula(*disk, fd);
  const InfEquivalenceResult ed =
      inf_equivalence(fd, lapd, convexity_report(*disk, 128));
  CHECK(ed.verdict_match);
  CHECK(ed.inf_neg_lap == doctest::Approx(1.0).epsilon(0.01));
  CHECK(ed.inf_H == doctest::Approx(1.0).epsilon(0.01));

  std::unique_ptr<Domain> ann = mk("annulus", {{"r_in", 0.5}, {"r_out", 1.0}});
  const DistanceField fa = build_distance_field(*ann, make_grid(*ann, 128));
  const LaplacianField lapa = neg_laplacian_formula(*ann, fa);
  const InfEquivalenceResult ea =
      inf_equivalence(fa, lapa, convexity_report(*ann, 128));
  CHECK(ea.verdict_match);
  CHECK(ea.inf_neg_lap == doctest::Approx(-2.0).epsilon(0.01));
  CHECK(ea.inf_H == doctest::Approx(-2.0).epsilon(0.01));
}

TEST_CASE("growth estimate holds on the disk and rejects H0 < 0") {
  std::unique_ptr<Domain> disk = mk("ball", {{"radius", 1.0}}, 2);
  const DistanceField f = build_distance_field(*disk, make_grid(*disk, 128));
  const LaplacianField lap = neg_laplacian_formula(*disk, f);
  const ConvexityReport conv = convexity_report(*disk, 128);
  const GrowthCheckResult r = growth_estimate_check(*disk, f, lap, 2.0, conv.H0);
  CHECK(r.violations == 0);
  CHECK(r.min_margin >= 0.0);
  CHECK_THROWS_AS(growth_estimate_check(*disk, f, lap, 2.0, -1.0),
                  ConfigurationError);
}
