#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "hardygeo/config.hpp"
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

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("ball geometry") {
  std::unique_ptr<Domain> disk = mk("ball", {{"radius", 1.0}}, 2);
  CHECK(disk->ambient_dim() == 2);
  CHECK(disk->n_curv() == 1);
  CHECK(disk->exact_delta({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(disk->exact_delta({0.5, 0, 0}) == doctest::Approx(0.5));
  // signed outside, valid near the boundary
  CHECK(disk->exact_delta({1.2, 0, 0}) == doctest::Approx(-0.2));
  std::array<double, 2> k{};
  disk->curvature_at({1, 0, 0}, k);
  CHECK(k[0] == doctest::Approx(1.0));
  CHECK(disk->mean_curvature_at({0, 1, 0}) == doctest::Approx(1.0));
  CHECK(disk->volume() == doctest::Approx(kPi));
  CHECK(disk->diameter() == doctest::Approx(2.0));
  CHECK(disk->interior_radius() == doctest::Approx(1.0));
  CHECK(!disk->truncated());

  std::unique_ptr<Domain> ball = mk("ball", {{"radius", 2.0}}, 3);
  CHECK(ball->n_curv() == 2);
  CHECK(ball->mean_curvature_at({2, 0, 0}) == doctest::Approx(1.0));
  CHECK(ball->volume() == doctest::Approx(4.0 / 3.0 * kPi * 8.0));
  BoundarySample s = ball->boundary_samples(64).front();
  CHECK(ball->fill_rho_bar(s));
  CHECK(s.rho_bar == doctest::Approx(2.0));
  CHECK(!s.censored);
}

TEST_CASE("annulus geometry and sign convention") {
  std::unique_ptr<Domain> ann = mk("annulus", {{"r_in", 0.5}, {"r_out", 1.0}});
  CHECK(ann->inside({0.75, 0, 0}));
  CHECK(!ann->inside({0.3, 0, 0}));
  CHECK(ann->exact_delta({0.75, 0, 0}) == doctest::Approx(0.25));
  CHECK(ann->exact_delta({0.6, 0, 0}) == doctest::Approx(0.1));
  // inner circle curves away from the domain: kappa = -1/r_in
  std::array<double, 2> k{};
  ann->curvature_at({0.5, 0, 0}, k);
  CHECK(k[0] == doctest::Approx(-2.0));
  ann->curvature_at({1.0, 0, 0}, k);
  CHECK(k[0] == doctest::Approx(1.0));
  CHECK(ann->volume() == doctest::Approx(kPi * 0.75));
  CHECK(ann->interior_radius() == doctest::Approx(0.25));
  BoundarySample s;
  s.point = {0.5, 0, 0};
  CHECK(ann->fill_rho_bar(s));
  CHECK(s.rho_bar == doctest::Approx(0.25));

  const ConvexityReport conv = convexity_report(*ann, 128);
  CHECK(!conv.weakly_mean_convex);
  CHECK(conv.H0 == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("torus is the critical weakly mean convex case") {
  std::unique_ptr<Domain> torus = mk("torus", {{"r", 1.0}, {"R", 2.0}});
  CHECK(torus->ambient_dim() == 3);
  CHECK(torus->grid_dim() == 2);
  CHECK(torus->measure() == Measure::kCylindrical);
  CHECK(torus->n_curv() == 2);
  // tube center circle: delta = minor radius
  CHECK(torus->exact_delta({2, 0, 0}) == doctest::Approx(1.0));
  std::array<double, 2> k{};
  torus->curvature_at({3, 0, 0}, k);  // outer equator
  CHECK(k[0] + k[1] == doctest::Approx(1.0 + 1.0 / 3.0));
  torus->curvature_at({1, 0, 0}, k);  // inner equator: H = 0
  CHECK(k[0] + k[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(torus->volume() == doctest::Approx(2.0 * kPi * kPi * 2.0));
  CHECK(torus->diameter() == doctest::Approx(6.0));
  CHECK(torus->interior_radius() == doctest::Approx(1.0));

  const ConvexityReport conv = convexity_report(*torus, 256);
  CHECK(conv.weakly_mean_convex);
  CHECK(std::fabs(conv.H0) <= 1e-3);

  BoundarySample s = torus->boundary_samples(128).front();
  CHECK(torus->fill_rho_bar(s));
  CHECK(s.rho_bar == doctest::Approx(1.0));
}

TEST_CASE("box geometry") {
  std::unique_ptr<Domain> sq = mk("box", {{"a", 1.0}, {"b", 1.0}});
  CHECK(sq->ambient_dim() == 2);
  CHECK(sq->exact_delta({0.5, 0.5, 0}) == doctest::Approx(0.5));
  CHECK(sq->exact_delta({0.25, 0.5, 0}) == doctest::Approx(0.25));
  CHECK(sq->mean_curvature_at({0.5, 0.0, 0}) == 0.0);
  CHECK(sq->volume() == doctest::Approx(1.0));
  CHECK(sq->diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq->interior_radius() == doctest::Approx(0.5));
  const ConvexityReport conv = convexity_report(*sq, 128);
  CHECK(conv.weakly_mean_convex);

  std::unique_ptr<Domain> brick =
      mk("box", {{"a", 1.0}, {"b", 2.0}, {"c", 3.0}}, 3);
  CHECK(brick->ambient_dim() == 3);
  CHECK(brick->volume() == doctest::Approx(6.0));
  CHECK(brick->thinnest_feature() == doctest::Approx(1.0));
}

TEST_CASE("catenoid slab is minimal with truncation faces") {
  std::unique_ptr<Domain> slab =
      mk("catenoid_slab", {{"neck", 1.0}, {"thickness", 2.0}});
  CHECK(slab->truncated());
  CHECK(slab->measure() == Measure::kCylindrical);
  CHECK(slab->truncation_distance({0.5, 0.25, 0}) == doctest::Approx(0.75));
  std::array<double, 2> k{};
  slab->curvature_at({1.0, 0.0, 0}, k);  // neck: principal curvatures +-1
  CHECK(k[0] == doctest::Approx(-1.0));
  CHECK(k[1] == doctest::Approx(1.0));
  for (const BoundarySample& s : slab->boundary_samples(64)) {
    CHECK(std::fabs(s.H) <= 1e-12);
    CHECK(s.kappa[0] == doctest::Approx(-s.kappa[1]));
  }
  // rim rays are cut by the slab faces before the axis
  BoundarySample rim;
  rim.point = {std::cosh(0.99), 0.99, 0.0};
  CHECK(slab->fill_rho_bar(rim));
  CHECK(rim.censored);
  CHECK(rim.rho_bar < 0.1);
}

TEST_CASE("ellipsoid shell is planar only") {
  std::unique_ptr<Domain> shell = mk(
      "ellipsoid_shell",
      {{"a_out", 2.0}, {"b_out", 1.0}, {"a_in", 1.0}, {"b_in", 0.5}});
  CHECK(shell->ambient_dim() == 2);
  CHECK(shell->volume() == doctest::Approx(kPi * (2.0 - 0.5)));
  CHECK(shell->inside({1.5, 0, 0}));
  CHECK(!shell->inside({0.5, 0, 0}));
  CHECK_THROWS_AS(
      mk("ellipsoid_shell",
         {{"a_out", 2.0}, {"b_out", 1.0}, {"a_in", 1.0}, {"b_in", 0.5}}, 3),
      ConfigurationError);
}

TEST_CASE("implicit level set domain") {
  DomainSpec spec;
  spec.kind = "implicit";
  spec.levelset = "hypot(x, y) - 1";
  spec.bbox_lo = {-1.1, -1.1, 0};
  spec.bbox_hi = {1.1, 1.1, 0};
  spec.dim = 2;
  std::unique_ptr<Domain> dom = make_domain(spec);
  CHECK(!dom->analytic());
  CHECK(dom->inside({0.5, 0, 0}));
  CHECK(!dom->inside({1.05, 0, 0}));
  // projection distance agrees with the disk near the boundary
  CHECK(dom->exact_delta({0.9, 0, 0}) == doctest::Approx(0.1).epsilon(1e-4));
  CHECK(dom->exact_delta({1.05, 0, 0}) ==
        doctest::Approx(-0.05).epsilon(1e-3));

  DomainSpec bad = spec;
  bad.levelset = "hypot(x,";
  CHECK_THROWS_AS(make_domain(bad), ConfigurationError);
  DomainSpec nobox = spec;
  nobox.bbox_hi = nobox.bbox_lo;
  CHECK_THROWS_AS(make_domain(nobox), ConfigurationError);
}

TEST_CASE("make_domain rejects bad parameters") {
  CHECK_THROWS_AS(mk("ball", {{"radius", -1.0}}), ConfigurationError);
  CHECK_THROWS_AS(mk("torus", {{"r", 2.0}, {"R", 1.0}}), ConfigurationError);
  CHECK_THROWS_AS(mk("annulus", {{"r_in", 1.0}, {"r_out", 0.5}}),
                  ConfigurationError);
  CHECK_THROWS_AS(mk("no_such_kind", {}), ConfigurationError);
}

TEST_CASE("make_grid covers the box with padding") {
  std::unique_ptr<Domain> sq = mk("box", {{"a", 1.0}, {"b", 1.0}});
  const Grid g = make_grid(*sq, 128);
  CHECK(g.ndim == 2);
  CHECK(g.h == doctest::Approx(1.0 / 128.0));
  CHECK(g.dims[0] == 134);  // 128 + 2*3 pad
  CHECK(g.dims[1] == 134);
  // origin is the center of cell (0,0): pad cells outside the box
  CHECK(g.center(0)[0] == doctest::Approx(-2.5 * g.h));
  CHECK(g.cell_volume(0) == doctest::Approx(g.h * g.h));
  CHECK_THROWS_AS(make_grid(*sq, 3), ConfigurationError);

  // thin feature guard: annulus gap of 0.1 needs >= 8 cells
  std::unique_ptr<Domain> thin =
      mk("annulus", {{"r_in", 0.45}, {"r_out", 0.55}});
  CHECK_THROWS_AS(make_grid(*thin, 32), ConfigurationError);
  CHECK_NOTHROW(make_grid(*thin, 128));
}

TEST_CASE("cylindrical cells carry the 2 pi s weight") {
  std::unique_ptr<Domain> torus = mk("torus", {{"r", 1.0}, {"R", 2.0}});
  const Grid g = make_grid(*torus, 64);
  CHECK(g.measure == Measure::kCylindrical);
  bool checked = false;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec c = g.center(idx);
    if (c[0] > 0.1) {
      CHECK(g.cell_volume(idx) ==
            doctest::Approx(g.h * g.h * 2.0 * kPi * c[0]).epsilon(1e-12));
      checked = true;
      break;
    }
  }
  CHECK(checked);
}

TEST_CASE("convexity report flags the witness for non-convex domains") {
  std::unique_ptr<Domain> ann = mk("annulus", {{"r_in", 0.5}, {"r_out", 1.0}});
  const ConvexityReport conv = convexity_report(*ann, 128);
  CHECK(!conv.weakly_mean_convex);
  // witness sits on the inner circle
  const double r = std::hypot(conv.witness[0], conv.witness[1]);
  CHECK(r == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(conv.samples > 0);
}
