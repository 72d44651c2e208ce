#include "hardygeo/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hardygeo/config.hpp"

namespace hardygeo {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = 1e300;

double sq(double v) { return v * v; }

// Real roots of t^3 + p t + q = 0.
int cubic_roots(double p, double q, double out[3]) {
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      out[k] = m * std::cos(theta - 2.0 * kPi * k / 3.0);
    return 3;
  }
  const double rad = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
  const double u = std::cbrt(-q / 2.0 + rad);
  const double v = (u != 0.0) ? -p / (3.0 * u) : std::cbrt(-q / 2.0 - rad);
  out[0] = u + v;
  return 1;
}

// Parameter of the point on {(s, c s^2)} nearest to (s0, z0), s0 >= 0.
double parabola_nearest_param(double c, double s0, double z0) {
  const double p = (1.0 - 2.0 * c * z0) / (2.0 * c * c);
  const double q = -s0 / (2.0 * c * c);
  double roots[3];
  const int nr = cubic_roots(p, q, roots);
  double best_s = 0.0;
  double best_d = sq(0.0 - s0) + sq(0.0 - z0);
  for (int k = 0; k < nr; ++k) {
    const double s = std::max(0.0, roots[k]);
    const double d = sq(s - s0) + sq(c * s * s - z0);
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  return best_s;
}

// Parameter (z) of the point on {(a cosh(z/a), z)} nearest to (s0, z0).
double catenoid_nearest_param(double a, double T, double s0, double z0) {
  const double W = T + 2.0 * a * std::cosh(T / (2.0 * a));
  auto dist2 = [&](double z) {
    return sq(a * std::cosh(z / a) - s0) + sq(z - z0);
  };
  auto dg = [&](double z) {
    return std::sinh(z / a) * (a * std::cosh(z / a) - s0) + (z - z0);
  };
  const int kScan = 512;
  double best_z = -W, best_d = dist2(-W);
  if (dist2(W) < best_d) {
    best_z = W;
    best_d = dist2(W);
  }
  double zl = -W, gl = dg(zl);
  for (int i = 1; i <= kScan; ++i) {
    const double zr = -W + 2.0 * W * i / kScan;
    const double gr = dg(zr);
    if (gl <= 0.0 && gr >= 0.0) {
      double lo = zl, hi = zr;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dg(mid) <= 0.0 ? lo : hi) = mid;
      }
      const double z = 0.5 * (lo + hi);
      const double d = dist2(z);
      if (d < best_d) {
        best_d = d;
        best_z = z;
      }
    }
    zl = zr;
    gl = gr;
  }
  return best_z;
}

// Parameter of the point on the ellipse (A cos t, B sin t) nearest to p.
double ellipse_nearest_param(double A, double B, double px, double py) {
  const double ax = std::fabs(px), ay = std::fabs(py);
  double t;
  if (ax < 1e-15 && ay < 1e-15) {
    t = (B <= A) ? kPi / 2.0 : 0.0;
  } else {
    auto dh = [&](double u) {
      const double st = std::sin(u), ct = std::cos(u);
      return (B * B - A * A) * st * ct + A * ax * st - B * ay * ct;
    };
    double lo = 0.0, hi = kPi / 2.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dh(mid) <= 0.0 ? lo : hi) = mid;
    }
    t = 0.5 * (lo + hi);
  }
  if (px < 0.0) t = kPi - t;
  if (py < 0.0) t = -t;
  return t;
}

double ellipse_perimeter(double A, double B) {
  return kPi * (3.0 * (A + B) - std::sqrt((3.0 * A + B) * (A + 3.0 * B)));
}

class DomainBase : public Domain {
 public:
  explicit DomainBase(DomainSpec spec) : spec_(std::move(spec)) {}
  const DomainSpec& spec() const override { return spec_; }

 protected:
  DomainSpec spec_;
};

class BallDomain final : public DomainBase {
 public:
  BallDomain(DomainSpec spec, double R, int dim)
      : DomainBase(std::move(spec)), R_(R), dim_(dim) {}

  int ambient_dim() const override { return dim_; }
  int grid_dim() const override { return dim_; }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = {-R_, -R_, dim_ == 3 ? -R_ : 0.0};
    hi = {R_, R_, dim_ == 3 ? R_ : 0.0};
  }
  bool inside(const Vec& x) const override { return norm(x) < R_; }
  double exact_delta(const Vec& x) const override { return R_ - norm(x); }
  Vec nearest_boundary(const Vec& x) const override {
    const double r = norm(x);
    if (r < 1e-300) return {R_, 0.0, 0.0};
    return (R_ / r) * x;
  }
  void curvature_at(const Vec&, std::array<double, 2>& kappa) const override {
    kappa = {1.0 / R_, dim_ == 3 ? 1.0 / R_ : 0.0};
  }
  Vec outward_normal(const Vec& y) const override { return normalized(y); }
  bool fill_rho_bar(BoundarySample& s) const override {
    s.rho_bar = R_;
    s.censored = false;
    return true;
  }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    std::vector<BoundarySample> out;
    m = std::max(m, 16);
    if (dim_ == 2) {
      out.reserve(m);
      for (int j = 0; j < m; ++j) {
        const double th = 2.0 * kPi * j / m;
        BoundarySample s;
        s.point = {R_ * std::cos(th), R_ * std::sin(th), 0.0};
        s.normal = {std::cos(th), std::sin(th), 0.0};
        s.kappa = {1.0 / R_, 0.0};
        s.n = 1;
        s.H = 1.0 / R_;
        s.dH = 0.0;
        s.spacing = 2.0 * kPi * R_ / m;
        out.push_back(s);
      }
    } else {
      out.reserve(m);
      const double golden = kPi * (3.0 - std::sqrt(5.0));
      for (int j = 0; j < m; ++j) {
        const double z = 1.0 - 2.0 * (j + 0.5) / m;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double ph = golden * j;
        BoundarySample s;
        s.normal = {rho * std::cos(ph), rho * std::sin(ph), z};
        s.point = R_ * s.normal;
        s.kappa = {1.0 / R_, 1.0 / R_};
        s.n = 2;
        s.H = 2.0 / R_;
        s.dH = 0.0;
        s.spacing = std::sqrt(4.0 * kPi * R_ * R_ / m);
        out.push_back(s);
      }
    }
    return out;
  }
  double thinnest_feature() const override { return 2.0 * R_; }
  double diameter() const override { return 2.0 * R_; }
  double volume() const override {
    return dim_ == 2 ? kPi * R_ * R_ : 4.0 / 3.0 * kPi * R_ * R_ * R_;
  }
  double interior_radius() const override { return R_; }

 private:
  double R_;
  int dim_;
};

// Solid torus, realized on the (s,z) meridian half-plane with cylindrical
// measure; curvature data is the full ambient pair.
class TorusDomain final : public DomainBase {
 public:
  TorusDomain(DomainSpec spec, double r, double R)
      : DomainBase(std::move(spec)), r_(r), R_(R) {}

  int ambient_dim() const override { return 3; }
  int grid_dim() const override { return 2; }
  Measure measure() const override { return Measure::kCylindrical; }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = {R_ - r_, -r_, 0.0};
    hi = {R_ + r_, r_, 0.0};
  }
  bool inside(const Vec& x) const override {
    return sq(x[0] - R_) + sq(x[1]) < sq(r_);
  }
  double exact_delta(const Vec& x) const override {
    return r_ - std::sqrt(sq(x[0] - R_) + sq(x[1]));
  }
  Vec nearest_boundary(const Vec& x) const override {
    const double ds = x[0] - R_, dz = x[1];
    const double d = std::sqrt(ds * ds + dz * dz);
    if (d < 1e-300) return {R_ + r_, 0.0, 0.0};
    return {R_ + r_ * ds / d, r_ * dz / d, 0.0};
  }
  void curvature_at(const Vec& y, std::array<double, 2>& kappa) const override {
    const double ct = (y[0] - R_) / r_;
    kappa = {1.0 / r_, ct / (R_ + r_ * ct)};
  }
  Vec outward_normal(const Vec& y) const override {
    return normalized(Vec{y[0] - R_, y[1], 0.0});
  }
  bool fill_rho_bar(BoundarySample& s) const override {
    s.rho_bar = r_;
    s.censored = false;
    return true;
  }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    m = std::max(m, 16);
    if (m % 2) ++m;  // keep theta = pi (the innermost circle) in the sample set
    std::vector<BoundarySample> out;
    out.reserve(m);
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * kPi * j / m;
      const double ct = std::cos(th), st = std::sin(th);
      BoundarySample s;
      s.point = {R_ + r_ * ct, r_ * st, 0.0};
      s.normal = {ct, st, 0.0};
      s.kappa = {1.0 / r_, ct / (R_ + r_ * ct)};
      s.n = 2;
      s.H = s.kappa[0] + s.kappa[1];
      s.dH = R_ * std::fabs(st) / (r_ * sq(R_ + r_ * ct));
      s.spacing = 2.0 * kPi * r_ / m;
      out.push_back(s);
    }
    return out;
  }
  double thinnest_feature() const override { return 2.0 * r_; }
  double diameter() const override { return 2.0 * (R_ + r_); }
  double volume() const override { return 2.0 * kPi * kPi * R_ * r_ * r_; }
  double interior_radius() const override { return r_; }

 private:
  double r_, R_;
};

class AnnulusDomain final : public DomainBase {
 public:
  AnnulusDomain(DomainSpec spec, double rin, double rout)
      : DomainBase(std::move(spec)), rin_(rin), rout_(rout) {}

  int ambient_dim() const override { return 2; }
  int grid_dim() const override { return 2; }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = {-rout_, -rout_, 0.0};
    hi = {rout_, rout_, 0.0};
  }
  bool inside(const Vec& x) const override {
    const double r = norm(x);
    return r > rin_ && r < rout_;
  }
  double exact_delta(const Vec& x) const override {
    const double r = norm(x);
    return std::min(r - rin_, rout_ - r);
  }
  Vec nearest_boundary(const Vec& x) const override {
    const double r = norm(x);
    if (r < 1e-300) return {rin_, 0.0, 0.0};
    const double R = (r - rin_ <= rout_ - r) ? rin_ : rout_;
    return (R / r) * x;
  }
  void curvature_at(const Vec& y, std::array<double, 2>& kappa) const override {
    const double r = norm(y);
    kappa = {(r > 0.5 * (rin_ + rout_)) ? 1.0 / rout_ : -1.0 / rin_, 0.0};
  }
  Vec outward_normal(const Vec& y) const override {
    const double r = norm(y);
    return (r > 0.5 * (rin_ + rout_)) ? normalized(y) : -1.0 * normalized(y);
  }
  bool fill_rho_bar(BoundarySample& s) const override {
    s.rho_bar = 0.5 * (rout_ - rin_);
    s.censored = false;
    return true;
  }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    m = std::max(m, 64);
    const int mo = std::max(32, (int)std::lround(m * rout_ / (rin_ + rout_)));
    const int mi = std::max(32, m - mo);
    std::vector<BoundarySample> out;
    out.reserve(mo + mi);
    for (int j = 0; j < mo; ++j) {
      const double th = 2.0 * kPi * j / mo;
      BoundarySample s;
      s.point = {rout_ * std::cos(th), rout_ * std::sin(th), 0.0};
      s.normal = {std::cos(th), std::sin(th), 0.0};
      s.kappa = {1.0 / rout_, 0.0};
      s.n = 1;
      s.H = 1.0 / rout_;
      s.dH = 0.0;
      s.spacing = 2.0 * kPi * rout_ / mo;
      out.push_back(s);
    }
    for (int j = 0; j < mi; ++j) {
      const double th = 2.0 * kPi * j / mi;
      BoundarySample s;
      s.point = {rin_ * std::cos(th), rin_ * std::sin(th), 0.0};
      s.normal = {-std::cos(th), -std::sin(th), 0.0};
      s.kappa = {-1.0 / rin_, 0.0};
      s.n = 1;
      s.H = -1.0 / rin_;
      s.dH = 0.0;
      s.spacing = 2.0 * kPi * rin_ / mi;
      out.push_back(s);
    }
    return out;
  }
  double thinnest_feature() const override {
    return std::min(rout_ - rin_, 2.0 * rin_);
  }
  double diameter() const override { return 2.0 * rout_; }
  double volume() const override { return kPi * (sq(rout_) - sq(rin_)); }
  double interior_radius() const override { return 0.5 * (rout_ - rin_); }

 private:
  double rin_, rout_;
};

class BoxDomain final : public DomainBase {
 public:
  BoxDomain(DomainSpec spec, Vec side, int dim)
      : DomainBase(std::move(spec)), side_(side), dim_(dim) {}

  int ambient_dim() const override { return dim_; }
  int grid_dim() const override { return dim_; }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = {0.0, 0.0, 0.0};
    hi = side_;
  }
  bool inside(const Vec& x) const override {
    for (int a = 0; a < dim_; ++a)
      if (x[a] <= 0.0 || x[a] >= side_[a]) return false;
    return true;
  }
  double exact_delta(const Vec& x) const override {
    double d = kInf;
    for (int a = 0; a < dim_; ++a)
      d = std::min({d, x[a], side_[a] - x[a]});
    return d;
  }
  Vec nearest_boundary(const Vec& x) const override {
    int best_a = 0;
    double best = kInf, target = 0.0;
    for (int a = 0; a < dim_; ++a) {
      if (x[a] < best) {
        best = x[a];
        best_a = a;
        target = 0.0;
      }
      if (side_[a] - x[a] < best) {
        best = side_[a] - x[a];
        best_a = a;
        target = side_[a];
      }
    }
    Vec y = x;
    y[best_a] = target;
    return y;
  }
  void curvature_at(const Vec&, std::array<double, 2>& kappa) const override {
    kappa = {0.0, 0.0};
  }
  Vec outward_normal(const Vec& y) const override {
    int best_a = 0;
    double best = kInf, dir = -1.0;
    for (int a = 0; a < dim_; ++a) {
      if (std::fabs(y[a]) < best) {
        best = std::fabs(y[a]);
        best_a = a;
        dir = -1.0;
      }
      if (std::fabs(side_[a] - y[a]) < best) {
        best = std::fabs(side_[a] - y[a]);
        best_a = a;
        dir = 1.0;
      }
    }
    Vec n{0.0, 0.0, 0.0};
    n[best_a] = dir;
    return n;
  }
  bool fill_rho_bar(BoundarySample& s) const override {
    // First parameter at which the inward ray from a face point becomes
    // equidistant to another face: the smallest in-face edge distance, or
    // half the extent along the normal axis.
    int na = 0;
    for (int a = 0; a < dim_; ++a)
      if (std::fabs(s.normal[a]) > 0.5) na = a;
    double rho = 0.5 * side_[na];
    for (int a = 0; a < dim_; ++a) {
      if (a == na) continue;
      rho = std::min({rho, s.point[a], side_[a] - s.point[a]});
    }
    s.rho_bar = rho;
    s.censored = false;
    return true;
  }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    std::vector<BoundarySample> out;
    if (dim_ == 2) {
      const double P = 2.0 * (side_[0] + side_[1]);
      for (int a = 0; a < 2; ++a) {
        const int t = 1 - a;
        const int k = std::max(8, (int)std::lround(m * side_[t] / P));
        for (int face = 0; face < 2; ++face) {
          for (int j = 0; j < k; ++j) {
            BoundarySample s;
            s.point = {0.0, 0.0, 0.0};
            s.point[a] = face ? side_[a] : 0.0;
            s.point[t] = (j + 0.5) * side_[t] / k;
            s.normal = {0.0, 0.0, 0.0};
            s.normal[a] = face ? 1.0 : -1.0;
            s.kappa = {0.0, 0.0};
            s.n = 1;
            s.H = 0.0;
            s.dH = 0.0;
            s.spacing = side_[t] / k;
            out.push_back(s);
          }
        }
      }
    } else {
      double area = 0.0;
      for (int a = 0; a < 3; ++a)
        area += 2.0 * side_[(a + 1) % 3] * side_[(a + 2) % 3];
      for (int a = 0; a < 3; ++a) {
        const int u = (a + 1) % 3, v = (a + 2) % 3;
        const double kf = m * side_[u] * side_[v] / area;
        const int mu = std::max(4, (int)std::lround(std::sqrt(kf * side_[u] / side_[v])));
        const int mv = std::max(4, (int)std::lround(kf / mu));
        for (int face = 0; face < 2; ++face) {
          for (int ju = 0; ju < mu; ++ju) {
            for (int jv = 0; jv < mv; ++jv) {
              BoundarySample s;
              s.point = {0.0, 0.0, 0.0};
              s.point[a] = face ? side_[a] : 0.0;
              s.point[u] = (ju + 0.5) * side_[u] / mu;
              s.point[v] = (jv + 0.5) * side_[v] / mv;
              s.normal = {0.0, 0.0, 0.0};
              s.normal[a] = face ? 1.0 : -1.0;
              s.kappa = {0.0, 0.0};
              s.n = 2;
              s.H = 0.0;
              s.dH = 0.0;
              s.spacing = std::max(side_[u] / mu, side_[v] / mv);
              out.push_back(s);
            }
          }
        }
      }
    }
    return out;
  }
  double thinnest_feature() const override {
    double t = kInf;
    for (int a = 0; a < dim_; ++a) t = std::min(t, side_[a]);
    return t;
  }
  double diameter() const override {
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) d2 += sq(side_[a]);
    return std::sqrt(d2);
  }
  double volume() const override {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= side_[a];
    return v;
  }
  double interior_radius() const override { return 0.5 * thinnest_feature(); }

 private:
  Vec side_;
  int dim_;
};

// Region {c s^2 < z < zmax}. dim 2 is the plane region; dim 3 is the solid of
// revolution realized on the (s,z) half-plane slice with cylindrical measure.
// delta is distance to the paraboloid sheet; the roof z = zmax is an
// artificial truncation face.
class ParaboloidDomain final : public DomainBase {
 public:
  ParaboloidDomain(DomainSpec spec, double c, double zmax, int dim)
      : DomainBase(std::move(spec)),
        c_(c),
        zmax_(zmax),
        smax_(std::sqrt(zmax / c)),
        dim_(dim) {}

  int ambient_dim() const override { return dim_; }
  int grid_dim() const override { return 2; }
  Measure measure() const override {
    return dim_ == 3 ? Measure::kCylindrical : Measure::kCartesian;
  }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = {dim_ == 3 ? 0.0 : -smax_, 0.0, 0.0};
    hi = {smax_, zmax_, 0.0};
  }
  bool inside(const Vec& x) const override {
    if (dim_ == 3 && x[0] < 0.0) return false;
    return x[1] > c_ * sq(x[0]) && x[1] < zmax_;
  }
  bool truncated() const override { return true; }
  double truncation_distance(const Vec& x) const override {
    return zmax_ - x[1];
  }
  double exact_delta(const Vec& x) const override {
    const double s0 = std::fabs(x[0]), z0 = x[1];
    const double s = parabola_nearest_param(c_, s0, z0);
    const double d = std::sqrt(sq(s - s0) + sq(c_ * s * s - z0));
    return (z0 > c_ * sq(x[0])) ? d : -d;
  }
  Vec nearest_boundary(const Vec& x) const override {
    const double s0 = std::fabs(x[0]);
    double s = parabola_nearest_param(c_, s0, x[1]);
    if (x[0] < 0.0) s = -s;
    return {s, c_ * s * s, 0.0};
  }
  void curvature_at(const Vec& y, std::array<double, 2>& kappa) const override {
    const double u = 4.0 * c_ * c_ * sq(y[0]);
    kappa[0] = 2.0 * c_ / std::pow(1.0 + u, 1.5);
    kappa[1] = dim_ == 3 ? 2.0 * c_ / std::sqrt(1.0 + u) : 0.0;
  }
  Vec outward_normal(const Vec& y) const override {
    const double g = std::sqrt(1.0 + 4.0 * c_ * c_ * sq(y[0]));
    return {2.0 * c_ * y[0] / g, -1.0 / g, 0.0};
  }
  bool fill_rho_bar(BoundarySample& s) const override {
    const double g = std::sqrt(1.0 + 4.0 * c_ * c_ * sq(s.point[0]));
    const double t_axis = g / (2.0 * c_);
    const double t_roof = (zmax_ - s.point[1]) * g;
    s.rho_bar = std::min(t_axis, t_roof);
    s.censored = t_roof < t_axis;
    return true;
  }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    m = std::max(m, 32);
    std::vector<BoundarySample> out;
    out.reserve(m);
    const double s_lo = dim_ == 3 ? 0.0 : -smax_;
    const double ds = (smax_ - s_lo) / m;
    for (int j = 0; j < m; ++j) {
      const double sp = s_lo + (j + 0.5) * ds;
      const double u = 4.0 * c_ * c_ * sp * sp;
      const double g = std::sqrt(1.0 + u);
      BoundarySample s;
      s.point = {sp, c_ * sp * sp, 0.0};
      s.normal = outward_normal(s.point);
      curvature_at(s.point, s.kappa);
      s.n = dim_ - 1;
      s.H = s.n == 1 ? s.kappa[0] : s.kappa[0] + s.kappa[1];
      double dHds = -24.0 * std::pow(c_, 3) * sp / std::pow(1.0 + u, 2.5);
      if (dim_ == 3)
        dHds += -8.0 * std::pow(c_, 3) * sp / std::pow(1.0 + u, 1.5);
      s.dH = std::fabs(dHds) / g;
      s.spacing = ds * g;
      out.push_back(s);
    }
    return out;
  }
  double thinnest_feature() const override {
    // The vertex region is resolved at the scale of its curvature radius.
    return std::min({zmax_, 2.0 * smax_, 1.0 / (2.0 * c_)});
  }
  double diameter() const override {
    return std::max(2.0 * smax_, std::sqrt(sq(smax_) + sq(zmax_)));
  }
  double volume() const override {
    return dim_ == 2 ? 4.0 / 3.0 * smax_ * zmax_
                     : 0.5 * kPi * zmax_ * sq(smax_);
  }
  double interior_radius() const override {
    // Largest ball centered on the axis: dist to sheet = dist to roof.
    double lo = 1.0 / (2.0 * c_), hi = zmax_;
    auto gap = [&](double z0) {
      const double d = std::sqrt(std::max(0.0, 4.0 * c_ * z0 - 1.0)) / (2.0 * c_);
      return std::min(d, z0) - (zmax_ - z0);
    };
    if (gap(lo) >= 0.0) return zmax_ - lo;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return zmax_ - 0.5 * (lo + hi);
  }

 private:
  double c_, zmax_, smax_;
  int dim_;
};

// Region inside the catenoid s = a cosh(z/a), cut by |z| < T/2, realized on
// the (s,z) half-plane slice. delta is distance to the (untruncated) sheet;
// the planes z = +-T/2 are artificial faces.
class CatenoidDomain final : public DomainBase {
 public:
  CatenoidDomain(DomainSpec spec, double a, double T)
      : DomainBase(std::move(spec)), a_(a), T_(T) {}

  int ambient_dim() const override { return 3; }
  int grid_dim() const override { return 2; }
  Measure measure() const override { return Measure::kCylindrical; }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = {0.0, -T_ / 2.0, 0.0};
    hi = {a_ * std::cosh(T_ / (2.0 * a_)), T_ / 2.0, 0.0};
  }
  bool inside(const Vec& x) const override {
    return x[0] >= 0.0 && std::fabs(x[1]) < T_ / 2.0 &&
           x[0] < a_ * std::cosh(x[1] / a_);
  }
  bool truncated() const override { return true; }
  double truncation_distance(const Vec& x) const override {
    return T_ / 2.0 - std::fabs(x[1]);
  }
  double exact_delta(const Vec& x) const override {
    const double z = catenoid_nearest_param(a_, T_, x[0], x[1]);
    const double d = std::sqrt(sq(a_ * std::cosh(z / a_) - x[0]) + sq(z - x[1]));
    return (x[0] < a_ * std::cosh(x[1] / a_)) ? d : -d;
  }
  Vec nearest_boundary(const Vec& x) const override {
    const double z = catenoid_nearest_param(a_, T_, x[0], x[1]);
    return {a_ * std::cosh(z / a_), z, 0.0};
  }
  void curvature_at(const Vec& y, std::array<double, 2>& kappa) const override {
    const double k = 1.0 / (a_ * sq(std::cosh(y[1] / a_)));
    kappa = {-k, k};
  }
  Vec outward_normal(const Vec& y) const override {
    const double ch = std::cosh(y[1] / a_), sh = std::sinh(y[1] / a_);
    return {1.0 / ch, -sh / ch, 0.0};
  }
  bool fill_rho_bar(BoundarySample& s) const override {
    const double z = s.point[1];
    const double ch = std::cosh(z / a_), sh = std::sinh(z / a_);
    const double t_axis = a_ * ch * ch;
    double t_face = kInf;
    if (std::fabs(sh) > 1e-300)
      t_face = (T_ / 2.0 - std::fabs(z)) * ch / std::fabs(sh);
    s.rho_bar = std::min(t_axis, t_face);
    s.censored = t_face < t_axis;
    return true;
  }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    m = std::max(m, 32);
    std::vector<BoundarySample> out;
    out.reserve(m);
    const double dz = T_ / m;
    for (int j = 0; j < m; ++j) {
      const double z = -T_ / 2.0 + (j + 0.5) * dz;
      const double ch = std::cosh(z / a_);
      BoundarySample s;
      s.point = {a_ * ch, z, 0.0};
      s.normal = outward_normal(s.point);
      curvature_at(s.point, s.kappa);
      s.n = 2;
      s.H = 0.0;
      s.dH = 0.0;
      s.spacing = dz * ch;
      out.push_back(s);
    }
    return out;
  }
  double thinnest_feature() const override { return std::min(2.0 * a_, T_); }
  double diameter() const override {
    const double smax = a_ * std::cosh(T_ / (2.0 * a_));
    return std::sqrt(sq(2.0 * smax) + sq(T_));
  }
  double volume() const override {
    return kPi * a_ * a_ * (T_ / 2.0 + a_ / 2.0 * std::sinh(T_ / a_));
  }
  double interior_radius() const override { return std::min(a_, T_ / 2.0); }

 private:
  double a_, T_;
};

class EllipsoidShellDomain final : public DomainBase {
 public:
  EllipsoidShellDomain(DomainSpec spec, double ao, double bo, double ai, double bi)
      : DomainBase(std::move(spec)), ao_(ao), bo_(bo), ai_(ai), bi_(bi) {}

  int ambient_dim() const override { return 2; }
  int grid_dim() const override { return 2; }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = {-ao_, -bo_, 0.0};
    hi = {ao_, bo_, 0.0};
  }
  bool inside(const Vec& x) const override {
    return quad(x, ao_, bo_) < 1.0 && quad(x, ai_, bi_) > 1.0;
  }
  double exact_delta(const Vec& x) const override {
    return std::min(dist_to(x, ao_, bo_), dist_to(x, ai_, bi_));
  }
  Vec nearest_boundary(const Vec& x) const override {
    const Vec yo = foot(x, ao_, bo_), yi = foot(x, ai_, bi_);
    return norm(x - yo) <= norm(x - yi) ? yo : yi;
  }
  void curvature_at(const Vec& y, std::array<double, 2>& kappa) const override {
    const bool outer = quad(y, 0.5 * (ao_ + ai_), 0.5 * (bo_ + bi_)) > 1.0;
    const double A = outer ? ao_ : ai_, B = outer ? bo_ : bi_;
    const double t = ellipse_nearest_param(A, B, y[0], y[1]);
    const double w = sq(A * std::sin(t)) + sq(B * std::cos(t));
    const double k = A * B / std::pow(w, 1.5);
    kappa = {outer ? k : -k, 0.0};
  }
  Vec outward_normal(const Vec& y) const override {
    const bool outer = quad(y, 0.5 * (ao_ + ai_), 0.5 * (bo_ + bi_)) > 1.0;
    const double A = outer ? ao_ : ai_, B = outer ? bo_ : bi_;
    Vec g{y[0] / (A * A), y[1] / (B * B), 0.0};
    g = normalized(g);
    return outer ? g : -1.0 * g;
  }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    m = std::max(m, 128);
    const double po = ellipse_perimeter(ao_, bo_), pi_len = ellipse_perimeter(ai_, bi_);
    const int mo = std::max(64, (int)std::lround(m * po / (po + pi_len)));
    const int mi = std::max(64, m - mo);
    std::vector<BoundarySample> out;
    out.reserve(mo + mi);
    ring(out, ao_, bo_, mo, true);
    ring(out, ai_, bi_, mi, false);
    return out;
  }
  double thinnest_feature() const override {
    return std::min({ao_ - ai_, bo_ - bi_, 2.0 * std::min(ai_, bi_)});
  }
  double diameter() const override { return 2.0 * std::max(ao_, bo_); }
  double volume() const override { return kPi * (ao_ * bo_ - ai_ * bi_); }

 private:
  static double quad(const Vec& x, double A, double B) {
    return sq(x[0] / A) + sq(x[1] / B);
  }
  static Vec foot(const Vec& x, double A, double B) {
    const double t = ellipse_nearest_param(A, B, x[0], x[1]);
    return {A * std::cos(t), B * std::sin(t), 0.0};
  }
  static double dist_to(const Vec& x, double A, double B) {
    return norm(x - foot(x, A, B));
  }
  void ring(std::vector<BoundarySample>& out, double A, double B, int k,
            bool outer) const {
    for (int j = 0; j < k; ++j) {
      const double t = 2.0 * kPi * (j + 0.5) / k;
      const double st = std::sin(t), ct = std::cos(t);
      const double w = sq(A * st) + sq(B * ct);
      const double speed = std::sqrt(w);
      BoundarySample s;
      s.point = {A * ct, B * st, 0.0};
      Vec g{s.point[0] / (A * A), s.point[1] / (B * B), 0.0};
      g = normalized(g);
      s.normal = outer ? g : -1.0 * g;
      const double kap = A * B / std::pow(w, 1.5);
      s.kappa = {outer ? kap : -kap, 0.0};
      s.n = 1;
      s.H = s.kappa[0];
      const double dkdt = 3.0 * A * B * std::fabs((A * A - B * B) * st * ct) /
                          std::pow(w, 2.5);
      s.dH = dkdt / speed;
      s.spacing = speed * 2.0 * kPi / k;
      out.push_back(s);
    }
  }

  double ao_, bo_, ai_, bi_;
};

// Level-set domain {F < 0} clipped to a bounding box. No closed-form
// geometry: distances and normals come from gradient-flow projection onto
// {F = 0}, curvatures from finite-difference Hessians of F.
class ImplicitDomain final : public DomainBase {
 public:
  ImplicitDomain(DomainSpec spec, Expr f, int dim)
      : DomainBase(std::move(spec)), f_(std::move(f)), dim_(dim) {
    lo_ = spec_.bbox_lo;
    hi_ = spec_.bbox_hi;
    double ext = 0.0;
    for (int a = 0; a < dim_; ++a) ext = std::max(ext, hi_[a] - lo_[a]);
    fd_ = 1e-5 * ext;
    truncated_ = scan_faces();
  }

  int ambient_dim() const override { return dim_; }
  int grid_dim() const override { return dim_; }
  bool analytic() const override { return false; }
  void bounding_box(Vec& lo, Vec& hi) const override {
    lo = lo_;
    hi = hi_;
  }
  bool inside(const Vec& x) const override {
    for (int a = 0; a < dim_; ++a)
      if (x[a] <= lo_[a] || x[a] >= hi_[a]) return false;
    return eval(x) < 0.0;
  }
  bool truncated() const override { return truncated_; }
  double truncation_distance(const Vec& x) const override {
    if (!truncated_) return kInf;
    double d = kInf;
    for (int a = 0; a < dim_; ++a)
      d = std::min({d, x[a] - lo_[a], hi_[a] - x[a]});
    return d;
  }
  // Approximate distance via gradient-flow projection; adequate for seeding
  // narrow-band values near the boundary.
  double exact_delta(const Vec& x) const override {
    const Vec y = project(x);
    const double d = norm(x - y);
    return eval(x) < 0.0 ? d : -d;
  }
  Vec nearest_boundary(const Vec& x) const override { return project(x); }
  void curvature_at(const Vec& y, std::array<double, 2>& kappa) const override {
    Vec g = grad(y);
    const double gn = std::max(norm(g), 1e-14);
    double Hm[3][3];
    hess(y, Hm);
    if (dim_ == 2) {
      kappa[0] = (Hm[0][0] * g[1] * g[1] - 2.0 * Hm[0][1] * g[0] * g[1] +
                  Hm[1][1] * g[0] * g[0]) /
                 (gn * gn * gn);
      kappa[1] = 0.0;
      return;
    }
    // Shape operator: project the Hessian onto the tangent plane and take its
    // two nonzero eigenvalues from trace and determinant.
    Vec n = (1.0 / gn) * g;
    double P[3][3], M[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) P[i][j] = (i == j ? 1.0 : 0.0) - n[i] * n[j];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) v += P[i][k] * Hm[k][l] * P[l][j];
        M[i][j] = v / gn;
      }
    const double tr = M[0][0] + M[1][1] + M[2][2];
    double tr2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tr2 += M[i][j] * M[j][i];
    const double det2 = 0.5 * (tr * tr - tr2);  // product of the two curvatures
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det2));
    kappa[0] = 0.5 * (tr - disc);
    kappa[1] = 0.5 * (tr + disc);
  }
  Vec outward_normal(const Vec& y) const override { return normalized(grad(y)); }
  std::vector<BoundarySample> boundary_samples(int m) const override {
    std::vector<BoundarySample> out;
    if (dim_ == 2) {
      const int n = std::clamp(m / 4, 64, 1024);
      lattice_2d(n, out);
    } else {
      const int n = std::clamp((int)std::sqrt(m / 3.0), 24, 128);
      lattice_3d(n, out);
    }
    return out;
  }
  double thinnest_feature() const override { return -1.0; }  // unknown, pre-check skipped

 private:
  double eval(const Vec& x) const { return f_.eval(x[0], x[1], x[2]); }
  Vec grad(const Vec& x) const {
    Vec g{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
      Vec xp = x, xm = x;
      xp[a] += fd_;
      xm[a] -= fd_;
      g[a] = (eval(xp) - eval(xm)) / (2.0 * fd_);
    }
    return g;
  }
  void hess(const Vec& x, double H[3][3]) const {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) H[i][j] = 0.0;
    const double f0 = eval(x);
    for (int a = 0; a < dim_; ++a) {
      Vec xp = x, xm = x;
      xp[a] += fd_;
      xm[a] -= fd_;
      H[a][a] = (eval(xp) - 2.0 * f0 + eval(xm)) / (fd_ * fd_);
      for (int b = a + 1; b < dim_; ++b) {
        Vec pp = x, pm = x, mp = x, mm = x;
        pp[a] += fd_; pp[b] += fd_;
        pm[a] += fd_; pm[b] -= fd_;
        mp[a] -= fd_; mp[b] += fd_;
        mm[a] -= fd_; mm[b] -= fd_;
        H[a][b] = H[b][a] =
            (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * fd_ * fd_);
      }
    }
  }
  Vec project(const Vec& x) const {
    Vec y = x;
    for (int it = 0; it < 12; ++it) {
      const double v = eval(y);
      const Vec g = grad(y);
      const double g2 = std::max(dot(g, g), 1e-28);
      y = y - (v / g2) * g;
    }
    return y;
  }
  bool scan_faces() const {
    const int n = 24;
    for (int a = 0; a < dim_; ++a) {
      for (int face = 0; face < 2; ++face) {
        for (int i = 0; i <= n; ++i) {
          for (int j = 0; j <= (dim_ == 3 ? n : 0); ++j) {
            Vec x = lo_;
            x[a] = face ? hi_[a] : lo_[a];
            const int u = (a + 1) % dim_, v = (a + 2) % dim_;
            x[u] = lo_[u] + (hi_[u] - lo_[u]) * i / n;
            if (dim_ == 3) x[v] = lo_[v] + (hi_[v] - lo_[v]) * j / n;
            if (eval(x) < 0.0) return true;
          }
        }
      }
    }
    return false;
  }
  void push_sample(const Vec& p, double spacing, std::vector<BoundarySample>& out) const {
    const Vec y = project(p);
    BoundarySample s;
    s.point = y;
    s.normal = normalized(grad(y));
    curvature_at(y, s.kappa);
    s.n = dim_ - 1;
    s.H = s.n == 1 ? s.kappa[0] : s.kappa[0] + s.kappa[1];
    s.dH = -1.0;
    s.spacing = spacing;
    out.push_back(s);
  }
  void lattice_2d(int n, std::vector<BoundarySample>& out) const {
    const double hx = (hi_[0] - lo_[0]) / n, hy = (hi_[1] - lo_[1]) / n;
    std::vector<double> vals((n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        vals[i * (n + 1) + j] =
            eval({lo_[0] + hx * i, lo_[1] + hy * j, 0.0});
    auto at = [&](int i, int j) { return vals[i * (n + 1) + j]; };
    const double spacing = 1.5 * std::max(hx, hy);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        if (i < n && at(i, j) * at(i + 1, j) < 0.0) {
          const double t = at(i, j) / (at(i, j) - at(i + 1, j));
          push_sample({lo_[0] + hx * (i + t), lo_[1] + hy * j, 0.0}, spacing, out);
        }
        if (j < n && at(i, j) * at(i, j + 1) < 0.0) {
          const double t = at(i, j) / (at(i, j) - at(i, j + 1));
          push_sample({lo_[0] + hx * i, lo_[1] + hy * (j + t), 0.0}, spacing, out);
        }
      }
    }
  }
  void lattice_3d(int n, std::vector<BoundarySample>& out) const {
    const Vec h{(hi_[0] - lo_[0]) / n, (hi_[1] - lo_[1]) / n, (hi_[2] - lo_[2]) / n};
    const double spacing = 1.8 * std::max({h[0], h[1], h[2]});
    auto val = [&](int i, int j, int k) {
      return eval({lo_[0] + h[0] * i, lo_[1] + h[1] * j, lo_[2] + h[2] * k});
    };
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        double prev = val(i, j, 0);
        for (int k = 0; k < n; ++k) {
          const double next = val(i, j, k + 1);
          if (prev * next < 0.0) {
            const double t = prev / (prev - next);
            push_sample({lo_[0] + h[0] * i, lo_[1] + h[1] * j,
                         lo_[2] + h[2] * (k + t)},
                        spacing, out);
          }
          prev = next;
        }
      }
    }
  }

  Expr f_;
  int dim_;
  Vec lo_{0, 0, 0}, hi_{0, 0, 0};
  double fd_ = 1e-6;
  bool truncated_ = false;
};

[[noreturn]] void bad_domain(const std::string& kind, const std::string& what) {
  throw ConfigurationError("domain '" + kind + "': " + what);
}

}  // namespace

double DomainSpec::get(const std::string& key, double fallback) const {
  for (const auto& [k, v] : num)
    if (k == key) return v;
  return fallback;
}

bool DomainSpec::has(const std::string& key) const {
  for (const auto& [k, v] : num)
    if (k == key) return true;
  return false;
}

std::unique_ptr<Domain> make_domain(const DomainSpec& spec) {
  const std::string& kind = spec.kind;
  if (kind == "ball") {
    const double R = spec.get("radius", 1.0);
    const int dim = spec.dim ? spec.dim : 2;
    if (R <= 0.0) bad_domain(kind, "radius must be positive");
    if (dim != 2 && dim != 3) bad_domain(kind, "dim must be 2 or 3");
    return std::make_unique<BallDomain>(spec, R, dim);
  }
  if (kind == "torus") {
    const double r = spec.get("r", 1.0), R = spec.get("R", 2.0);
    if (r <= 0.0 || R <= r) bad_domain(kind, "need 0 < r < R");
    return std::make_unique<TorusDomain>(spec, r, R);
  }
  if (kind == "annulus") {
    const double rin = spec.get("r_in", 0.5), rout = spec.get("r_out", 1.0);
    if (rin <= 0.0 || rout <= rin) bad_domain(kind, "need 0 < r_in < r_out");
    return std::make_unique<AnnulusDomain>(spec, rin, rout);
  }
  if (kind == "box") {
    Vec side{spec.get("a", 1.0), spec.get("b", 1.0), spec.get("c", 0.0)};
    const int dim = (spec.dim == 3 || spec.has("c")) ? 3 : 2;
    for (int a = 0; a < dim; ++a)
      if (side[a] <= 0.0) bad_domain(kind, "sides must be positive");
    return std::make_unique<BoxDomain>(spec, side, dim);
  }
  if (kind == "paraboloid_cap") {
    const double c = spec.get("curv", 1.0), height = spec.get("height", 1.0);
    const int dim = spec.dim ? spec.dim : 2;
    if (c <= 0.0 || height <= 0.0) bad_domain(kind, "curv and height must be positive");
    if (dim != 2 && dim != 3) bad_domain(kind, "dim must be 2 or 3");
    return std::make_unique<ParaboloidDomain>(spec, c, height, dim);
  }
  if (kind == "catenoid_slab") {
    const double a = spec.get("neck", 1.0), T = spec.get("thickness", 2.0);
    if (a <= 0.0 || T <= 0.0) bad_domain(kind, "neck and thickness must be positive");
    return std::make_unique<CatenoidDomain>(spec, a, T);
  }
  if (kind == "ellipsoid_shell") {
    const double ao = spec.get("a_out", 2.0), bo = spec.get("b_out", 1.0);
    const double ai = spec.get("a_in", 1.0), bi = spec.get("b_in", 0.5);
    if (ai <= 0.0 || bi <= 0.0 || ao <= ai || bo <= bi)
      bad_domain(kind, "need nested positive semi-axes (a_in < a_out, b_in < b_out)");
    if (spec.dim == 3)
      bad_domain(kind, "only the planar shell is supported; use an implicit level set in 3D");
    return std::make_unique<EllipsoidShellDomain>(spec, ao, bo, ai, bi);
  }
  if (kind == "implicit") {
    if (spec.levelset.empty()) bad_domain(kind, "missing levelset expression");
    const int dim = spec.dim ? spec.dim : 2;
    if (dim != 2 && dim != 3) bad_domain(kind, "dim must be 2 or 3");
    for (int a = 0; a < dim; ++a)
      if (!(spec.bbox_hi[a] > spec.bbox_lo[a]))
        bad_domain(kind, "bounding box is empty");
    try {
      Expr f = Expr::parse(spec.levelset);
      return std::make_unique<ImplicitDomain>(spec, std::move(f), dim);
    } catch (const ExprError& e) {
      bad_domain(kind, std::string("levelset parse error: ") + e.what());
    }
  }
  bad_domain(kind, "unknown kind");
}

ConvexityReport convexity_report(const Domain& dom, int resolution, double tol) {
  int m;
  if (dom.grid_dim() == 3)
    m = std::clamp(resolution * resolution / 2, 2048, 60000);
  else
    m = std::clamp(4 * resolution, 512, 60000);
  std::vector<BoundarySample> samples = dom.boundary_samples(m);
  if (samples.empty())
    throw InvariantViolation("convexity report: no boundary samples for kind '" +
                             dom.kind() + "'");

  // Neighbor-based margin for samples without a curvature derivative.
  std::vector<double> margin(samples.size(), 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].dH >= 0.0) {
      margin[i] = samples[i].dH * samples[i].spacing / 2.0;
      continue;
    }
    const std::size_t stride = std::max<std::size_t>(1, samples.size() / 2000);
    double worst = 0.0, best_d = kInf;
    for (std::size_t j = 0; j < samples.size(); j += stride) {
      if (j == i) continue;
      const double d = norm(samples[i].point - samples[j].point);
      if (d < best_d) best_d = d;
      if (d <= 2.5 * samples[i].spacing)
        worst = std::max(worst, std::fabs(samples[i].H - samples[j].H));
    }
    margin[i] = worst;
  }

  ConvexityReport rep;
  rep.samples = (int)samples.size();
  rep.tol = tol;
  double H0 = kInf, kappa0 = kInf;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double hval = samples[i].H - margin[i];
    if (hval < H0) {
      H0 = hval;
      rep.witness = samples[i].point;
    }
    for (int k = 0; k < samples[i].n; ++k)
      kappa0 = std::min(kappa0, std::fabs(samples[i].kappa[k]));
  }
  rep.H0 = H0;
  rep.kappa0 = kappa0;
  rep.weakly_mean_convex = H0 >= -tol;
  return rep;
}

Grid make_grid(const Domain& dom, int resolution, int pad) {
  if (resolution < 4) throw ConfigurationError("grid resolution must be >= 4");
  Vec lo, hi;
  dom.bounding_box(lo, hi);
  const int nd = dom.grid_dim();
  double L = 0.0;
  for (int a = 0; a < nd; ++a) L = std::max(L, hi[a] - lo[a]);
  const double h = L / resolution;

  const double feature = dom.thinnest_feature();
  if (feature > 0.0 && feature / h < 8.0 - 1e-12) {
    throw ConfigurationError(
        "grid too coarse for domain '" + dom.kind() + "': thinnest feature " +
        std::to_string(feature) + " spans " + std::to_string(feature / h) +
        " cells at resolution " + std::to_string(resolution) +
        ", need at least 8");
  }

  Grid g;
  g.ndim = nd;
  g.h = h;
  g.measure = dom.measure();
  for (int a = 0; a < 3; ++a) {
    if (a < nd) {
      g.dims[a] = (int)std::ceil((hi[a] - lo[a]) / h - 1e-9) + 2 * pad;
      g.origin[a] = lo[a] + (0.5 - pad) * h;
    } else {
      g.dims[a] = 1;
      g.origin[a] = 0.0;
    }
  }
  g.inside.assign(g.size(), 0);
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    g.inside[idx] = dom.inside(g.center(idx)) ? 1 : 0;
  return g;
}

}  // namespace hardygeo
