#pragma once

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hardygeo/expr.hpp"
#include "hardygeo/grid.hpp"

namespace hardygeo {

// Curvature sign convention: principal curvatures are taken with respect to
// the outward unit normal, so the unit sphere bounding the unit ball in
// R^{n+1} has kappa_i = +1 and H = sum kappa_i = n, while the inner circle of
// an annulus has kappa = -1/r_in. H is the (unnormalized) sum, never the
// average.
struct BoundarySample {
  Vec point{0, 0, 0};   // grid coordinates (axisymmetric kinds live in the (s,z) slice)
  Vec normal{0, 0, 0};  // outward unit normal
  std::array<double, 2> kappa{0.0, 0.0};
  int n = 1;            // number of principal curvatures = ambient_dim - 1
  double H = 0.0;
  double dH = -1.0;     // |dH/d(arc)| at the sample; -1 when unknown
  double spacing = 0.0; // local distance between neighboring samples
  double rho_bar = -1.0;   // ridge distance along the inward normal
  bool censored = false;   // rho_bar cut off by truncation or grid exit
};

struct ConvexityReport {
  double H0 = 0.0;      // min over samples of H minus the local variation margin
  double kappa0 = 0.0;  // min over samples of min_i |kappa_i|
  bool weakly_mean_convex = false;
  Vec witness{0, 0, 0};
  int samples = 0;
  double tol = 0.0;
};

struct DomainSpec {
  std::string kind;
  std::vector<std::pair<std::string, double>> num;  // ordered numeric parameters
  std::string levelset;                             // implicit kind
  Vec bbox_lo{0, 0, 0}, bbox_hi{0, 0, 0};           // implicit kind
  int dim = 0;  // ambient dimension for kinds supporting 2 and 3

  double get(const std::string& key, double fallback) const;
  bool has(const std::string& key) const;
};

// A domain exposes its geometry in grid coordinates. Axisymmetric 3D kinds
// (torus, catenoid slab, 3D paraboloid cap) are realized on the (s,z)
// half-plane slice with cylindrical measure; their curvature data is still
// the full ambient pair, so n = ambient_dim - 1 everywhere.
class Domain {
 public:
  virtual ~Domain() = default;

  virtual const DomainSpec& spec() const = 0;
  const std::string& kind() const { return spec().kind; }
  virtual int ambient_dim() const = 0;
  virtual int grid_dim() const = 0;
  virtual Measure measure() const { return Measure::kCartesian; }
  int n_curv() const { return ambient_dim() - 1; }

  virtual void bounding_box(Vec& lo, Vec& hi) const = 0;
  virtual bool inside(const Vec& x) const = 0;

  // Closed-form geometry; false only for the implicit kind.
  virtual bool analytic() const { return true; }
  // Distance to the true boundary, positive inside (valid near the boundary
  // also outside). Analytic kinds only.
  virtual double exact_delta(const Vec& x) const = 0;
  // Nearest point on the true boundary. Analytic kinds only.
  virtual Vec nearest_boundary(const Vec& x) const = 0;
  // Principal curvatures at a boundary point (w.r.t. the outward normal).
  virtual void curvature_at(const Vec& y, std::array<double, 2>& kappa) const = 0;
  virtual Vec outward_normal(const Vec& y) const = 0;
  double mean_curvature_at(const Vec& y) const {
    std::array<double, 2> k{};
    curvature_at(y, k);
    return n_curv() == 1 ? k[0] : k[0] + k[1];
  }

  // Closed-form ridge distance along the inward normal, for analytic-mode
  // sampling. Fills rho_bar and censored (truncation face reached first) and
  // returns true; false when no closed form is available.
  virtual bool fill_rho_bar(BoundarySample&) const { return false; }

  // Quasi-uniform boundary sampling with curvature data; m is the target
  // sample count.
  virtual std::vector<BoundarySample> boundary_samples(int m) const = 0;

  // Truncation of unbounded kinds by artificial faces.
  virtual bool truncated() const { return false; }
  // Distance from x to the nearest artificial face; +inf when none.
  virtual double truncation_distance(const Vec&) const { return 1e300; }

  // Smallest geometric feature the grid must resolve (pre: >= 8 cells).
  virtual double thinnest_feature() const = 0;

  // Reference quantities for the remainder table; -1 when no closed form
  // (grid fallbacks are used instead).
  virtual double diameter() const { return -1.0; }
  virtual double volume() const { return -1.0; }
  virtual double interior_radius() const { return -1.0; }
};

std::unique_ptr<Domain> make_domain(const DomainSpec& spec);

// Convexity classification from boundary samples. H0 subtracts a per-sample
// variation margin |dH| * spacing / 2 (estimated from neighbors when no
// derivative is available) so the verdict stays conservative under sampling;
// weakly_mean_convex iff H0 >= -tol.
ConvexityReport convexity_report(const Domain& dom, int resolution, double tol = 1e-6);

// Cell-centered grid covering the bounding box with `pad` cells of outside
// margin; resolution counts cells across the longest box extent. Throws
// ConfigurationError when the thinnest feature spans fewer than 8 cells.
Grid make_grid(const Domain& dom, int resolution, int pad = 3);

}  // namespace hardygeo
