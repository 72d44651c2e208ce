#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hardygeo/domains.hpp"
#include "hardygeo/grid.hpp"

namespace hardygeo {

constexpr double kUnsolved = 1e30;  // distance value of never-reached cells

struct DistFieldOptions {
  double angle_tol = 0.5;   // gradient/nearest divergence threshold for S
  int boundary_samples = 0; // 0 = auto from grid resolution
  bool with_ridge = true;
};

// Distance data on a grid. For catalog kinds with closed-form geometry,
// `delta`, `grad` and `nearest` are evaluated analytically per cell and the
// fast-sweeping solution is kept alongside as `delta_fsm` for validation
// (first-order eikonal output is too rough to second-difference). For
// implicit domains the eikonal solution is the primary field.
struct DistanceField {
  Grid grid;
  std::vector<double> delta;
  std::vector<double> delta_fsm;
  std::array<std::vector<double>, 3> grad;  // unit gradient of delta, per axis
  std::vector<Vec> nearest;                 // nearest boundary point N(x)
  std::vector<std::uint8_t> singular;       // near the medial set S
  std::vector<std::uint8_t> near_boundary;  // within 3 cells of the boundary
  std::vector<double> ridge_dist;           // Lambda(x) = rho_bar at N(x)'s sample
  std::vector<double> hfield;               // min(1, delta/Lambda); 1 on singular cells
  std::vector<BoundarySample> samples;      // rho_bar filled by ridge marching

  double eikonal_residual = 0.0;  // max | |grad delta_fsm| - 1 | upwind, off seeds
  double eikonal_error = -1.0;    // max |delta_fsm - exact|; -1 when no exact form
  long censored_rays = 0;
  long singular_count = 0;
  long inside_count = 0;
  double angle_tol = 0.5;

  bool usable(std::size_t idx) const {
    return grid.inside[idx] != 0 && delta[idx] < kUnsolved;
  }
};

// Fast sweeping on inside cells, seeded with exact distances in a narrow
// band near the boundary. Fills delta, delta_fsm and the residual/error
// diagnostics.
DistanceField solve_eikonal(const Domain& dom, const Grid& grid);

// Fills nearest, grad, near_boundary and the singular mask. A cell is marked
// singular when the unit gradient or the nearest point diverges from an
// inside face-neighbor by more than the cone tolerance.
void nearest_and_singular(const Domain& dom, DistanceField& f, double angle_tol);

// Boundary sampling plus inward ray marching on the singular mask: fills
// samples[].rho_bar (bisected to half-cell accuracy, censored at truncation
// or domain exit), the pulled-back ridge distance Lambda and the normalized
// depth h = min(1, delta/Lambda), with h = 1 on singular cells.
void ridge_and_h(const Domain& dom, DistanceField& f, int nsamples);

DistanceField build_distance_field(const Domain& dom, const Grid& grid,
                                   const DistFieldOptions& opt = {});

}  // namespace hardygeo
