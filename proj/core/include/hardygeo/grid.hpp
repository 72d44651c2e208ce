#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace hardygeo {

// Points and vectors carry three components; 2D geometry leaves the third 0.
using Vec = std::array<double, 3>;

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec normalized(const Vec& a) {
  double n = norm(a);
  return n > 0 ? (1.0 / n) * a : Vec{0, 0, 0};
}

// Volume element. For axisymmetric slice grids (solid torus, catenoid slab)
// the grid lives in the (s, z) half-plane and a cell's volume carries the
// factor 2*pi*s, so slice sums equal ambient integrals of axisymmetric
// integrands. The Laplacian stencil likewise gains the d_s/s term.
enum class Measure : std::uint8_t { kCartesian, kCylindrical };

// Uniform cell-centered grid over a padded bounding box. Cells are indexed
// i + dims[0]*(j + dims[1]*k), row-major in x fastest.
struct Grid {
  int ndim = 2;
  std::array<int, 3> dims{1, 1, 1};
  double h = 0.0;
  Vec origin{0, 0, 0};  // center of cell (0,0,0)
  Measure measure = Measure::kCartesian;
  std::vector<std::uint8_t> inside;  // cell center in the open domain

  std::size_t size() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) +
                                                static_cast<std::size_t>(dims[1]) * k);
  }
  void coords(std::size_t idx, int& i, int& j, int& k) const {
    i = static_cast<int>(idx % dims[0]);
    j = static_cast<int>((idx / dims[0]) % dims[1]);
    k = static_cast<int>(idx / (static_cast<std::size_t>(dims[0]) * dims[1]));
  }
  Vec center(int i, int j, int k = 0) const {
    return {origin[0] + h * i, origin[1] + h * j, origin[2] + h * k};
  }
  Vec center(std::size_t idx) const {
    int i, j, k;
    coords(idx, i, j, k);
    return center(i, j, k);
  }
  bool in_bounds(int i, int j, int k = 0) const {
    return i >= 0 && i < dims[0] && j >= 0 && j < dims[1] && k >= 0 && k < dims[2];
  }
  // Index of the cell whose center is nearest to p; false if outside the grid.
  bool locate(const Vec& p, std::size_t& idx) const {
    int c[3] = {0, 0, 0};
    for (int a = 0; a < ndim; ++a) {
      c[a] = static_cast<int>(std::lround((p[a] - origin[a]) / h));
      if (c[a] < 0 || c[a] >= dims[a]) return false;
    }
    idx = index(c[0], c[1], c[2]);
    return true;
  }
  double cell_volume(std::size_t idx) const {
    double v = std::pow(h, ndim);
    if (measure == Measure::kCylindrical) {
      int i, j, k;
      coords(idx, i, j, k);
      v *= 2.0 * 3.14159265358979323846 * (origin[0] + h * i);
    }
    return v;
  }
  bool is_inside(std::size_t idx) const { return inside[idx] != 0; }
};

}  // namespace hardygeo
