#include "hardygeo/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hardygeo/config.hpp"

namespace hardygeo {
namespace {

constexpr double kMissing = 1e29;

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  return out;
}

std::uint64_t to_le(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xffu);
    bits = r;
  }
  return bits;
}

double from_le(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xffu);
    bits = r;
  }
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

std::string write_pgm(const std::string& path, const Grid& grid,
                      const std::vector<double>& field, int slice_axis,
                      int slice_index) {
  if (field.size() != grid.size())
    throw ConfigurationError("write_pgm: field does not match the grid");
  int ax = 0, ay = 1;
  int fixed_axis = -1, fixed_index = 0;
  if (grid.ndim == 3) {
    if (slice_axis < 0 || slice_axis > 2)
      throw ConfigurationError("write_pgm: slice axis must be 0, 1 or 2");
    fixed_axis = slice_axis;
    fixed_index = slice_index < 0 ? grid.dims[slice_axis] / 2 : slice_index;
    if (fixed_index < 0 || fixed_index >= grid.dims[slice_axis])
      throw ConfigurationError("write_pgm: slice index out of range");
    ax = slice_axis == 0 ? 1 : 0;
    ay = slice_axis == 2 ? 1 : 2;
  }
  const int nx = grid.dims[ax], ny = grid.dims[ay];

  auto cell = [&](int u, int v) {
    int c[3] = {0, 0, 0};
    c[ax] = u;
    c[ay] = v;
    if (fixed_axis >= 0) c[fixed_axis] = fixed_index;
    return field[grid.index(c[0], c[1], c[2])];
  };

  double lo = 0.0, hi = 0.0;
  bool seen = false;
  for (int v = 0; v < ny; ++v)
    for (int u = 0; u < nx; ++u) {
      const double x = cell(u, v);
      if (!std::isfinite(x) || std::fabs(x) >= kMissing) continue;
      if (!seen) {
        lo = hi = x;
        seen = true;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  const double span = hi > lo ? hi - lo : 1.0;

  std::ofstream out = open_out(path, false);
  out << "P2\n" << nx << " " << ny << "\n65535\n";
  for (int v = 0; v < ny; ++v) {
    for (int u = 0; u < nx; ++u) {
      const double x = cell(u, v);
      long pix = 0;
      if (seen && std::isfinite(x) && std::fabs(x) < kMissing)
        pix = std::lround((x - lo) / span * 65535.0);
      out << std::min(65535L, std::max(0L, pix));
      out << (u + 1 == nx ? '\n' : ' ');
    }
  }
  if (!out) throw ConfigurationError("write_pgm: write failed for '" + path + "'");

  const std::string sidecar = path + ".range.txt";
  std::ofstream sc = open_out(sidecar, false);
  sc.precision(17);
  sc << "min " << lo << "\nmax " << hi << "\nwidth " << nx << "\nheight " << ny
     << "\n";
  return sidecar;
}

void write_field_binary(const std::string& path, const Grid& grid,
                        const std::vector<double>& field) {
  if (field.size() != grid.size())
    throw ConfigurationError("write_field_binary: field does not match the grid");
  std::ofstream out = open_out(path, true);
  std::ostringstream head;
  head.precision(17);
  head << "hardygeo-field 1\n";
  head << "ndim " << grid.ndim << "\n";
  head << "dims " << grid.dims[0] << " " << grid.dims[1] << " " << grid.dims[2]
       << "\n";
  head << "spacing " << grid.h << "\n";
  head << "origin " << grid.origin[0] << " " << grid.origin[1] << " "
       << grid.origin[2] << "\n";
  head << "measure "
       << (grid.measure == Measure::kCylindrical ? "cylindrical" : "cartesian")
       << "\n";
  head << "data\n";
  const std::string h = head.str();
  out.write(h.data(), (std::streamsize)h.size());
  for (double v : field) {
    const std::uint64_t bits = to_le(v);
    out.write(reinterpret_cast<const char*>(&bits), 8);
  }
  if (!out)
    throw ConfigurationError("write_field_binary: write failed for '" + path + "'");
}

void read_field_binary(const std::string& path, Grid& grid,
                       std::vector<double>& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open '" + path + "'");
  std::string line;
  auto bad = [&](const std::string& what) {
    throw ConfigurationError(path + ": " + what);
  };
  if (!std::getline(in, line) || line != "hardygeo-field 1")
    bad("not a hardygeo field file");
  grid = Grid{};
  while (std::getline(in, line)) {
    if (line == "data") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "ndim") {
      ls >> grid.ndim;
    } else if (key == "dims") {
      ls >> grid.dims[0] >> grid.dims[1] >> grid.dims[2];
    } else if (key == "spacing") {
      ls >> grid.h;
    } else if (key == "origin") {
      ls >> grid.origin[0] >> grid.origin[1] >> grid.origin[2];
    } else if (key == "measure") {
      std::string m;
      ls >> m;
      grid.measure = m == "cylindrical" ? Measure::kCylindrical : Measure::kCartesian;
    } else {
      bad("unknown header key '" + key + "'");
    }
    if (!ls) bad("malformed header line '" + line + "'");
  }
  if (grid.ndim < 2 || grid.ndim > 3 || grid.dims[0] <= 0 || grid.dims[1] <= 0 ||
      grid.dims[2] <= 0 || !(grid.h > 0.0))
    bad("incomplete header");
  const std::size_t n =
      (std::size_t)grid.dims[0] * grid.dims[1] * grid.dims[2];
  field.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), 8)) bad("truncated data block");
    field[i] = from_le(bits);
  }
}

void write_history_csv(const std::string& path,
                       const std::vector<double>& history) {
  std::ofstream out = open_out(path, false);
  out.precision(17);
  out << "iter,value\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out << i << "," << history[i] << "\n";
  if (!out)
    throw ConfigurationError("write_history_csv: write failed for '" + path + "'");
}

}  // namespace hardygeo
