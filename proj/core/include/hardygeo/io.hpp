#pragma once

#include <string>
#include <vector>

#include "hardygeo/grid.hpp"

namespace hardygeo {

// PGM P2 (ASCII) export of a 2D slice, row-major, linearly mapped to
// 0..65535. The true min/max land in a sidecar text file next to the image;
// its path is returned. Cells holding sentinel values (>= 1e29) are drawn as
// 0 and excluded from the range. For 3D grids, slice_axis/slice_index pick
// the plane; slice_index < 0 means the middle plane. 2D grids ignore both.
std::string write_pgm(const std::string& path, const Grid& grid,
                      const std::vector<double>& field, int slice_axis = 2,
                      int slice_index = -1);

// Flat binary little-endian float64 array with a short text header carrying
// dims, spacing, origin and the grid measure. x varies fastest.
void write_field_binary(const std::string& path, const Grid& grid,
                        const std::vector<double>& field);

// Reads a file produced by write_field_binary. The reconstructed grid has an
// empty inside mask (the format does not carry it).
void read_field_binary(const std::string& path, Grid& grid,
                       std::vector<double>& field);

// Convergence history as CSV with columns iter,value.
void write_history_csv(const std::string& path,
                       const std::vector<double>& history);

}  // namespace hardygeo
