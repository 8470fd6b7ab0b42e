#pragma once

// Snapshot files: one JSON header line, then raw little-endian float64
// blocks, one per field component, in grid (row-major) order. Header
// offsets are byte offsets from the first byte after the header line.

#include <string>
#include <vector>

#include "thermvisc/grid.hpp"

namespace thermvisc {

struct Snapshot {
  int d = 0;
  int n = 0;
  double L = 0.0;
  double t = 0.0;
  std::size_t step = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> data;  // parallel to names

  const std::vector<double>& field(const std::string& name) const;
};

template <int D>
void write_snapshot(const std::string& path, const State<D>& s, const Grid<D>& g, std::size_t step);

Snapshot read_snapshot(const std::string& path);

}  // namespace thermvisc
