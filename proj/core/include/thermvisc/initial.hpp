#pragma once

#include <cstdint>

#include "thermvisc/config.hpp"
#include "thermvisc/grid.hpp"

namespace thermvisc {

template <int D>
struct InitialFields {
  Field v;      // D components
  Field F;      // D*D components
  Field theta;  // 1 component
};

// Raw (unregularised) initial profiles described by cfg.initial. Random
// profiles draw from std::mt19937_64 seeded with cfg.seed.
template <int D>
InitialFields<D> build_initial_fields(const SimConfig& cfg, const Grid<D>& g);

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace thermvisc
