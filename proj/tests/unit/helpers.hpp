#pragma once

#include <cmath>

#include "core/cable.hpp"

namespace testutil {

/// The reference coax used throughout: RG58-like, 1.5 m.
inline kljn::CableSpec reference_cable() { return kljn::preset_cable("rg58-1m5"); }

/// Same cable with the series loss removed (domain of the wave oracle).
inline kljn::CableSpec lossless_cable() {
  kljn::CableSpec spec = reference_cable();
  spec.resistance_per_meter = 0.0;
  return spec;
}

inline double rel(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

} // namespace testutil
