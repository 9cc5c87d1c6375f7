#pragma once

#include "bautin/model.hpp"

namespace bautin::testing {

// beta0 = 2.5, n = 2, k = 1.01 throughout.
inline ModelParams at(double delta, double r) { return {2.5, 2.0, delta, 1.01, r}; }

inline constexpr double kBautinDelta = 0.0023073665;
inline constexpr double kBautinR = 5.301432998;

inline ModelParams p1() { return at(0.002, 5.93); }
inline ModelParams p1_prime() { return at(0.0024, 5.14); }
inline ModelParams p2() { return at(0.0024, 5.2); }
inline ModelParams p2_prime() { return at(0.0015, 7.56); }
inline ModelParams p3() { return at(0.0015, 7.55); }

}  // namespace bautin::testing
