#pragma once

// Truncated Bautin normal form u' = (b1 + i) u + b2 u|u|^2 + s u|u|^4 in
// polar coordinates: rho' = rho (b1 + b2 rho^2 + s rho^4), theta' = 1.

#include <ostream>
#include <string_view>
#include <vector>

namespace bautin {

struct NormalFormParams {
  double b1 = 0.0;
  double b2 = 0.0;
  int s = -1;  ///< sign of the second Lyapunov coefficient, +1 or -1
};

enum class CycleStability { Stable, Unstable, SemiStable };

/// Positive roots of b1 + b2 rho^2 + s rho^4 = 0, ascending.
struct CycleSet {
  std::vector<double> radii;
  std::vector<CycleStability> stability;
};

enum class Zone { Zone1, Zone2, Zone3, OnHopfAxis, OnFoldT };

std::string_view to_string(Zone zone);
std::string_view to_string(CycleStability stability);

double radial_rhs(double rho, const NormalFormParams& p);

CycleSet cycle_radii(const NormalFormParams& p);

/// Region of the s = -1 bifurcation diagram; UnsupportedError for s = +1.
Zone region_classify(const NormalFormParams& p);

struct PolarRun {
  double rho = 0.0;
  bool diverged = false;
};

/// Classical RK4 on the radial equation with a fixed step.
PolarRun integrate_polar(const NormalFormParams& p, double rho0, double t_end,
                         double step = 1e-3);

/// `b1,b2,zone` rows on an nb1 x nb2 grid (b1 varies fastest).
void write_zone_csv(std::ostream& out, double b1_lo, double b1_hi, int nb1, double b2_lo,
                    double b2_hi, int nb2);

}  // namespace bautin
