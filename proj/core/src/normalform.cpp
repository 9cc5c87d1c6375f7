#include "bautin/normalform.hpp"

#include <algorithm>
#include <cmath>

#include "bautin/errors.hpp"
#include "bautin/format.hpp"

namespace bautin {

namespace {

void check_sign(const NormalFormParams& p) {
  if (p.s != 1 && p.s != -1) {
    throw DomainError("normal form sign s must be +1 or -1");
  }
}

// d/drho of rho (b1 + b2 rho^2 + s rho^4) at a root of the bracket.
double slope_at_root(double rho, const NormalFormParams& p) {
  return rho * (2.0 * p.b2 * rho + 4.0 * p.s * rho * rho * rho);
}

}  // namespace

std::string_view to_string(Zone zone) {
  switch (zone) {
    case Zone::Zone1:
      return "Zone1";
    case Zone::Zone2:
      return "Zone2";
    case Zone::Zone3:
      return "Zone3";
    case Zone::OnHopfAxis:
      return "OnHopfAxis";
    case Zone::OnFoldT:
      return "OnFoldT";
  }
  return "Zone1";
}

std::string_view to_string(CycleStability stability) {
  switch (stability) {
    case CycleStability::Stable:
      return "stable";
    case CycleStability::Unstable:
      return "unstable";
    case CycleStability::SemiStable:
      return "semistable";
  }
  return "stable";
}

double radial_rhs(double rho, const NormalFormParams& p) {
  if (rho < 0.0) {
    throw DomainError("radial_rhs: rho must be nonnegative");
  }
  const double r2 = rho * rho;
  return rho * (p.b1 + p.b2 * r2 + p.s * r2 * r2);
}

CycleSet cycle_radii(const NormalFormParams& p) {
  check_sign(p);
  // s w^2 + b2 w + b1 = 0 in w = rho^2.
  const double a = p.s;
  const double disc = p.b2 * p.b2 - 4.0 * a * p.b1;
  std::vector<double> w;
  if (disc == 0.0) {
    w.push_back(-p.b2 / (2.0 * a));
  } else if (disc > 0.0) {
    // Cancellation-free pair: q = -(b2 + sign(b2) sqrt(disc)) / 2.
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (p.b2 + std::copysign(sq, p.b2));
    if (q != 0.0) {
      w.push_back(q / a);
      w.push_back(p.b1 / q);
    } else {
      w.push_back(0.0);
    }
  }
  std::vector<double> radii;
  for (double v : w) {
    if (v > 0.0 && std::isfinite(v)) {
      radii.push_back(std::sqrt(v));
    }
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  CycleSet set;
  for (double rho : radii) {
    set.radii.push_back(rho);
    if (disc == 0.0) {
      set.stability.push_back(CycleStability::SemiStable);
    } else {
      set.stability.push_back(slope_at_root(rho, p) < 0.0 ? CycleStability::Stable
                                                          : CycleStability::Unstable);
    }
  }
  return set;
}

Zone region_classify(const NormalFormParams& p) {
  check_sign(p);
  if (p.s != -1) {
    throw UnsupportedError("region_classify: only the s = -1 diagram is supported");
  }
  if (p.b1 == 0.0) {
    return Zone::OnHopfAxis;
  }
  if (p.b1 > 0.0) {
    return Zone::Zone2;
  }
  if (p.b2 > 0.0) {
    const double fold = p.b2 * p.b2 + 4.0 * p.b1;
    if (fold == 0.0) {
      return Zone::OnFoldT;
    }
    if (fold > 0.0) {
      return Zone::Zone3;
    }
  }
  return Zone::Zone1;
}

PolarRun integrate_polar(const NormalFormParams& p, double rho0, double t_end, double step) {
  if (!(rho0 > 0.0)) {
    throw DomainError("integrate_polar: rho0 must be positive");
  }
  if (!(step > 0.0) || !(t_end >= 0.0)) {
    throw DomainError("integrate_polar: need step > 0 and t_end >= 0");
  }
  auto f = [&p](double rho) {
    const double r2 = rho * rho;
    return rho * (p.b1 + p.b2 * r2 + p.s * r2 * r2);
  };
  const auto n = static_cast<long>(std::ceil(t_end / step - 1e-9));
  const double h = n > 0 ? t_end / static_cast<double>(n) : 0.0;
  double rho = rho0;
  for (long i = 0; i < n; ++i) {
    const double k1 = f(rho);
    const double k2 = f(rho + 0.5 * h * k1);
    const double k3 = f(rho + 0.5 * h * k2);
    const double k4 = f(rho + h * k3);
    rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(rho) || std::abs(rho) > 1e150) {
      return {rho, true};
    }
  }
  return {rho, false};
}

void write_zone_csv(std::ostream& out, double b1_lo, double b1_hi, int nb1, double b2_lo,
                    double b2_hi, int nb2) {
  if (nb1 < 2 || nb2 < 2) {
    throw DomainError("zone raster needs at least 2 samples per axis");
  }
  out << "b1,b2,zone\n";
  for (int j = 0; j < nb2; ++j) {
    const double b2 = b2_lo + (b2_hi - b2_lo) * j / (nb2 - 1);
    for (int i = 0; i < nb1; ++i) {
      const double b1 = b1_lo + (b1_hi - b1_lo) * i / (nb1 - 1);
      out << format_double(b1) << ',' << format_double(b2) << ','
          << to_string(region_classify({b1, b2, -1})) << '\n';
    }
  }
}

}  // namespace bautin
