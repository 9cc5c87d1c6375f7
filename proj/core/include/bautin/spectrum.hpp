#pragma once

// Characteristic equation of the linearization at x2,
//
//   lambda + delta + B1 = k B1 exp(-lambda r),
//
// its leading roots, and the Hopf curve r*(delta) on which a conjugate pair
// sits on the imaginary axis.

#include <complex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bautin/model.hpp"

namespace bautin {

/// Coefficients entering the characteristic function. Usually derived from
/// ModelParams; constructible directly to probe the equation in isolation.
struct CharacteristicCoefficients {
  double delta = 0.0;
  double b1 = 0.0;
  double k = 0.0;
  double r = 0.0;

  static CharacteristicCoefficients from(const ModelParams& params);
};

/// One member mu + i omega of a conjugate pair, normalized to omega >= 0.
struct Eigenvalue {
  double mu = 0.0;
  double omega = 0.0;

  std::complex<double> value() const { return {mu, omega}; }
};

struct HopfPoint {
  double delta = 0.0;
  double r_star = 0.0;
  double omega_star = 0.0;
};

struct NewtonOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;  ///< on |residual|
};

std::complex<double> char_residual(std::complex<double> lambda,
                                   const CharacteristicCoefficients& coeffs);

/// Throws InfeasibleError when B1 is undefined.
std::complex<double> char_residual(std::complex<double> lambda, const ModelParams& params);

/// Damped Newton polish of a characteristic root starting from `guess`.
/// Without a guess, starts from i omega*(delta) of the Hopf formula.
/// Throws ConvergenceError with the last iterate on failure.
Eigenvalue leading_root(const ModelParams& params,
                        std::optional<std::complex<double>> guess = std::nullopt,
                        const NewtonOptions& options = {});

Eigenvalue leading_root(const CharacteristicCoefficients& coeffs, std::complex<double> guess,
                        const NewtonOptions& options = {});

/// Smallest positive delay at which +-i omega* solves the characteristic
/// equation for the given delta. `rest.r` is ignored.
/// Throws NoHopfError when (k B1)^2 <= (delta + B1)^2.
HopfPoint hopf_r(double delta, const ModelParams& rest);

/// Same computation directly from B1; exposed for boundary tests.
HopfPoint hopf_r_from_coefficients(double delta, double b1, double k);

struct HopfSample {
  double delta = 0.0;
  std::optional<HopfPoint> point;
  std::string failure;  ///< why `point` is absent
};

/// `n_samples` uniformly spaced deltas in [delta_lo, delta_hi] (a single
/// sample sits at delta_lo). Samples without a Hopf point are kept and
/// flagged. Returns an empty list when no sample admits one.
std::vector<HopfSample> hopf_curve(double delta_lo, double delta_hi, int n_samples,
                                   const ModelParams& rest);

/// CSV with header `delta,r_star,omega_star`; flagged samples are skipped.
void write_hopf_csv(std::ostream& out, std::span<const HopfSample> samples);

}  // namespace bautin
