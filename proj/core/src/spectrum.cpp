#include "bautin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bautin/errors.hpp"
#include "bautin/format.hpp"

namespace bautin {

CharacteristicCoefficients CharacteristicCoefficients::from(const ModelParams& params) {
  return {params.delta, linearization_coefficient(params).b1, params.k, params.r};
}

std::complex<double> char_residual(std::complex<double> lambda,
                                   const CharacteristicCoefficients& c) {
  return lambda + c.delta + c.b1 - c.k * c.b1 * std::exp(-lambda * c.r);
}

std::complex<double> char_residual(std::complex<double> lambda, const ModelParams& params) {
  return char_residual(lambda, CharacteristicCoefficients::from(params));
}

Eigenvalue leading_root(const CharacteristicCoefficients& c, std::complex<double> guess,
                        const NewtonOptions& options) {
  std::complex<double> z = guess;
  std::complex<double> f = char_residual(z, c);
  double norm = std::abs(f);
  for (int it = 0; it < options.max_iterations && norm >= options.tolerance; ++it) {
    const std::complex<double> df = 1.0 + c.r * c.k * c.b1 * std::exp(-z * c.r);
    if (df == 0.0) {
      break;
    }
    std::complex<double> step = f / df;
    // Halve until the residual decreases; a handful of halvings is enough
    // for the entire characteristic function near its leading roots.
    std::complex<double> trial = z - step;
    std::complex<double> f_trial = char_residual(trial, c);
    for (int halvings = 0; std::abs(f_trial) >= norm && halvings < 30; ++halvings) {
      step *= 0.5;
      trial = z - step;
      f_trial = char_residual(trial, c);
    }
    if (std::abs(f_trial) >= norm) {
      break;  // stalled at rounding level
    }
    z = trial;
    f = f_trial;
    norm = std::abs(f);
  }
  // Near |f'| ~ 0.2 a residual just under tolerance still leaves ~5e-12 in
  // the root; two more full steps reach rounding level.
  for (int extra = 0; extra < 2 && norm < options.tolerance && norm > 0.0; ++extra) {
    const std::complex<double> df = 1.0 + c.r * c.k * c.b1 * std::exp(-z * c.r);
    const std::complex<double> trial = z - f / df;
    const std::complex<double> f_trial = char_residual(trial, c);
    if (!(std::abs(f_trial) < norm)) {
      break;
    }
    z = trial;
    f = f_trial;
    norm = std::abs(f);
  }
  if (!(norm < options.tolerance)) {
    throw ConvergenceError("characteristic root did not converge (residual " +
                               format_double(norm) + ")",
                           z.real(), z.imag(), norm);
  }
  return {z.real(), std::abs(z.imag())};
}

Eigenvalue leading_root(const ModelParams& params, std::optional<std::complex<double>> guess,
                        const NewtonOptions& options) {
  const auto coeffs = CharacteristicCoefficients::from(params);
  if (!guess) {
    const double disc = coeffs.k * coeffs.b1 * coeffs.k * coeffs.b1 -
                        (coeffs.delta + coeffs.b1) * (coeffs.delta + coeffs.b1);
    guess = disc > 0.0 ? std::complex<double>(0.0, std::sqrt(disc)) : std::complex<double>(0.0);
  }
  return leading_root(coeffs, *guess, options);
}

HopfPoint hopf_r_from_coefficients(double delta, double b1, double k) {
  const double kb1 = k * b1;
  const double disc = kb1 * kb1 - (delta + b1) * (delta + b1);
  if (!(disc > 0.0)) {
    throw NoHopfError("no purely imaginary root at delta=" + format_double(delta) +
                      ": (k B1)^2 - (delta + B1)^2 = " + format_double(disc));
  }
  const double omega = std::sqrt(disc);
  const double theta = std::acos(std::clamp((delta + b1) / kb1, -1.0, 1.0));
  // The imaginary part requires k B1 sin(omega r) = -omega. The principal
  // branch theta in [0, pi] has sin >= 0, so it fits only when k B1 < 0.
  const double angle = kb1 < 0.0 ? theta : 2.0 * std::numbers::pi - theta;
  return {delta, angle / omega, omega};
}

HopfPoint hopf_r(double delta, const ModelParams& rest) {
  ModelParams p = rest;
  p.delta = delta;
  return hopf_r_from_coefficients(delta, linearization_coefficient(p).b1, p.k);
}

std::vector<HopfSample> hopf_curve(double delta_lo, double delta_hi, int n_samples,
                                   const ModelParams& rest) {
  if (n_samples < 1) {
    throw DomainError("hopf_curve: n_samples must be >= 1");
  }
  if (n_samples > 1 && !(delta_lo < delta_hi)) {
    throw DomainError("hopf_curve: delta_lo must be < delta_hi");
  }
  std::vector<HopfSample> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  bool any = false;
  for (int i = 0; i < n_samples; ++i) {
    HopfSample s;
    s.delta = n_samples == 1 ? delta_lo
                             : delta_lo + (delta_hi - delta_lo) * i / (n_samples - 1);
    try {
      s.point = hopf_r(s.delta, rest);
      any = true;
    } catch (const Error& e) {
      s.failure = e.what();
    }
    samples.push_back(std::move(s));
  }
  if (!any) {
    samples.clear();
  }
  return samples;
}

void write_hopf_csv(std::ostream& out, std::span<const HopfSample> samples) {
  out << "delta,r_star,omega_star\n";
  for (const auto& s : samples) {
    if (!s.point) {
      continue;
    }
    out << format_double(s.point->delta) << ',' << format_double(s.point->r_star) << ','
        << format_double(s.point->omega_star) << '\n';
  }
}

}  // namespace bautin
