#pragma once

// Resting-cell equation of the periodic CML model:
//
//   x'(t) = -[beta(x(t)) + delta] x(t) + k beta(x(t-r)) x(t-r),
//   beta(x) = beta0 / (1 + x^n).

#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bautin {

/// The five model parameters (beta0, n, delta, k, r).
///
/// Infeasible combinations (no positive nontrivial equilibrium) are
/// representable so that sweeps may cross the feasibility boundary; the
/// operations that need x2 throw InfeasibleError instead.
struct ModelParams {
  double beta0 = 2.5;  ///< maximal production rate
  double n = 2.0;      ///< Hill exponent
  double delta = 0.0;  ///< decay rate
  double k = 1.01;     ///< amplification factor, k < 2
  double r = 0.0;      ///< delay

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Throws DomainError unless every field is strictly positive and k < 2.
void validate(const ModelParams& params);

enum class EquilibriumKind { Trivial, Nontrivial };

struct Equilibrium {
  double value = 0.0;
  EquilibriumKind kind = EquilibriumKind::Trivial;
};

/// B1 = beta'(x2) x2 + beta(x2), the slope of x -> x beta(x) at x2.
struct LinearizationCoefficient {
  double b1 = 0.0;
};

/// beta0 / (1 + x^n). Throws DomainError for x < 0.
double beta(double x, const ModelParams& params);

/// Derivative of beta with respect to x.
double beta_prime(double x, const ModelParams& params);

/// Right-hand side of the DDE given the current and the delayed state.
double rhs(double x_now, double x_delayed, const ModelParams& params);

/// (beta0/delta)(k-1) - 1 > 0.
bool feasible(const ModelParams& params);

/// x2 = ((beta0/delta)(k-1) - 1)^(1/n); throws InfeasibleError if !feasible.
double nontrivial_equilibrium(const ModelParams& params);

/// Equilibria sorted ascending: always 0, plus x2 when feasible.
std::vector<Equilibrium> equilibria(const ModelParams& params);

/// Analytic B1 at x2; throws InfeasibleError if !feasible.
LinearizationCoefficient linearization_coefficient(const ModelParams& params);

void to_json(nlohmann::json& j, const ModelParams& params);
/// Strict: requires exactly the keys beta0, n, delta, k, r.
void from_json(const nlohmann::json& j, ModelParams& params);

}  // namespace bautin
