#include "bautin/model.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "bautin/errors.hpp"

namespace bautin {

namespace {

double hill(double x, double n) { return std::pow(x, n); }

}  // namespace

void validate(const ModelParams& params) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("parameter ") + name + " must be a positive finite number");
    }
  };
  positive(params.beta0, "beta0");
  positive(params.n, "n");
  positive(params.delta, "delta");
  positive(params.k, "k");
  positive(params.r, "r");
  if (!(params.k < 2.0)) {
    throw DomainError("parameter k must be < 2");
  }
}

double beta(double x, const ModelParams& params) {
  if (x < 0.0 || std::isnan(x)) {
    throw DomainError("beta: state must be nonnegative, got " + std::to_string(x));
  }
  return params.beta0 / (1.0 + hill(x, params.n));
}

double beta_prime(double x, const ModelParams& params) {
  if (x < 0.0 || std::isnan(x)) {
    throw DomainError("beta_prime: state must be nonnegative, got " + std::to_string(x));
  }
  if (x == 0.0) {
    // x^(n-1) blows up for n < 1; the product x beta'(x) still vanishes.
    return params.n == 1.0 ? -params.beta0 : (params.n > 1.0 ? 0.0 : -INFINITY);
  }
  const double xn = hill(x, params.n);
  const double denom = 1.0 + xn;
  return -params.beta0 * params.n * xn / x / (denom * denom);
}

double rhs(double x_now, double x_delayed, const ModelParams& params) {
  return -(beta(x_now, params) + params.delta) * x_now +
         params.k * beta(x_delayed, params) * x_delayed;
}

bool feasible(const ModelParams& params) {
  return (params.beta0 / params.delta) * (params.k - 1.0) - 1.0 > 0.0;
}

double nontrivial_equilibrium(const ModelParams& params) {
  const double base = (params.beta0 / params.delta) * (params.k - 1.0) - 1.0;
  if (!(base > 0.0)) {
    throw InfeasibleError("no positive nontrivial equilibrium: (beta0/delta)(k-1) - 1 = " +
                          std::to_string(base));
  }
  return std::pow(base, 1.0 / params.n);
}

std::vector<Equilibrium> equilibria(const ModelParams& params) {
  std::vector<Equilibrium> out{{0.0, EquilibriumKind::Trivial}};
  if (feasible(params)) {
    out.push_back({nontrivial_equilibrium(params), EquilibriumKind::Nontrivial});
  }
  return out;
}

LinearizationCoefficient linearization_coefficient(const ModelParams& params) {
  const double x2 = nontrivial_equilibrium(params);
  const double xn = hill(x2, params.n);
  const double denom = 1.0 + xn;
  // beta'(x2) x2 = -beta0 n x2^n / (1 + x2^n)^2
  return {params.beta0 / denom - params.beta0 * params.n * xn / (denom * denom)};
}

void to_json(nlohmann::json& j, const ModelParams& params) {
  j = nlohmann::json{{"beta0", params.beta0},
                     {"n", params.n},
                     {"delta", params.delta},
                     {"k", params.k},
                     {"r", params.r}};
}

void from_json(const nlohmann::json& j, ModelParams& params) {
  if (!j.is_object()) {
    throw DomainError("model parameters must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "beta0" && key != "n" && key != "delta" && key != "k" && key != "r") {
      throw DomainError("unknown model parameter key: " + key);
    }
    if (!value.is_number()) {
      throw DomainError("model parameter " + key + " must be a number");
    }
  }
  auto require = [&](const char* key) {
    if (!j.contains(key)) {
      throw DomainError(std::string("missing model parameter: ") + key);
    }
    return j.at(key).get<double>();
  };
  params.beta0 = require("beta0");
  params.n = require("n");
  params.delta = require("delta");
  params.k = require("k");
  params.r = require("r");
}

}  // namespace bautin
