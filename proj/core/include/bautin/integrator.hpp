#pragma once

// Method-of-steps solver for scalar DDEs with one constant delay,
//
//   x'(t) = F(x(t), x(t - r)),   x(s) = phi(s) on [-r, 0],
//
// built on the Bogacki-Shampine 3(2) pair with cubic Hermite dense output.

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bautin/model.hpp"

namespace bautin {

/// Initial segment phi on [-span, 0].
class HistoryFunction {
 public:
  enum class Source { Constant, Eigenmode, Custom };

  HistoryFunction(std::function<double(double)> phi, double span, Source source,
                  std::string description);

  static HistoryFunction constant(double value, double span);

  /// Piecewise-linear interpolation through (s_i, x_i); s must be strictly
  /// increasing, start at -span and end at 0.
  static HistoryFunction table(std::vector<double> s, std::vector<double> x);

  /// Throws DomainError for s outside [-span, 0].
  double operator()(double s) const;

  double span() const noexcept { return span_; }
  Source source() const noexcept { return source_; }
  const std::string& description() const noexcept { return description_; }

 private:
  std::function<double(double)> phi_;
  double span_;
  Source source_;
  std::string description_;
};

/// Right-hand side F(x_now, x_delayed).
using DelayedRhs = std::function<double(double x_now, double x_delayed)>;

struct IntegrationOptions {
  // The basin boundary at the zone-3 point only converges below ~1e-9.
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Upper bound on the step; 0 selects the delay. Must not exceed the delay.
  double max_step = 0.0;
  double t_end = 3000.0;
  /// When positive, every step has this size and no error control is done.
  double fixed_step = 0.0;
  /// |x| beyond this bound aborts the run.
  double divergence_bound = 1e8;
  /// Mesh points forced at m * delay for m = 1..forced_breakpoints.
  int forced_breakpoints = 4;
};

/// Dense solution on [-delay, t_end]. Immutable once handed out by the solver.
class Trajectory {
 public:
  double t0() const noexcept { return 0.0; }
  double t_end() const noexcept { return times_.back(); }
  double delay() const noexcept { return delay_; }

  /// x(t) for t in [-delay, t_end]; history queries go to the history.
  /// Exact at mesh nodes. Throws DomainError when out of range.
  double eval(double t) const;

  /// F(x(t), x(t - delay)) for t in [0, t_end].
  double eval_derivative(double t) const;

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> states() const noexcept { return states_; }
  /// F evaluated at every mesh node, as used by the solver.
  std::span<const double> slopes() const noexcept { return slopes_; }

  const HistoryFunction& history() const noexcept { return history_; }
  /// Set when the trajectory was produced from the leukemia model.
  const std::optional<ModelParams>& params() const noexcept { return params_; }

  std::size_t rejected_steps() const noexcept { return rejected_; }

 private:
  friend class DdeSolver;

  Trajectory(DelayedRhs rhs, double delay, HistoryFunction history,
             std::optional<ModelParams> params);

  /// Interpolates on the solution mesh, t in [0, t_end].
  double interpolate(double t) const;

  std::shared_ptr<const DelayedRhs> rhs_;
  double delay_;
  HistoryFunction history_;
  std::optional<ModelParams> params_;
  std::vector<double> times_;
  std::vector<double> states_;
  std::vector<double> slopes_;
  std::size_t rejected_ = 0;
};

/// Incremental solver. `advance_to` may be called repeatedly with growing
/// targets; the trajectory seen so far never changes retroactively.
class DdeSolver {
 public:
  DdeSolver(const ModelParams& params, HistoryFunction history, IntegrationOptions options);
  DdeSolver(DelayedRhs rhs, double delay, HistoryFunction history, IntegrationOptions options);

  /// Throws IntegrationError on step-size underflow or divergence.
  void advance_to(double t_target);

  const Trajectory& trajectory() const noexcept { return traj_; }
  Trajectory release() && { return std::move(traj_); }

 private:
  double delayed_state(double t) const;
  double slope(double t, double x) const;
  double next_breakpoint(double t) const;

  Trajectory traj_;
  IntegrationOptions options_;
  double max_step_;
  double h_;
};

Trajectory integrate(const ModelParams& params, HistoryFunction history,
                     const IntegrationOptions& options = {});

Trajectory integrate(DelayedRhs rhs, double delay, HistoryFunction history,
                     const IntegrationOptions& options = {});

/// `t,x,xdot` rows on the uniform grid t_from + i * dt up to t_to.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double t_from, double t_to,
                          double dt);

}  // namespace bautin
