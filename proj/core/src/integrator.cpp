#include "bautin/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bautin/errors.hpp"
#include "bautin/format.hpp"

namespace bautin {

HistoryFunction::HistoryFunction(std::function<double(double)> phi, double span, Source source,
                                 std::string description)
    : phi_(std::move(phi)), span_(span), source_(source), description_(std::move(description)) {
  if (!(span > 0.0)) {
    throw DomainError("history span must be positive");
  }
}

HistoryFunction HistoryFunction::constant(double value, double span) {
  return {[value](double) { return value; }, span, Source::Constant,
          "constant " + format_double(value)};
}

HistoryFunction HistoryFunction::table(std::vector<double> s, std::vector<double> x) {
  if (s.size() < 2 || s.size() != x.size()) {
    throw DomainError("history table needs >= 2 points and matching columns");
  }
  if (s.back() != 0.0 || !std::is_sorted(s.begin(), s.end()) ||
      std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw DomainError("history table abscissae must increase strictly up to 0");
  }
  const double span = -s.front();
  auto phi = [s = std::move(s), x = std::move(x)](double t) {
    const auto it = std::upper_bound(s.begin(), s.end(), t);
    if (it == s.end()) {
      return x.back();
    }
    const auto i = static_cast<std::size_t>(it - s.begin());
    const double w = (t - s[i - 1]) / (s[i] - s[i - 1]);
    return (1.0 - w) * x[i - 1] + w * x[i];
  };
  return {std::move(phi), span, Source::Custom, "table"};
}

double HistoryFunction::operator()(double s) const {
  if (!(s >= -span_ && s <= 0.0)) {
    throw DomainError("history evaluated outside [-" + format_double(span_) + ", 0] at " +
                      format_double(s));
  }
  return phi_(s);
}

Trajectory::Trajectory(DelayedRhs rhs, double delay, HistoryFunction history,
                       std::optional<ModelParams> params)
    : rhs_(std::make_shared<const DelayedRhs>(std::move(rhs))),
      delay_(delay),
      history_(std::move(history)),
      params_(std::move(params)) {}

double Trajectory::interpolate(double t) const {
  // Segment i spans [times_[i], times_[i+1]].
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) {
    throw DomainError("trajectory queried before t0");
  }
  const auto i = static_cast<std::size_t>(it - times_.begin()) - 1;
  if (times_[i] == t) {
    return states_[i];
  }
  if (i + 1 >= times_.size()) {
    throw DomainError("trajectory queried beyond t_end at " + format_double(t));
  }
  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double u = 1.0 - s;
  return (1.0 + 2.0 * s) * u * u * states_[i] + s * u * u * h * slopes_[i] +
         s * s * (3.0 - 2.0 * s) * states_[i + 1] - s * s * u * h * slopes_[i + 1];
}

double Trajectory::eval(double t) const {
  if (!(t >= -delay_ && t <= t_end())) {
    throw DomainError("trajectory queried outside [-r, t_end] at " + format_double(t));
  }
  if (t < 0.0) {
    return history_(t);
  }
  return interpolate(t);
}

double Trajectory::eval_derivative(double t) const {
  if (!(t >= 0.0 && t <= t_end())) {
    throw DomainError("derivative queried outside [0, t_end] at " + format_double(t));
  }
  return (*rhs_)(eval(t), eval(t - delay_));
}

DdeSolver::DdeSolver(const ModelParams& params, HistoryFunction history,
                     IntegrationOptions options)
    : DdeSolver([params](double x, double xd) { return rhs(x, xd, params); }, params.r,
                std::move(history), options) {
  validate(params);
  traj_.params_ = params;
}

DdeSolver::DdeSolver(DelayedRhs rhs, double delay, HistoryFunction history,
                     IntegrationOptions options)
    : traj_(std::move(rhs), delay, std::move(history), std::nullopt), options_(options) {
  if (!(delay > 0.0)) {
    throw DomainError("delay must be positive");
  }
  if (traj_.history_.span() + 1e-12 * delay < delay) {
    throw DomainError("history must cover [-r, 0]");
  }
  if (!(options_.rel_tol > 0.0) || !(options_.abs_tol > 0.0)) {
    throw DomainError("tolerances must be positive");
  }
  max_step_ = options_.max_step > 0.0 ? options_.max_step : delay;
  if (max_step_ > delay) {
    throw DomainError("max_step must not exceed the delay");
  }
  if (options_.fixed_step > max_step_) {
    throw DomainError("fixed_step must not exceed the maximal step");
  }

  const double x0 = traj_.history_(0.0);
  const double f0 = slope(0.0, x0);
  if (!std::isfinite(f0)) {
    throw IntegrationError("right-hand side is not finite at t=0", 0.0);
  }
  traj_.times_.push_back(0.0);
  traj_.states_.push_back(x0);
  traj_.slopes_.push_back(f0);

  if (options_.fixed_step > 0.0) {
    h_ = options_.fixed_step;
  } else {
    // Explicit order-3 guess from the initial slope, refined by control.
    const double scale = options_.abs_tol + options_.rel_tol * std::abs(x0);
    h_ = std::abs(f0) > 0.0 ? 0.5 * std::cbrt(scale / std::abs(f0)) : max_step_;
    h_ = std::clamp(h_, 1e-6 * delay, max_step_);
  }
}

double DdeSolver::delayed_state(double t) const {
  const double s = t - traj_.delay_;
  if (s <= 0.0) {
    return traj_.history_(std::max(s, -traj_.delay_));
  }
  const double front = traj_.times_.back();
  if (s > front) {
    // Cannot happen while steps stay <= delay; rounding of t + h - r aside.
    if (s - front > 1e-12 * std::max(1.0, front)) {
      throw std::logic_error("delayed lookup beyond the integration front");
    }
    return traj_.states_.back();
  }
  return traj_.interpolate(s);
}

double DdeSolver::slope(double t, double x) const {
  return (*traj_.rhs_)(x, delayed_state(t));
}

double DdeSolver::next_breakpoint(double t) const {
  for (int m = 1; m <= options_.forced_breakpoints; ++m) {
    const double tb = m * traj_.delay_;
    if (tb > t * (1.0 + 1e-14) + 1e-300) {
      return tb;
    }
  }
  return std::numeric_limits<double>::infinity();
}

void DdeSolver::advance_to(double t_target) {
  auto& tr = traj_;
  const bool fixed = options_.fixed_step > 0.0;
  double t = tr.times_.back();
  double x = tr.states_.back();
  double f = tr.slopes_.back();

  while (t < t_target) {
    const double stop = std::min(t_target, next_breakpoint(t));
    double h = std::min(h_, max_step_);
    bool lands = false;
    if (stop - t <= h * (1.0 + 1e-8)) {
      h = stop - t;
      lands = true;
    } else if (!fixed && stop - t < 1.2 * h) {
      h = 0.5 * (stop - t);  // avoid a sliver step before the stop
    }

    bool last_rejected = false;
    for (;;) {
      if (h < 1e-13 * std::max(1.0, std::abs(t))) {
        throw IntegrationError("step size underflow at t=" + format_double(t), t);
      }
      const double t_new = lands ? stop : t + h;
      double k2 = NAN, k3 = NAN, x_new = NAN, k4 = NAN;
      bool finite = true;
      try {
        k2 = slope(t + 0.5 * h, x + 0.5 * h * f);
        k3 = slope(t + 0.75 * h, x + 0.75 * h * k2);
        x_new = x + h * (2.0 / 9.0 * f + 1.0 / 3.0 * k2 + 4.0 / 9.0 * k3);
        k4 = slope(t_new, x_new);
        finite = std::isfinite(x_new) && std::isfinite(k4);
      } catch (const DomainError&) {
        finite = false;
      }

      if (fixed) {
        if (!finite) {
          throw IntegrationError("non-finite state in fixed-step mode at t=" + format_double(t),
                                 t);
        }
      } else {
        double ratio = INFINITY;
        if (finite) {
          const double err =
              h * (-5.0 / 72.0 * f + 1.0 / 12.0 * k2 + 1.0 / 9.0 * k3 - 1.0 / 8.0 * k4);
          const double scale =
              options_.abs_tol + options_.rel_tol * std::max(std::abs(x), std::abs(x_new));
          ratio = std::abs(err) / scale;
        }
        if (!(ratio <= 1.0)) {
          ++tr.rejected_;
          const double shrink =
              finite ? std::clamp(0.9 * std::pow(ratio, -1.0 / 3.0), 0.2, 0.9) : 0.25;
          h *= shrink;
          h_ = h;
          lands = false;
          last_rejected = true;
          continue;
        }
        double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -1.0 / 3.0) : 5.0;
        grow = std::clamp(grow, 0.2, last_rejected ? 1.0 : 5.0);
        // A step shortened to hit a stop says nothing about the next one.
        h_ = std::min(max_step_, std::max(h_, h) * grow);
      }

      if (std::abs(x_new) > options_.divergence_bound) {
        throw IntegrationError("solution exceeded divergence bound after t=" + format_double(t),
                               t);
      }
      t = t_new;
      x = x_new;
      f = k4;
      tr.times_.push_back(t);
      tr.states_.push_back(x);
      tr.slopes_.push_back(f);
      break;
    }
  }
}

Trajectory integrate(const ModelParams& params, HistoryFunction history,
                     const IntegrationOptions& options) {
  DdeSolver solver(params, std::move(history), options);
  solver.advance_to(options.t_end);
  return std::move(solver).release();
}

Trajectory integrate(DelayedRhs rhs, double delay, HistoryFunction history,
                     const IntegrationOptions& options) {
  DdeSolver solver(std::move(rhs), delay, std::move(history), options);
  solver.advance_to(options.t_end);
  return std::move(solver).release();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double t_from, double t_to,
                          double dt) {
  if (!(dt > 0.0)) {
    throw DomainError("sampling interval must be positive");
  }
  out << "t,x,xdot\n";
  const auto count = static_cast<long>(std::floor((t_to - t_from) / dt + 1e-9));
  for (long i = 0; i <= count; ++i) {
    const double t = std::min(t_from + static_cast<double>(i) * dt, traj.t_end());
    out << format_double(t) << ',' << format_double(traj.eval(t)) << ','
        << format_double(traj.eval_derivative(t)) << '\n';
  }
}

}  // namespace bautin
