#include "bautin/cycles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "bautin/errors.hpp"
#include "bautin/format.hpp"

namespace bautin {

double HistorySpec::operator()(double s) const {
  return x2 + c * std::exp(mu * s) * std::cos(omega * s);
}

HistoryFunction HistorySpec::materialize(double delay) const {
  return {*this, delay, HistoryFunction::Source::Eigenmode,
          "eigenmode c=" + format_double(c) + " mu=" + format_double(mu) +
              " omega=" + format_double(omega)};
}

HistoryFunction make_history(const ModelParams& params, const Eigenvalue& eig, double c) {
  const HistorySpec spec{c, eig.mu, eig.omega, nontrivial_equilibrium(params)};
  return spec.materialize(params.r);
}

SignalView signal_of(const Trajectory& traj) {
  return {[&traj](double t) { return traj.eval(t); },
          [&traj](double t) { return traj.eval_derivative(t); },
          {traj.times().begin(), traj.times().end()}};
}

namespace {

enum class ExtremumKind { Maximum, Minimum };

// Scans consecutive grid points for a derivative sign change and refines the
// root of the derivative by bisection. `slope_at(i)` is the derivative at
// grid point i, which lets trajectories reuse their stored node slopes.
template <typename SlopeAt>
std::vector<Extremum> scan_extrema(const SignalView& signal, std::span<const double> grid,
                                   SlopeAt slope_at, double t_min, ExtremumKind kind,
                                   const ExtremaOptions& options) {
  std::vector<Extremum> out;
  const double sign = kind == ExtremumKind::Maximum ? 1.0 : -1.0;
  auto first = std::lower_bound(grid.begin(), grid.end(), t_min);
  if (first != grid.begin()) {
    --first;  // the segment straddling t_min may hold an extremum after it
  }
  auto start = static_cast<std::size_t>(first - grid.begin());
  if (grid.size() < 2) {
    return out;
  }
  double d_prev = sign * slope_at(start);
  for (std::size_t i = start + 1; i < grid.size(); ++i) {
    const double d_next = sign * slope_at(i);
    if (d_prev > 0.0 && d_next <= 0.0) {
      double a = grid[i - 1];
      double b = grid[i];
      if (d_next < 0.0) {
        while (b - a > options.time_tol) {
          const double m = 0.5 * (a + b);
          if (m <= a || m >= b) {
            break;
          }
          if (sign * signal.derivative(m) > 0.0) {
            a = m;
          } else {
            b = m;
          }
        }
      }
      const double t = d_next == 0.0 ? b : 0.5 * (a + b);
      if (t > t_min) {
        const double amplitude = signal.value(t) - options.reference;
        if (kind == ExtremumKind::Minimum || amplitude >= options.floor) {
          out.push_back({t, amplitude});
        }
      }
    }
    d_prev = d_next;
  }
  return out;
}

}  // namespace

std::vector<Extremum> peaks(const SignalView& signal, double t_min,
                            const ExtremaOptions& options) {
  return scan_extrema(
      signal, signal.grid, [&](std::size_t i) { return signal.derivative(signal.grid[i]); },
      t_min, ExtremumKind::Maximum, options);
}

std::vector<Extremum> troughs(const SignalView& signal, double t_min,
                              const ExtremaOptions& options) {
  return scan_extrema(
      signal, signal.grid, [&](std::size_t i) { return signal.derivative(signal.grid[i]); },
      t_min, ExtremumKind::Minimum, options);
}

namespace {

std::vector<Extremum> trajectory_extrema(const Trajectory& traj, double t_min, ExtremumKind kind,
                                         const ExtremaOptions& options) {
  const SignalView signal{[&traj](double t) { return traj.eval(t); },
                          [&traj](double t) { return traj.eval_derivative(t); },
                          {}};
  const auto slopes = traj.slopes();
  return scan_extrema(signal, traj.times(), [&](std::size_t i) { return slopes[i]; }, t_min,
                      kind, options);
}

}  // namespace

std::vector<Extremum> peaks(const Trajectory& traj, double t_min, const ExtremaOptions& options) {
  return trajectory_extrema(traj, t_min, ExtremumKind::Maximum, options);
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::ConvergesToEquilibrium:
      return "ConvergesToEquilibrium";
    case Verdict::ConvergesToCycle:
      return "ConvergesToCycle";
    case Verdict::Undetermined:
      return "Undetermined";
    case Verdict::Diverged:
      return "Diverged";
  }
  return "Undetermined";
}

PortraitClass classify(const Trajectory& traj, double x2, const ClassifySettings& settings) {
  PortraitClass result;
  const double eps = settings.equilibrium_rel * std::max(1.0, std::abs(x2));
  const auto times = traj.times();
  const auto states = traj.states();
  const double t_end = traj.t_end();
  const double t_min = std::max(settings.t_min, 0.0);

  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(states[i]) || std::abs(states[i]) > settings.divergence_bound) {
      result.verdict = Verdict::Diverged;
      result.transient_end = times[i];
      return result;
    }
  }

  const auto maxima = peaks(traj, t_min, {.reference = x2, .floor = eps});
  const auto k = static_cast<std::size_t>(std::max(settings.window_peaks, 2));

  // Envelope test: |x - x2| < eps for at least one putative period.
  double last_out = t_min;
  for (std::size_t i = times.size(); i-- > 0 && times[i] >= t_min;) {
    if (std::abs(states[i] - x2) >= eps) {
      last_out = times[i];
      break;
    }
  }
  double period = 4.0 * traj.delay();
  if (settings.period_hint) {
    period = *settings.period_hint;
  } else if (maxima.size() >= 2) {
    period = (maxima.back().t - maxima.front().t) / static_cast<double>(maxima.size() - 1);
  }
  if (t_end - last_out >= period) {
    result.verdict = Verdict::ConvergesToEquilibrium;
    result.transient_end = last_out;
    return result;
  }

  if (maxima.size() < k) {
    return result;
  }

  // Decay certificate: the last K peaks shrink monotonically below 10 eps.
  {
    const auto window = std::span(maxima).last(k);
    bool decreasing = true;
    for (std::size_t i = 1; i < k; ++i) {
      decreasing = decreasing && window[i].amplitude < window[i - 1].amplitude;
    }
    if (decreasing && window.back().amplitude < 10.0 * eps) {
      result.verdict = Verdict::ConvergesToEquilibrium;
      result.transient_end = window.front().t;
      return result;
    }
  }

  // Cycle test on the main peaks; the small superposed oscillations on the
  // descending branch never reach half of the recent maximum.
  const auto recent = std::span(maxima).last(std::min(maxima.size(), 2 * k));
  const double recent_max =
      std::max_element(recent.begin(), recent.end(), [](const auto& a, const auto& b) {
        return a.amplitude < b.amplitude;
      })->amplitude;
  std::vector<Extremum> main;
  for (const auto& p : maxima) {
    if (p.amplitude >= settings.main_peak_fraction * recent_max) {
      main.push_back(p);
    }
  }
  if (main.size() < k) {
    return result;
  }
  const auto window = std::span(main).last(k);
  double lo = window.front().amplitude;
  double hi = lo;
  double sum = 0.0;
  for (const auto& p : window) {
    lo = std::min(lo, p.amplitude);
    hi = std::max(hi, p.amplitude);
    sum += p.amplitude;
  }
  const double mean = sum / static_cast<double>(k);
  const double spacing = (window.back().t - window.front().t) / static_cast<double>(k - 1);
  if (!(hi - lo <= settings.amplitude_rel_tol * mean) || !(lo > 10.0 * eps) ||
      t_end - window.back().t > 2.0 * spacing) {
    return result;
  }
  // Near an unstable cycle the amplitudes also agree for a while, but their
  // successive differences grow.
  double early = 0.0;
  double late = 0.0;
  for (std::size_t i = 1; i < k; ++i) {
    const double d = std::abs(window[i].amplitude - window[i - 1].amplitude);
    double& half = i <= (k - 1) / 2 ? early : late;
    half = std::max(half, d);
  }
  if (late > early && late > settings.settled_rel * mean) {
    return result;
  }

  const auto minima = trajectory_extrema(traj, window.front().t, ExtremumKind::Minimum,
                                         {.reference = x2});
  double trough_sum = 0.0;
  std::size_t trough_count = 0;
  auto it = minima.begin();
  for (std::size_t i = 1; i < k; ++i) {
    double deepest = INFINITY;
    for (; it != minima.end() && it->t < window[i].t; ++it) {
      deepest = std::min(deepest, it->amplitude);
    }
    if (std::isfinite(deepest)) {
      trough_sum += deepest;
      ++trough_count;
    }
  }
  if (trough_count == 0) {
    return result;
  }
  result.verdict = Verdict::ConvergesToCycle;
  result.cycle_amplitude = 0.5 * (mean - trough_sum / static_cast<double>(trough_count));
  result.cycle_period = spacing;
  result.transient_end = window.front().t;
  return result;
}

RunOutcome classify_run(const ModelParams& params, double c, const RunSettings& settings) {
  RunOutcome outcome;
  const double x2 = nontrivial_equilibrium(params);
  const Eigenvalue eig = leading_root(params);
  ClassifySettings cls = settings.classify;
  if (!cls.period_hint && eig.omega > 0.0) {
    cls.period_hint = 2.0 * std::numbers::pi / eig.omega;
  }
  DdeSolver solver(params, make_history(params, eig, c), settings.integration);
  double horizon = std::min(settings.integration.t_end, settings.max_horizon);
  for (;;) {
    try {
      solver.advance_to(horizon);
    } catch (const IntegrationError& e) {
      outcome.portrait.verdict = Verdict::Diverged;
      outcome.portrait.transient_end = e.last_valid_time();
      outcome.horizon = e.last_valid_time();
      outcome.error = e.what();
      return outcome;
    }
    outcome.portrait = classify(solver.trajectory(), x2, cls);
    outcome.horizon = horizon;
    if (outcome.portrait.verdict != Verdict::Undetermined || horizon >= settings.max_horizon) {
      return outcome;
    }
    horizon = std::min(2.0 * horizon, settings.max_horizon);
  }
}

ThresholdResult bisect_threshold(const ModelParams& params, double c_lo, double c_hi,
                                 double tol_c, const RunSettings& settings) {
  if (!(c_lo < c_hi)) {
    throw DomainError("bisect_threshold: need c_lo < c_hi, got " + format_double(c_lo) +
                      " and " + format_double(c_hi));
  }
  if (!(tol_c > 0.0)) {
    throw DomainError("bisect_threshold: tol_c must be positive");
  }
  ThresholdResult result;
  auto probe = [&](double c) {
    RunOutcome run = classify_run(params, c, settings);
    if (run.portrait.verdict == Verdict::Undetermined) {
      RunSettings longer = settings;
      longer.max_horizon *= 2.0;
      run = classify_run(params, c, longer);
    }
    result.probes.push_back({c, run.portrait.verdict, run.horizon});
    return run.portrait.verdict;
  };

  const Verdict lo = probe(c_lo);
  if (lo != Verdict::ConvergesToEquilibrium) {
    throw PreconditionError("bisect_threshold: c_lo=" + format_double(c_lo) + " classified as " +
                            std::string(to_string(lo)) + ", expected ConvergesToEquilibrium");
  }
  const Verdict hi = probe(c_hi);
  if (hi != Verdict::ConvergesToCycle) {
    throw PreconditionError("bisect_threshold: c_hi=" + format_double(c_hi) + " classified as " +
                            std::string(to_string(hi)) + ", expected ConvergesToCycle");
  }
  result.verdict_lo = lo;
  result.verdict_hi = hi;
  while (c_hi - c_lo > tol_c) {
    const double mid = 0.5 * (c_lo + c_hi);
    const Verdict v = probe(mid);
    if (v == Verdict::ConvergesToCycle) {
      c_hi = mid;
    } else if (v == Verdict::Diverged) {
      c_hi = mid;
      result.verdict_hi = v;
    } else {
      c_lo = mid;  // Undetermined after the retry counts as equilibrium side
    }
  }
  result.c_lo = c_lo;
  result.c_hi = c_hi;
  return result;
}

void to_json(nlohmann::json& j, const ThresholdResult& result) {
  j = nlohmann::json{{"c_lo", result.c_lo},
                     {"c_hi", result.c_hi},
                     {"verdict_lo", to_string(result.verdict_lo)},
                     {"verdict_hi", to_string(result.verdict_hi)}};
  auto& probes = j["probes"] = nlohmann::json::array();
  for (const auto& p : result.probes) {
    probes.push_back({{"c", p.c}, {"verdict", to_string(p.verdict)}, {"horizon", p.horizon}});
  }
}

std::vector<SweepCell> sweep(std::span<const ModelParams> params_grid,
                             std::span<const double> c_grid, const RunSettings& settings,
                             unsigned jobs) {
  std::vector<SweepCell> cells(params_grid.size() * c_grid.size());
  for (std::size_t i = 0; i < params_grid.size(); ++i) {
    for (std::size_t j = 0; j < c_grid.size(); ++j) {
      auto& cell = cells[i * c_grid.size() + j];
      cell.params_index = i;
      cell.params = params_grid[i];
      cell.c = c_grid[j];
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      auto& cell = cells[idx];
      try {
        const RunOutcome run = classify_run(cell.params, cell.c, settings);
        cell.portrait = run.portrait;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
  out << "beta0,n,delta,k,r,c,verdict,cycle_amplitude,cycle_period,transient_end\n";
  auto optional = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& cell : cells) {
    const auto& p = cell.params;
    out << format_double(p.beta0) << ',' << format_double(p.n) << ',' << format_double(p.delta)
        << ',' << format_double(p.k) << ',' << format_double(p.r) << ',' << format_double(cell.c)
        << ',' << (cell.error.empty() ? to_string(cell.portrait.verdict) : "Error") << ','
        << optional(cell.portrait.cycle_amplitude) << ',' << optional(cell.portrait.cycle_period)
        << ',' << format_double(cell.portrait.transient_end) << '\n';
  }
}

}  // namespace bautin
