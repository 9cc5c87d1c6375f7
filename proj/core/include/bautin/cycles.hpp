#pragma once

// Eigenmode initial histories, phase-portrait classification of single runs
// and the basin-boundary search along the eigenmode family.

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bautin/errors.hpp"
#include "bautin/integrator.hpp"
#include "bautin/model.hpp"
#include "bautin/spectrum.hpp"

namespace bautin {

/// phi(s) = x2 + c exp(mu s) cos(omega s).
struct HistorySpec {
  double c = 0.0;
  double mu = 0.0;
  double omega = 0.0;
  double x2 = 0.0;

  double operator()(double s) const;
  HistoryFunction materialize(double delay) const;
};

/// Throws InfeasibleError when x2 does not exist.
HistoryFunction make_history(const ModelParams& params, const Eigenvalue& eig, double c);

struct Extremum {
  double t = 0.0;
  double amplitude = 0.0;  ///< x(t) - reference
};

/// Any smooth scalar signal that can be scanned for extrema: values and
/// derivatives plus an ordered grid fine enough that consecutive grid points
/// bracket at most one extremum.
struct SignalView {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::vector<double> grid;
};

SignalView signal_of(const Trajectory& traj);

struct ExtremaOptions {
  double reference = 0.0;  ///< amplitudes are measured from this level
  /// Maxima with amplitude below this are dropped.
  double floor = -std::numeric_limits<double>::infinity();
  double time_tol = 1e-8;  ///< bisection tolerance on t
};

/// Local maxima for t > t_min, refined by bisection on the derivative.
std::vector<Extremum> peaks(const SignalView& signal, double t_min,
                            const ExtremaOptions& options = {});
std::vector<Extremum> peaks(const Trajectory& traj, double t_min,
                            const ExtremaOptions& options = {});

/// Local minima for t > t_min; `floor` is ignored.
std::vector<Extremum> troughs(const SignalView& signal, double t_min,
                              const ExtremaOptions& options = {});

enum class Verdict { ConvergesToEquilibrium, ConvergesToCycle, Undetermined, Diverged };

std::string_view to_string(Verdict verdict);

struct PortraitClass {
  Verdict verdict = Verdict::Undetermined;
  std::optional<double> cycle_amplitude;  ///< half peak-to-trough
  std::optional<double> cycle_period;
  double transient_end = 0.0;
};

struct ClassifySettings {
  int window_peaks = 10;           ///< K
  double amplitude_rel_tol = 1e-3;
  double equilibrium_rel = 1e-4;   ///< eps_eq = equilibrium_rel * max(1, |x2|)
  double main_peak_fraction = 0.5;
  /// Successive-amplitude differences below this (relative) count as settled
  /// when checking that the window is not drifting away from a cycle.
  double settled_rel = 1e-6;
  double divergence_bound = 1e6;
  double t_min = 0.0;
  std::optional<double> period_hint;  ///< used by the envelope test
};

/// Verdict for one finished run around the equilibrium x2. Never throws on
/// inconclusive data; Undetermined is the fallback.
PortraitClass classify(const Trajectory& traj, double x2, const ClassifySettings& settings = {});

struct RunSettings {
  IntegrationOptions integration;  ///< t_end is the first horizon tried
  double max_horizon = 4.0e5;      ///< horizon is doubled up to this bound
  ClassifySettings classify;
};

struct RunOutcome {
  PortraitClass portrait;
  double horizon = 0.0;
  std::string error;  ///< non-empty when integration failed
};

/// Integrates from the eigenmode history of amplitude c, extending the
/// horizon until the verdict is conclusive or max_horizon is reached.
RunOutcome classify_run(const ModelParams& params, double c, const RunSettings& settings = {});

struct ThresholdProbe {
  double c = 0.0;
  Verdict verdict = Verdict::Undetermined;
  double horizon = 0.0;
};

struct ThresholdResult {
  double c_lo = 0.0;
  double c_hi = 0.0;
  Verdict verdict_lo = Verdict::ConvergesToEquilibrium;
  Verdict verdict_hi = Verdict::ConvergesToCycle;
  std::vector<ThresholdProbe> probes;
};

/// Raised when a bisection endpoint does not have the required verdict.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Bisection on the history amplitude between an equilibrium-side c_lo and
/// a cycle-side c_hi down to a bracket of width <= tol_c. An Undetermined
/// probe is retried once with a doubled max_horizon and otherwise counted
/// on the equilibrium side.
ThresholdResult bisect_threshold(const ModelParams& params, double c_lo, double c_hi,
                                 double tol_c, const RunSettings& settings = {});

void to_json(nlohmann::json& j, const ThresholdResult& result);

struct SweepCell {
  std::size_t params_index = 0;
  ModelParams params;
  double c = 0.0;
  PortraitClass portrait;
  std::string error;
};

/// Row-major cross product params_grid x c_grid. Cells are independent and
/// evaluated on up to `jobs` threads; the output order never depends on it.
std::vector<SweepCell> sweep(std::span<const ModelParams> params_grid,
                             std::span<const double> c_grid, const RunSettings& settings = {},
                             unsigned jobs = 1);

/// `beta0,n,delta,k,r,c,verdict,cycle_amplitude,cycle_period,transient_end`
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);

}  // namespace bautin
