#include "cli/commands.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "bautin/errors.hpp"
#include "bautin/format.hpp"
#include "bautin/normalform.hpp"
#include "bautin/spectrum.hpp"
#include "cli/svg.hpp"

namespace bautin::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      fn(i);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_plot(const fs::path& path, const Plot& plot) {
  auto out = open_out(path);
  write_svg(out, plot);
}

std::string point_context(const std::string& label, const ModelParams& p) {
  return label + " (delta=" + format_double(p.delta) + ", r=" + format_double(p.r) + ")";
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::ostream& log_of(const CommandContext& ctx) { return *ctx.log; }

}  // namespace

int cmd_hopf_curve(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  if (!cfg.hopf) {
    throw ConfigError("hopf-curve needs a 'hopf' block");
  }
  const auto& h = *cfg.hopf;
  const auto samples = hopf_curve(h.delta_lo, h.delta_hi, h.samples, cfg.model);
  if (samples.empty()) {
    log_of(ctx) << "error: no Hopf point for delta in [" << format_double(h.delta_lo) << ", "
                << format_double(h.delta_hi) << "]\n";
    return kExitFailure;
  }
  {
    auto out = open_out(ctx.out_dir / "hopf_curve.csv");
    write_hopf_csv(out, samples);
  }
  for (const auto& s : samples) {
    if (!s.point) {
      log_of(ctx) << "note: delta=" << format_double(s.delta) << " skipped: " << s.failure << '\n';
    }
  }

  Plot plot;
  plot.spec = {PlotKind::Curve, "Hopf curve", "delta", "r*", std::nullopt, std::nullopt};
  Series curve;
  for (const auto& s : samples) {
    if (s.point) {
      curve.xy.emplace_back(s.delta, s.point->r_star);
    }
  }
  plot.series.push_back(std::move(curve));

  std::ostringstream markers;
  markers << "label,delta,r,r_star,side\n";
  for (const auto& m : cfg.markers) {
    plot.markers.push_back({m.delta, m.r, m.label});
    std::string r_star, side;
    try {
      const double rs = hopf_r(m.delta, cfg.model).r_star;
      r_star = format_double(rs);
      side = m.r < rs ? "below" : (m.r > rs ? "above" : "on");
    } catch (const Error&) {
      side = "none";
    }
    markers << m.label << ',' << format_double(m.delta) << ',' << format_double(m.r) << ','
            << r_star << ',' << side << '\n';
  }
  if (!cfg.markers.empty()) {
    write_text(ctx.out_dir / "hopf_markers.csv", markers.str());
  }
  if (cfg.output.plots) {
    write_plot(ctx.out_dir / "hopf_curve.svg", plot);
  }
  return kExitOk;
}

int cmd_simulate(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.c_values.empty()) {
    throw ConfigError("simulate needs history.c");
  }
  const auto points = cfg.resolved_points();
  struct Job {
    std::string label;
    ModelParams params;
    double c = 0.0;
    std::string stem;
    std::string csv;
    double t_from = 0.0;
    double t_to = 0.0;
    double dt = 0.0;
    std::vector<std::array<double, 3>> rows;
    std::string error;
  };
  std::vector<Job> jobs;
  for (const auto& [label, params] : points) {
    for (double c : cfg.c_values) {
      Job j;
      j.label = label;
      j.params = params;
      j.c = c;
      j.stem = "simulate_delta" + format_double(params.delta) + "_r" + format_double(params.r) +
               "_c" + format_double(c);
      jobs.push_back(std::move(j));
    }
  }

  parallel_for(jobs.size(), ctx.jobs, [&](std::size_t i) {
    auto& job = jobs[i];
    try {
      const Eigenvalue eig = leading_root(job.params);
      const Trajectory traj =
          integrate(job.params, make_history(job.params, eig, job.c), cfg.run.integration);
      job.t_from = cfg.output.t_from;
      job.t_to = std::min(cfg.output.t_to.value_or(traj.t_end()), traj.t_end());
      if (!(job.t_from >= 0.0 && job.t_from < job.t_to)) {
        throw DomainError("output window [t_from, t_to] is empty");
      }
      const double period = 2.0 * std::numbers::pi / eig.omega;
      job.dt = period / cfg.output.samples_per_period;
      std::ostringstream csv;
      write_trajectory_csv(csv, traj, job.t_from, job.t_to, job.dt);
      job.csv = csv.str();
      const auto count = static_cast<long>(std::floor((job.t_to - job.t_from) / job.dt + 1e-9));
      for (long k = 0; k <= count; ++k) {
        const double t = std::min(job.t_from + static_cast<double>(k) * job.dt, traj.t_end());
        job.rows.push_back({t, traj.eval(t), traj.eval_derivative(t)});
      }
    } catch (const std::exception& e) {
      job.error = e.what();
    }
  });

  int status = kExitOk;
  std::ostringstream index;
  index << "label,delta,r,c,file,error\n";
  for (const auto& job : jobs) {
    index << job.label << ',' << format_double(job.params.delta) << ','
          << format_double(job.params.r) << ',' << format_double(job.c) << ','
          << (job.error.empty() ? job.stem + ".csv" : "") << ',';
    if (!job.error.empty()) {
      std::string msg = job.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      index << msg;
      log_of(ctx) << "error: " << point_context(job.label, job.params)
                  << ", c=" << format_double(job.c) << ": " << job.error << '\n';
      status = kExitFailure;
    }
    index << '\n';
    if (!job.error.empty()) {
      continue;
    }
    write_text(ctx.out_dir / (job.stem + ".csv"), job.csv);
    if (!cfg.output.plots) {
      continue;
    }
    const std::string title =
        job.label + ": delta=" + format_double(job.params.delta) + ", r=" +
        format_double(job.params.r) + ", c=" + format_double(job.c);
    Plot ts;
    ts.spec = {PlotKind::TimeSeries, title, "t", "x(t)", std::nullopt, std::nullopt};
    Plot phase;
    phase.spec = {PlotKind::Phase, title, "x(t)", "x'(t)", std::nullopt, std::nullopt};
    Series a, b;
    for (const auto& [t, x, xd] : job.rows) {
      a.xy.emplace_back(t, x);
      b.xy.emplace_back(x, xd);
    }
    ts.series.push_back(std::move(a));
    phase.series.push_back(std::move(b));
    write_plot(ctx.out_dir / (job.stem + "_timeseries.svg"), ts);
    write_plot(ctx.out_dir / (job.stem + "_phase.svg"), phase);
  }
  write_text(ctx.out_dir / "simulate_index.csv", index.str());
  return status;
}

int cmd_classify(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.c_values.empty()) {
    throw ConfigError("classify needs history.c");
  }
  const auto points = cfg.resolved_points();
  struct Cell {
    std::size_t point = 0;
    double c = 0.0;
    RunOutcome run;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (double c : cfg.c_values) {
      cells.push_back({i, c, {}});
    }
  }
  parallel_for(cells.size(), ctx.jobs, [&](std::size_t i) {
    auto& cell = cells[i];
    try {
      cell.run = classify_run(points[cell.point].second, cell.c, cfg.run);
    } catch (const std::exception& e) {
      cell.run.error = e.what();
    }
  });

  int status = kExitOk;
  json out = json::array();
  for (const auto& cell : cells) {
    const auto& [label, params] = points[cell.point];
    json row = {{"label", label},
                {"delta", params.delta},
                {"r", params.r},
                {"c", cell.c}};
    if (!cell.run.error.empty()) {
      row["verdict"] = "Error";
      row["error"] = cell.run.error;
      log_of(ctx) << "error: " << point_context(label, params) << ", c=" << format_double(cell.c)
                  << ": " << cell.run.error << '\n';
      status = kExitFailure;
    } else {
      const auto& p = cell.run.portrait;
      row["verdict"] = to_string(p.verdict);
      row["cycle_amplitude"] = optional_json(p.cycle_amplitude);
      row["cycle_period"] = optional_json(p.cycle_period);
      row["transient_end"] = p.transient_end;
      row["horizon"] = cell.run.horizon;
      log_of(ctx) << label << " c=" << format_double(cell.c) << ": " << to_string(p.verdict)
                  << '\n';
    }
    out.push_back(std::move(row));
  }
  write_text(ctx.out_dir / "classify.json", out.dump(2) + "\n");
  return status;
}

int cmd_threshold(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  if (!cfg.threshold) {
    throw ConfigError("threshold needs a 'threshold' block");
  }
  const auto points = cfg.resolved_points();
  if (points.size() != 1) {
    throw ConfigError("threshold needs exactly one point");
  }
  const auto& [label, params] = points.front();
  const auto& t = *cfg.threshold;
  if (!(t.c_lo < t.c_hi)) {
    throw ConfigError("threshold.c_lo must be < threshold.c_hi");
  }
  try {
    const ThresholdResult result = bisect_threshold(params, t.c_lo, t.c_hi, t.tol_c, cfg.run);
    json out = result;
    out["label"] = label;
    out["delta"] = params.delta;
    out["r"] = params.r;
    out["tol_c"] = t.tol_c;
    write_text(ctx.out_dir / "threshold.json", out.dump(2) + "\n");
    log_of(ctx) << label << ": threshold in [" << format_double(result.c_lo) << ", "
                << format_double(result.c_hi) << "]\n";
  } catch (const PreconditionError& e) {
    log_of(ctx) << "error: " << point_context(label, params) << ": " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_sweep(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.c_values.empty()) {
    throw ConfigError("sweep needs history.c");
  }
  std::vector<ModelParams> grid;
  for (const auto& [label, params] : cfg.resolved_points()) {
    grid.push_back(params);
  }
  const auto cells = sweep(grid, cfg.c_values, cfg.run, ctx.jobs);
  {
    auto out = open_out(ctx.out_dir / "sweep.csv");
    write_sweep_csv(out, cells);
  }
  int status = kExitOk;
  for (const auto& cell : cells) {
    if (!cell.error.empty()) {
      log_of(ctx) << "error: delta=" << format_double(cell.params.delta)
                  << ", r=" << format_double(cell.params.r) << ", c=" << format_double(cell.c)
                  << ": " << cell.error << '\n';
      status = kExitFailure;
    }
  }
  return status;
}

int cmd_zones(const CommandContext& ctx) {
  const ZoneGrid z = ctx.config.zones.value_or(ZoneGrid{});
  {
    auto out = open_out(ctx.out_dir / "zones.csv");
    write_zone_csv(out, z.b1_lo, z.b1_hi, z.b1_samples, z.b2_lo, z.b2_hi, z.b2_samples);
  }
  if (!ctx.config.output.plots) {
    return kExitOk;
  }
  Plot plot;
  plot.spec = {PlotKind::Zones, "Normal form zones (s = -1)", "b1", "b2",
               std::pair{z.b1_lo, z.b1_hi}, std::pair{z.b2_lo, z.b2_hi}};
  plot.cell_w = (z.b1_hi - z.b1_lo) / (z.b1_samples - 1);
  plot.cell_h = (z.b2_hi - z.b2_lo) / (z.b2_samples - 1);
  for (int j = 0; j < z.b2_samples; ++j) {
    const double b2 = z.b2_lo + (z.b2_hi - z.b2_lo) * j / (z.b2_samples - 1);
    for (int i = 0; i < z.b1_samples; ++i) {
      const double b1 = z.b1_lo + (z.b1_hi - z.b1_lo) * i / (z.b1_samples - 1);
      plot.cells.push_back({b1, b2, static_cast<int>(region_classify({b1, b2, -1}))});
    }
  }
  Series fold{{}, "#000000", "fold"};
  for (int j = 0; j <= 200; ++j) {
    const double b2 = z.b2_lo + (std::min(z.b2_hi, 0.0) - z.b2_lo) * j / 200.0;
    if (b2 <= 0.0) {
      fold.xy.emplace_back(-b2 * b2 / 4.0, b2);
    }
  }
  plot.series.push_back(std::move(fold));
  plot.series.push_back({{{0.0, z.b2_lo}, {0.0, z.b2_hi}}, "#555555", "b1 = 0"});
  plot.legend = {{"#fde0c5", "zone 1"}, {"#c6dbef", "zone 2"}, {"#c7e9c0", "zone 3"}};
  write_plot(ctx.out_dir / "zones.svg", plot);
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay model of periodic hematological disease: Hopf curve, simulations and "
               "phase-portrait classification"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  unsigned jobs = 1;
  long seed = 0;

  using Handler = int (*)(const CommandContext&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"hopf-curve", "Trace r*(delta) and mark configured points", cmd_hopf_curve},
      {"simulate", "Integrate from eigenmode histories and plot the runs", cmd_simulate},
      {"classify", "Classify the long-time behavior of each run", cmd_classify},
      {"threshold", "Bisect the history amplitude separating the two attractors", cmd_threshold},
      {"sweep", "Classify a grid of points times history amplitudes", cmd_sweep},
      {"zones", "Rasterize the normal-form zone diagram", cmd_zones},
  };
  Handler selected = nullptr;
  for (const auto& [name, description, handler] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON experiment file")
        ->required(name != "zones");
    sub->add_option("--set", sets, "Override a config value, e.g. model.delta=0.002");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Accepted for compatibility; unused");
    sub->callback([&selected, h = handler] { selected = h; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  CommandContext ctx;
  ctx.jobs = jobs;
  ctx.log = &err;
  try {
    if (config_path.empty()) {
      ModelParams defaults;
      defaults.delta = 0.002;
      defaults.r = 5.0;
      const json doc = apply_overrides(json{{"model", defaults}}, sets);
      ctx.config = parse_config(doc);
    } else {
      ctx.config = load_config(config_path, sets);
    }
    ctx.out_dir = out_dir;
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec || !fs::is_directory(ctx.out_dir)) {
      throw ConfigError("cannot create output directory " + out_dir);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    return selected(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace bautin::cli
