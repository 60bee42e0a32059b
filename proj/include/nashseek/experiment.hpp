#pragma once
// Experiment orchestration: builds the configured game, certifies the
// reference equilibrium, runs all seeds (optionally across worker threads),
// aggregates mean curves with dispersion bands, fits rate slopes, and writes
// the artifact set for a run directory:
//   config.cfg  reference_ne.txt  trace_seed<k>.csv  mean_curve.csv
//   summary.txt  convergence.svg
// Everything written is a deterministic function of the config, so re-runs
// reproduce the CSVs byte for byte.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nashseek/config.hpp"
#include "nashseek/cournot.hpp"
#include "nashseek/csv.hpp"
#include "nashseek/reference.hpp"
#include "nashseek/sdl.hpp"
#include "nashseek/svg_plot.hpp"

namespace nashseek {

// Label under the per-seed master stream from which a run draws; instance
// generation uses low child labels of its own seed, so even seed ==
// instance_seed cannot alias streams.
constexpr std::uint64_t kRunStreamLabel = 0x72756e;

struct BuiltGame {
  GameInstance game;
  CournotParams params;
  double beta = 0.0;
  double lipschitz = 0.0;
};

inline BuiltGame build_game(const ExperimentConfig& cfg) {
  BuiltGame built;
  switch (cfg.game) {
    case GameKind::Cournot:
      built.params =
          generate_cournot_instance(cfg.players, cfg.markets, cfg.instance_seed);
      built.game = make_cournot_game(
          built.params, cfg.projection == ProjectionMode::HyperplaneOnly
                            ? SetKind::HyperplaneSumOne
                            : SetKind::Simplex);
      break;
    case GameKind::Duopoly:
      if (cfg.projection == ProjectionMode::HyperplaneOnly)
        throw std::runtime_error(
            "build_game: the duopoly test game uses box sets; the hyperplane "
            "update does not apply");
      built.params = duopoly_params();
      built.game = make_cournot_game(built.params, SetKind::Box);
      break;
  }
  built.beta = compute_beta(built.params);
  built.lipschitz = cournot_lipschitz(built.params);
  return built;
}

inline std::vector<double> default_start(const GameInstance& game) {
  return detail::center_point(game);
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace detail

// Pointwise mean and central 80% band of sq_error across seeds, sampled on
// the given iteration grid.
inline std::vector<MeanCurvePoint> aggregate_seeds(
    const std::vector<RunTrace>& traces,
    const std::vector<std::uint64_t>& grid) {
  if (traces.empty()) throw std::invalid_argument("aggregate_seeds: no traces");
  const std::uint64_t iters = traces.front().iterations;
  for (const auto& t : traces) {
    if (t.iterations != iters)
      throw std::invalid_argument("aggregate_seeds: misaligned trace lengths");
    if (t.sq_error.size() != iters)
      throw std::invalid_argument("aggregate_seeds: trace lacks sq_error");
  }
  std::vector<MeanCurvePoint> curve;
  curve.reserve(grid.size());
  std::vector<double> values(traces.size());
  for (std::uint64_t n : grid) {
    if (n < 1 || n > iters)
      throw std::invalid_argument("aggregate_seeds: grid outside traces");
    for (std::size_t s = 0; s < traces.size(); ++s)
      values[s] = traces[s].sq_error[n - 1];
    MeanCurvePoint pt;
    pt.iter = n;
    pt.n_seeds = traces.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    pt.mean_sq_error = mean / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    pt.band_lo = detail::quantile_sorted(values, 0.1);
    pt.band_hi = detail::quantile_sorted(values, 0.9);
    curve.push_back(pt);
  }
  return curve;
}

struct ExperimentSummary {
  ExperimentConfig config;
  double beta = 0.0;
  double lipschitz = 0.0;
  bool gamma_beta_ok = false;
  double ref_vi_residual = 0.0;
  double ref_max_improvement = 0.0;
  std::uint64_t ref_solver_iterations = 0;
  std::uint64_t iterations_run = 0;
  double final_mean_sq_error = 0.0;
  double decade_mean_sq_error = 0.0;  // mean curve at the start of the window
  bool fit_ok = false;
  std::string fit_note;
  RateFit fit;
  std::uint64_t negativity_events_total = 0;
  std::uint64_t total_cost_evals = 0;
  bool stopped_on_h_underflow = false;
  std::vector<MeanCurvePoint> mean_curve;
  std::vector<double> x_star;
};

inline std::string run_id_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.name + "-seed" + std::to_string(seed);
}

inline RunTrace run_one_seed(const BuiltGame& built,
                             const ExperimentConfig& cfg,
                             const std::vector<double>& x0,
                             const std::vector<double>& x_star,
                             std::uint64_t seed) {
  RngStream run_stream = RngStream(seed).child(kRunStreamLabel);
  RunOptions options;
  options.seed_label = seed;
  const Regularizer reg = Regularizer::euclidean();
  const UpdateRule rule{cfg.projection};
  if (cfg.algorithm == AlgorithmKind::Sdl)
    return run_sdl(built.game, cfg.schedules, reg, rule, x0, cfg.iters, &x_star,
                   run_stream, 0, options);
  return run_single_shot_baseline(built.game, cfg.schedules.gamma,
                                  cfg.schedules.h0, reg, rule, x0, cfg.iters,
                                  &x_star, run_stream, 0, options);
}

namespace detail {

inline void append_fit_lines(std::ostringstream& machine,
                             const ExperimentSummary& s) {
  machine << "fit_ok=" << (s.fit_ok ? 1 : 0) << '\n';
  if (s.fit_ok) {
    machine << "slope=" << format_double(s.fit.slope) << '\n';
    machine << "slope_intercept=" << format_double(s.fit.intercept) << '\n';
    machine << "slope_window_lo=" << s.fit.window_lo << '\n';
    machine << "slope_window_hi=" << s.fit.window_hi << '\n';
    machine << "slope_r_squared=" << format_double(s.fit.r_squared) << '\n';
    machine << "slope_points=" << s.fit.points << '\n';
  }
}

}  // namespace detail

inline std::string summary_to_text(const ExperimentSummary& s) {
  std::ostringstream os;
  const auto& cfg = s.config;
  os << "experiment " << cfg.name << ": " << to_string(cfg.algorithm) << " on "
     << to_string(cfg.game);
  if (cfg.game == GameKind::Cournot)
    os << " (" << cfg.players << " players, " << cfg.markets
       << " markets, instance seed " << cfg.instance_seed << ")";
  os << '\n';
  os << "projection " << to_string(cfg.projection) << ", gamma "
     << format_double(cfg.schedules.gamma) << ", ell0 " << cfg.schedules.ell0
     << ", p " << format_double(cfg.schedules.p) << ", h0 "
     << format_double(cfg.schedules.h0) << ", T " << cfg.iters << ", "
     << cfg.seeds.size() << " seed(s)\n";
  os << "strong monotonicity beta = " << format_double(s.beta)
     << ", gradient Lipschitz L = " << format_double(s.lipschitz)
     << "; step condition gamma > 1/beta is "
     << (s.gamma_beta_ok ? "satisfied" : "NOT satisfied (1/beta = " +
                                             format_double(1.0 / s.beta) + ")")
     << '\n';
  os << "reference equilibrium: fixed-point residual "
     << format_double(s.ref_vi_residual) << ", worst best-response improvement "
     << format_double(s.ref_max_improvement) << ", solver iterations "
     << s.ref_solver_iterations << '\n';
  os << "mean squared error: " << format_double(s.decade_mean_sq_error)
     << " at the fit-window start, " << format_double(s.final_mean_sq_error)
     << " at n = " << s.iterations_run << '\n';
  if (s.fit_ok)
    os << "log-log slope " << format_double(s.fit.slope) << " over n in ["
       << s.fit.window_lo << ", " << s.fit.window_hi
       << "], r^2 = " << format_double(s.fit.r_squared) << " (" << s.fit.points
       << " points)\n";
  else
    os << "slope not fitted: " << s.fit_note << '\n';
  os << "negativity events across seeds: " << s.negativity_events_total << '\n';
  os << "total cost evaluations (all seeds, all players): "
     << s.total_cost_evals << '\n';
  if (s.stopped_on_h_underflow)
    os << "note: run stopped early on smoothing underflow\n";

  std::ostringstream machine;
  machine << "# machine-readable\n";
  machine << "name=" << cfg.name << '\n';
  machine << "algorithm=" << to_string(cfg.algorithm) << '\n';
  machine << "projection=" << to_string(cfg.projection) << '\n';
  machine << "iterations_run=" << s.iterations_run << '\n';
  machine << "n_seeds=" << cfg.seeds.size() << '\n';
  machine << "beta=" << format_double(s.beta) << '\n';
  machine << "lipschitz=" << format_double(s.lipschitz) << '\n';
  machine << "gamma_beta_ok=" << (s.gamma_beta_ok ? 1 : 0) << '\n';
  machine << "ref_vi_residual=" << format_double(s.ref_vi_residual) << '\n';
  machine << "ref_max_improvement=" << format_double(s.ref_max_improvement)
          << '\n';
  machine << "final_mean_sq_error=" << format_double(s.final_mean_sq_error)
          << '\n';
  machine << "decade_mean_sq_error=" << format_double(s.decade_mean_sq_error)
          << '\n';
  detail::append_fit_lines(machine, s);
  machine << "negativity_events=" << s.negativity_events_total << '\n';
  machine << "total_cost_evals=" << s.total_cost_evals << '\n';
  machine << "stopped_on_h_underflow=" << (s.stopped_on_h_underflow ? 1 : 0)
          << '\n';
  return os.str() + machine.str();
}

inline std::map<std::string, std::string> parse_summary_machine_block(
    const std::string& text) {
  const std::size_t pos = text.find("# machine-readable\n");
  if (pos == std::string::npos)
    throw std::runtime_error("summary: machine-readable block missing");
  return parse_key_values(text.substr(pos));
}

// Runs every seed of the config, writes the artifact set into out_dir, and
// returns the aggregate summary. Deterministic for a fixed config.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                        const std::string& out_dir) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const BuiltGame built = build_game(cfg);

  NEReference ref = solve_ne_reference(built.game, cfg.ref_tol, cfg.ref_max_iter,
                                       built.lipschitz, built.beta / 2.0);
  const std::vector<double> x0 = default_start(built.game);

  std::vector<RunTrace> traces(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.workers, [&](std::size_t k) {
    traces[k] = run_one_seed(built, cfg, x0, ref.x_star, cfg.seeds[k]);
  });

  const std::uint64_t iterations_run = traces.front().iterations;
  const auto grid = csv_grid(iterations_run, cfg.record_every);

  ExperimentSummary summary;
  summary.config = cfg;
  summary.beta = built.beta;
  summary.lipschitz = built.lipschitz;
  summary.gamma_beta_ok = cfg.schedules.gamma > 1.0 / built.beta;
  summary.ref_vi_residual = ref.vi_residual;
  for (double v : ref.per_player_improvement)
    summary.ref_max_improvement = std::max(summary.ref_max_improvement, v);
  summary.ref_solver_iterations = ref.solver_iterations;
  summary.iterations_run = iterations_run;
  summary.mean_curve = aggregate_seeds(traces, grid);
  summary.final_mean_sq_error = summary.mean_curve.back().mean_sq_error;
  summary.x_star = ref.x_star;
  for (const auto& t : traces) {
    summary.negativity_events_total += t.negativity_events;
    summary.total_cost_evals +=
        t.cum_evals.back() * static_cast<std::uint64_t>(built.game.num_players);
    summary.stopped_on_h_underflow |= t.stopped_on_h_underflow;
  }

  std::vector<std::uint64_t> fit_iters;
  std::vector<double> fit_values;
  for (const auto& pt : summary.mean_curve) {
    fit_iters.push_back(pt.iter);
    fit_values.push_back(pt.mean_sq_error);
  }
  try {
    summary.fit = fit_rate_slope(fit_iters, fit_values, cfg.fit_window);
    summary.fit_ok = true;
  } catch (const std::exception& e) {
    summary.fit_ok = false;
    summary.fit_note = e.what();
  }
  const double window_start =
      cfg.fit_window * static_cast<double>(iterations_run);
  summary.decade_mean_sq_error = summary.final_mean_sq_error;
  for (const auto& pt : summary.mean_curve)
    if (static_cast<double>(pt.iter) >= window_start) {
      summary.decade_mean_sq_error = pt.mean_sq_error;
      break;
    }

  // artifacts
  write_text_file((fs::path(out_dir) / "config.cfg").string(),
                  config_to_text(cfg));
  {
    std::ostringstream os;
    write_reference_file(os, ref.x_star, ref.vi_residual);
    write_text_file((fs::path(out_dir) / "reference_ne.txt").string(), os.str());
  }
  for (std::size_t k = 0; k < traces.size(); ++k) {
    std::ostringstream os;
    write_trace_csv(os, run_id_for(cfg, cfg.seeds[k]), traces[k], grid);
    write_text_file((fs::path(out_dir) /
                     ("trace_seed" + std::to_string(cfg.seeds[k]) + ".csv"))
                        .string(),
                    os.str());
  }
  {
    std::ostringstream os;
    write_mean_curve_csv(os, summary.mean_curve);
    write_text_file((fs::path(out_dir) / "mean_curve.csv").string(), os.str());
  }
  write_text_file((fs::path(out_dir) / "summary.txt").string(),
                  summary_to_text(summary));
  {
    PlotSeries series;
    series.label = cfg.name;
    for (const auto& pt : summary.mean_curve) {
      series.x.push_back(static_cast<double>(pt.iter));
      series.y.push_back(pt.mean_sq_error);
      series.band_lo.push_back(pt.band_lo);
      series.band_hi.push_back(pt.band_hi);
    }
    PlotOptions popt;
    popt.title = "squared distance to the reference equilibrium";
    write_text_file((fs::path(out_dir) / "convergence.svg").string(),
                    render_svg({series}, popt));
  }
  return summary;
}

struct SweepResult {
  std::vector<double> p_values;
  std::vector<ExperimentSummary> runs;
};

inline std::string format_p_tag(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return std::string(buf);
}

// Varies the batch growth exponent p over a list, reusing the instance and
// start point; writes each run under out_root/p<value>/ plus a comparison
// plot and a sweep summary at the root.
inline SweepResult run_sweep(const ExperimentConfig& base,
                             const std::vector<double>& p_values,
                             const std::string& out_root) {
  if (p_values.empty()) throw std::invalid_argument("run_sweep: empty p list");
  namespace fs = std::filesystem;
  fs::create_directories(out_root);
  SweepResult result;
  result.p_values = p_values;
  for (double p : p_values) {
    ExperimentConfig cfg = base;
    cfg.schedules.p = p;
    cfg.name = base.name + "_p" + format_p_tag(p);
    const std::string dir = (fs::path(out_root) / ("p" + format_p_tag(p))).string();
    result.runs.push_back(run_experiment(cfg, dir));
  }
  std::vector<PlotSeries> series;
  std::ostringstream stext;
  stext << "sweep over p: " << base.name << '\n';
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const auto& s = result.runs[k];
    PlotSeries ps;
    ps.label = "p=" + format_p_tag(p_values[k]);
    for (const auto& pt : s.mean_curve) {
      ps.x.push_back(static_cast<double>(pt.iter));
      ps.y.push_back(pt.mean_sq_error);
      ps.band_lo.push_back(pt.band_lo);
      ps.band_hi.push_back(pt.band_hi);
    }
    series.push_back(std::move(ps));
    stext << "p=" << format_p_tag(p_values[k])
          << ": final_mean_sq_error=" << format_double(s.final_mean_sq_error);
    if (s.fit_ok)
      stext << " slope=" << format_double(s.fit.slope)
            << " r2=" << format_double(s.fit.r_squared);
    else
      stext << " slope=unavailable(" << s.fit_note << ")";
    stext << " total_cost_evals=" << s.total_cost_evals << '\n';
  }
  PlotOptions popt;
  popt.title = "batch growth sweep: mean squared error vs iteration";
  write_text_file((fs::path(out_root) / "comparison.svg").string(),
                  render_svg(series, popt));
  write_text_file((fs::path(out_root) / "sweep_summary.txt").string(),
                  stext.str());
  return result;
}

}  // namespace nashseek
