#pragma once
// Command-line front end: run | sweep | bias-variance | solve-ne | plot.
// Flags override config keys; the NASHSEEK_WORKERS environment variable
// overrides both for the worker budget.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nashseek/config.hpp"
#include "nashseek/cournot.hpp"
#include "nashseek/csv.hpp"
#include "nashseek/experiment.hpp"
#include "nashseek/probe.hpp"
#include "nashseek/reference.hpp"
#include "nashseek/svg_plot.hpp"

namespace nashseek {

namespace cli_detail {

struct Overrides {
  std::optional<std::uint64_t> seeds_count;
  std::string seed_list;
  std::string algorithm;
  std::string projection;
  std::optional<std::uint64_t> iters;
  std::optional<std::size_t> workers;
};

inline void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seeds", ov.seeds_count, "number of seeds (uses 1..K)");
  cmd->add_option("--seed-list", ov.seed_list, "explicit seeds, comma separated");
  cmd->add_option("--algorithm", ov.algorithm, "sdl or single_shot");
  cmd->add_option("--projection", ov.projection, "full or hyperplane");
  cmd->add_option("--iters", ov.iters, "iteration budget T");
  cmd->add_option("--workers", ov.workers, "concurrent seed workers");
}

inline void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.seeds_count) cfg.seeds = default_seed_list(*ov.seeds_count);
  if (!ov.seed_list.empty()) {
    cfg.seeds.clear();
    for (const auto& item : parse_list(ov.seed_list))
      cfg.seeds.push_back(parse_u64(item));
  }
  if (!ov.algorithm.empty()) cfg.algorithm = algorithm_from_string(ov.algorithm);
  if (!ov.projection.empty())
    cfg.projection = projection_from_string(ov.projection);
  if (ov.iters) cfg.iters = *ov.iters;
  if (ov.workers) cfg.workers = *ov.workers;
  if (const char* env = std::getenv("NASHSEEK_WORKERS")) {
    const std::string value(env);
    if (!value.empty()) cfg.workers = static_cast<std::size_t>(parse_u64(value));
  }
  cfg.validate();
}

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : parse_list(text)) out.push_back(parse_double(item));
  return out;
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : parse_list(text)) out.push_back(parse_u64(item));
  return out;
}

}  // namespace cli_detail

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "nashseek: learning Nash equilibria of noisy games from cost "
      "observations alone"};
  // No -h short alias anywhere: bias-variance owns --h for the smoothing
  // radius sweep.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "execute one experiment config");
  std::string run_config, run_out;
  cli_detail::Overrides run_ov;
  run_cmd->add_option("--config", run_config, "config file (key=value lines)")
      ->required();
  run_cmd->add_option("--out", run_out, "output directory (default runs/<name>)");
  cli_detail::add_override_flags(run_cmd, run_ov);

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "vary the batch growth exponent p");
  std::string sweep_config, sweep_out, sweep_p = "0,0.5,1";
  cli_detail::Overrides sweep_ov;
  sweep_cmd->add_option("--config", sweep_config, "base config file")->required();
  sweep_cmd->add_option("--p", sweep_p, "comma-separated p values");
  sweep_cmd->add_option("--out", sweep_out,
                        "output root (default runs/<name>_sweep)");
  cli_detail::add_override_flags(sweep_cmd, sweep_ov);

  // bias-variance
  auto* bv_cmd = app.add_subcommand(
      "bias-variance", "empirical estimator moments over (h, ell) grids");
  bv_cmd->set_help_flag("--help", "print help and exit");
  std::string bv_target = "quad", bv_h = "0.02,0.04,0.08,0.16,0.32";
  std::string bv_ell = "1,2,4,8,16,32,64", bv_out = "bias_variance";
  double bv_h_ref = 0.1;
  std::uint64_t bv_ell_ref = 4, bv_reps = 20000, bv_seed = 1;
  std::uint64_t bv_players = 20, bv_markets = 5, bv_instance_seed = 1;
  bv_cmd->add_option("--target", bv_target,
                     "quad (noisy quadratic) or cournot (player 0 own-cost)");
  bv_cmd->add_option("--h", bv_h, "smoothing radii to sweep");
  bv_cmd->add_option("--ell", bv_ell, "pair counts to sweep");
  bv_cmd->add_option("--h-ref", bv_h_ref, "fixed h for the ell sweep");
  bv_cmd->add_option("--ell-ref", bv_ell_ref, "fixed ell for the h sweep");
  bv_cmd->add_option("--reps", bv_reps, "replications per cell");
  bv_cmd->add_option("--seed", bv_seed, "probe seed");
  bv_cmd->add_option("--players", bv_players, "cournot target: players");
  bv_cmd->add_option("--markets", bv_markets, "cournot target: markets");
  bv_cmd->add_option("--instance-seed", bv_instance_seed,
                     "cournot target: instance seed");
  bv_cmd->add_option("--out", bv_out, "output directory");

  // solve-ne
  auto* ne_cmd =
      app.add_subcommand("solve-ne", "emit the certified reference point");
  std::string ne_config, ne_out = "reference_ne.txt";
  ne_cmd->add_option("--config", ne_config, "config naming the game")->required();
  ne_cmd->add_option("--out", ne_out, "output file");

  // plot
  auto* plot_cmd =
      app.add_subcommand("plot", "render mean-curve CSVs to one SVG");
  std::vector<std::string> plot_inputs;
  std::string plot_out, plot_labels, plot_title = "mean squared error";
  bool plot_linear = false;
  plot_cmd->add_option("csv", plot_inputs, "mean-curve CSV paths")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();
  plot_cmd->add_option("--labels", plot_labels, "comma-separated series labels");
  plot_cmd->add_option("--title", plot_title, "plot title");
  plot_cmd->add_flag("--linear", plot_linear, "linear axes instead of log-log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    namespace fs = std::filesystem;
    if (*run_cmd) {
      ExperimentConfig cfg = load_config(run_config);
      cli_detail::apply_overrides(cfg, run_ov);
      const std::string out =
          run_out.empty() ? (fs::path("runs") / cfg.name).string() : run_out;
      const ExperimentSummary summary = run_experiment(cfg, out);
      std::cout << summary_to_text(summary);
      std::cout << "artifacts written to " << out << '\n';
      return 0;
    }
    if (*sweep_cmd) {
      ExperimentConfig cfg = load_config(sweep_config);
      cli_detail::apply_overrides(cfg, sweep_ov);
      const std::string out =
          sweep_out.empty() ? (fs::path("runs") / (cfg.name + "_sweep")).string()
                            : sweep_out;
      run_sweep(cfg, cli_detail::parse_double_list(sweep_p), out);
      std::cout << read_text_file(
          (fs::path(out) / "sweep_summary.txt").string());
      std::cout << "artifacts written to " << out << '\n';
      return 0;
    }
    if (*bv_cmd) {
      ProbeTargetSpec target;
      if (bv_target == "quad") {
        target = make_quad_noise_target();
      } else if (bv_target == "cournot") {
        target = make_cournot_probe_target(generate_cournot_instance(
            bv_players, bv_markets, bv_instance_seed));
      } else {
        throw std::runtime_error("--target must be quad or cournot");
      }
      const BiasVarianceStudy study = run_bias_variance_study(
          target, cli_detail::parse_double_list(bv_h),
          cli_detail::parse_u64_list(bv_ell), bv_h_ref, bv_ell_ref, bv_reps,
          bv_seed);
      fs::create_directories(bv_out);
      write_text_file((fs::path(bv_out) / "grid.csv").string(),
                      bias_variance_csv(study));
      write_text_file((fs::path(bv_out) / "summary.txt").string(),
                      bias_variance_summary(study));
      std::cout << bias_variance_summary(study);
      std::cout << "artifacts written to " << bv_out << '\n';
      return 0;
    }
    if (*ne_cmd) {
      ExperimentConfig cfg = load_config(ne_config);
      const BuiltGame built = build_game(cfg);
      const NEReference ref = solve_ne_reference(
          built.game, cfg.ref_tol, cfg.ref_max_iter, built.lipschitz,
          built.beta / 2.0);
      std::ostringstream os;
      write_reference_file(os, ref.x_star, ref.vi_residual);
      write_text_file(ne_out, os.str());
      double worst = 0.0;
      for (double v : ref.per_player_improvement) worst = std::max(worst, v);
      std::cout << "reference point written to " << ne_out << '\n'
                << "fixed-point residual " << format_double(ref.vi_residual)
                << ", worst best-response improvement " << format_double(worst)
                << ", solver iterations " << ref.solver_iterations << '\n';
      return 0;
    }
    if (*plot_cmd) {
      std::vector<std::string> labels;
      if (!plot_labels.empty()) labels = parse_list(plot_labels);
      std::vector<PlotSeries> series;
      for (std::size_t k = 0; k < plot_inputs.size(); ++k) {
        std::ifstream is(plot_inputs[k]);
        if (!is) throw std::runtime_error("cannot open " + plot_inputs[k]);
        PlotSeries ps;
        ps.label = k < labels.size()
                       ? labels[k]
                       : fs::path(plot_inputs[k]).parent_path().filename()
                             .string();
        if (ps.label.empty())
          ps.label = fs::path(plot_inputs[k]).stem().string();
        for (const auto& pt : read_mean_curve_csv(is)) {
          ps.x.push_back(static_cast<double>(pt.iter));
          ps.y.push_back(pt.mean_sq_error);
          ps.band_lo.push_back(pt.band_lo);
          ps.band_hi.push_back(pt.band_hi);
        }
        series.push_back(std::move(ps));
      }
      PlotOptions popt;
      popt.title = plot_title;
      popt.log_x = !plot_linear;
      popt.log_y = !plot_linear;
      write_text_file(plot_out, render_svg(series, popt));
      std::cout << "plot written to " << plot_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace nashseek
