// Acceptance gate: one check per shipped guarantee, run at full scale.
// Prints one PASS/FAIL line per criterion; the exit code is the number of
// failures. The heavy rate checks reuse the experiment harness and write
// their artifact sets under the system temp directory for inspection.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "nashseek/experiment.hpp"
#include "nashseek/probe.hpp"

using namespace nashseek;
namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return std::string(buf);
}

// Exhaustive active-set reference for the simplex projection: try every
// subset of coordinates pinned to zero, shift the rest to the constraint
// plane, keep the feasible candidate closest to y.
std::vector<double> simplex_projection_bruteforce(const std::vector<double>& y,
                                                  double total) {
  const std::size_t d = y.size();
  std::vector<double> best;
  double best_sq = 0.0;
  for (std::uint64_t mask = 0; mask + 1 < (1ull << d); ++mask) {
    std::vector<double> cand(d, 0.0);
    std::size_t free_count = 0;
    double free_sum = 0.0;
    for (std::size_t k = 0; k < d; ++k)
      if (!(mask & (1ull << k))) {
        ++free_count;
        free_sum += y[k];
      }
    const double shift =
        (total - free_sum) / static_cast<double>(free_count);
    bool ok = true;
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (mask & (1ull << k)) {
        cand[k] = 0.0;
      } else {
        cand[k] = y[k] + shift;
        if (cand[k] < -1e-12) ok = false;
      }
      const double diff = cand[k] - y[k];
      sq += diff * diff;
    }
    if (!ok) continue;
    if (best.empty() || sq < best_sq) {
      best = std::move(cand);
      best_sq = sq;
    }
  }
  return best;
}

ExperimentConfig market_config(const std::string& name, AlgorithmKind alg,
                               double p, double h0, std::uint64_t iters) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.game = GameKind::Cournot;
  cfg.players = 20;
  cfg.markets = 5;
  cfg.instance_seed = 1;
  cfg.algorithm = alg;
  cfg.projection = ProjectionMode::FullSet;
  cfg.schedules.gamma = 1.5;
  cfg.schedules.ell0 = 1;
  cfg.schedules.p = p;
  cfg.schedules.h0 = h0;
  cfg.iters = iters;
  cfg.seeds = default_seed_list(20);
  cfg.record_every = 10;
  cfg.fit_window = 0.1;
  cfg.workers = 1;
  return cfg;
}

}  // namespace

int main() {
  int failures = 0;
  auto criterion = [&](int num, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", num,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  };
  auto failed = [&](int num, const std::exception& e) {
    criterion(num, false, std::string("exception: ") + e.what());
  };

  const fs::path out_root = fs::temp_directory_path() / "nashseek_acceptance";
  fs::remove_all(out_root);
  fs::create_directories(out_root);
  std::printf("acceptance artifacts under %s\n", out_root.string().c_str());

  // 1. Pair estimator is unbiased on a noisy quadratic: each coordinate of
  //    the empirical mean within 4 standard errors of the true gradient,
  //    d = 4, additive U[-1,1] noise, 1e5 replications.
  try {
    Timer t;
    const std::size_t d = 4;
    const std::vector<double> x{0.3, -0.2, 0.5, 0.1};
    std::vector<double> true_grad(d);
    for (std::size_t k = 0; k < d; ++k)
      true_grad[k] = 2.0 * static_cast<double>(k + 1) * x[k];
    auto eval = [d](std::span<const double> pt, RngStream& rng) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        v += static_cast<double>(k + 1) * pt[k] * pt[k];
      return v + rng.symmetric_uniform(1.0);
    };
    const std::uint64_t reps = 100000;
    const RngStream root = RngStream(2026).child(1);
    std::vector<double> mean(d, 0.0), m2(d, 0.0);
    for (std::uint64_t r = 0; r < reps; ++r) {
      const auto est = spsa_gradient(eval, x, 0.1, 2, root.child(r));
      for (std::size_t k = 0; k < d; ++k) {
        const double delta = est.g[k] - mean[k];
        mean[k] += delta / static_cast<double>(r + 1);
        m2[k] += delta * (est.g[k] - mean[k]);
      }
    }
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double se =
          std::sqrt(m2[k] / static_cast<double>(reps - 1) /
                    static_cast<double>(reps));
      worst_ratio = std::max(worst_ratio,
                             std::abs(mean[k] - true_grad[k]) / (4.0 * se));
    }
    const double secs = t.seconds();
    criterion(1, worst_ratio < 1.0 && secs < 10.0,
              "pair estimator bias on noisy quadratic: worst |bias|/4SE = " +
                  fmt(worst_ratio) + " (< 1 required), " + fmt(secs) + "s");
  } catch (const std::exception& e) {
    failed(1, e);
  }

  // 2. Variance scaling laws at the noise-dominated point: slope -1 +- 0.1
  //    against the pair count, slope -2 +- 0.2 against the smoothing radius.
  try {
    Timer t;
    const auto study = run_bias_variance_study(
        make_quad_noise_target(4), {0.02, 0.04, 0.08, 0.16, 0.32},
        {1, 2, 4, 8, 16, 32, 64}, 0.1, 4, 20000, 1);
    const double s_ell = study.variance_slope_vs_ell;
    const double s_h = study.variance_slope_vs_h;
    const bool ok = std::abs(s_ell + 1.0) <= 0.1 && std::abs(s_h + 2.0) <= 0.2;
    const double secs = t.seconds();
    criterion(2, ok && secs < 60.0,
              "variance slope vs pair count = " + fmt(s_ell) +
                  " (-1 +- 0.1), vs radius = " + fmt(s_h) + " (-2 +- 0.2), " +
                  fmt(secs) + "s");
  } catch (const std::exception& e) {
    failed(2, e);
  }

  // 3. Second-order bias on the cubic: bias/h^2 within [0.85, 1.15] at
  //    h in {0.05, 0.1}, noiseless, 1e6 replications each.
  try {
    Timer t;
    auto cubic = [](std::span<const double> pt, RngStream&) {
      return pt[0] * pt[0] * pt[0];
    };
    const std::vector<double> x{1.0};
    const std::vector<double> g{3.0};
    bool ok = true;
    std::string detail = "cubic bias ratios:";
    for (double h : {0.05, 0.1}) {
      const auto report = empirical_bias_variance(
          EstimatorKind::Spsa, cubic, x, g, h, 1, 1000000,
          RngStream(3).child(static_cast<std::uint64_t>(h * 1000)));
      const double ratio = report.empirical_bias_norm / (h * h);
      ok = ok && ratio >= 0.85 && ratio <= 1.15;
      detail += " h=" + fmt(h) + " -> " + fmt(ratio);
    }
    const double secs = t.seconds();
    criterion(3, ok && secs < 60.0,
              detail + " (within [0.85, 1.15]), " + fmt(secs) + "s");
  } catch (const std::exception& e) {
    failed(3, e);
  }

  // 4. Proximal-step inequalities: zero violations at slack 1e-9 over 1e4
  //    random trials on a simplex and on a box.
  try {
    Timer t;
    RngStream rng_a = RngStream(11).child(0);
    const auto rep_simplex =
        check_prox_inequalities(Regularizer::euclidean(),
                                StrategySet::simplex(6), 10000, rng_a, 1e-9);
    RngStream rng_b = RngStream(11).child(1);
    const auto rep_box = check_prox_inequalities(
        Regularizer::euclidean(),
        StrategySet::box({-1.0, 0.0, -0.5, 0.2, -2.0},
                         {1.0, 2.0, 0.5, 1.2, -1.0}),
        10000, rng_b, 1e-9);
    const bool ok = rep_simplex.violations == 0 && rep_box.violations == 0 &&
                    rep_simplex.trials == 10000 && rep_box.trials == 10000;
    const double secs = t.seconds();
    criterion(4, ok && secs < 10.0,
              "prox inequality violations: simplex " +
                  std::to_string(rep_simplex.violations) + "/10000, box " +
                  std::to_string(rep_box.violations) + "/10000, " + fmt(secs) +
                  "s");
  } catch (const std::exception& e) {
    failed(4, e);
  }

  // 5. Simplex projection equals the exhaustive active-set reference within
  //    1e-8 on 1e3 random points across dimensions 1..6.
  try {
    Timer t;
    RngStream rng = RngStream(12).child(0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t d = 1 + static_cast<std::size_t>(trial % 6);
      std::vector<double> y(d);
      for (auto& v : y) v = rng.uniform(-2.0, 2.0);
      const std::vector<double> fast = project_simplex(y, 1.0);
      const std::vector<double> slow = simplex_projection_bruteforce(y, 1.0);
      worst = std::max(worst, std::sqrt(squared_distance(fast, slow)));
    }
    const double secs = t.seconds();
    criterion(5, worst <= 1e-8 && secs < 10.0,
              "simplex projection vs exhaustive reference: worst gap = " +
                  fmt(worst) + " (<= 1e-8), " + fmt(secs) + "s");
  } catch (const std::exception& e) {
    failed(5, e);
  }

  // 6. Reference equilibrium certification on the 20-player, 5-market
  //    instance: residual <= 1e-8, every best-response improvement <= 1e-6,
  //    and two independent solves within 1e-7 of each other.
  try {
    Timer t;
    const CournotParams params = generate_cournot_instance(20, 5, 1);
    const GameInstance game = make_cournot_game(params, SetKind::Simplex);
    const double L = cournot_lipschitz(params);
    const double mu = compute_beta(params) / 2.0;
    const NEReference a = solve_ne_reference(game, 1e-10, 2000000, L, mu);
    const NEReference b = solve_ne_reference(game, 1e-10, 2000000);
    double worst_imp = 0.0;
    for (double v : a.per_player_improvement)
      worst_imp = std::max(worst_imp, v);
    const double gap = std::sqrt(squared_distance(a.x_star, b.x_star));
    const double secs = t.seconds();
    const bool ok =
        a.vi_residual <= 1e-8 && worst_imp <= 1e-6 && gap <= 1e-7;
    criterion(6, ok && secs < 60.0,
              "reference equilibrium: residual = " + fmt(a.vi_residual) +
                  " (<= 1e-8), worst improvement = " + fmt(worst_imp) +
                  " (<= 1e-6), start disagreement = " + fmt(gap) +
                  " (<= 1e-7), " + fmt(secs) + "s");
  } catch (const std::exception& e) {
    failed(6, e);
  }

  // 7. Closed-form convergence: noiseless duopoly, gamma = 1.5 > 1/beta,
  //    p = 0, T = 1e4; final squared distance to (2/3, 2/3) below 1e-3.
  try {
    Timer t;
    const GameInstance game = make_cournot_game(duopoly_params(), SetKind::Box);
    Schedules s;
    s.gamma = 1.5;
    s.ell0 = 1;
    s.p = 0.0;
    s.h0 = 0.1;
    const std::vector<double> x_star{2.0 / 3.0, 2.0 / 3.0};
    const std::vector<double> x0 = default_start(game);
    const RunTrace trace =
        run_sdl(game, s, Regularizer::euclidean(), UpdateRule{}, x0, 10000,
                &x_star, RngStream(1).child(kRunStreamLabel));
    const double final_sq = trace.sq_error.back();
    const double secs = t.seconds();
    criterion(7, final_sq < 1e-3 && secs < 10.0,
              "noiseless duopoly final squared error = " + fmt(final_sq) +
                  " (< 1e-3) after 10000 iterations, " + fmt(secs) + "s");
  } catch (const std::exception& e) {
    failed(7, e);
  }

  // 8. Rate slopes at full scale on the 20x5 instance, 20 seeds, last-decade
  //    window: p = 0 at T = 1e5 in [-0.7, -0.35]; p = 1 at T = 1e4 (its
  //    growing batches already cost ~1e8 evaluations per seed) in
  //    [-1.25, -0.75]; and the p = 1 slope is steeper.
  ExperimentSummary p0_summary;
  bool have_p0 = false;
  try {
    Timer t;
    const ExperimentConfig cfg_p0 =
        market_config("accept_p0", AlgorithmKind::Sdl, 0.0, 0.5, 100000);
    p0_summary = run_experiment(cfg_p0, (out_root / "p0").string());
    have_p0 = true;
    const ExperimentConfig cfg_p1 =
        market_config("accept_p1", AlgorithmKind::Sdl, 1.0, 0.5, 10000);
    const ExperimentSummary p1 =
        run_experiment(cfg_p1, (out_root / "p1").string());
    const double s0 = p0_summary.fit.slope;
    const double s1 = p1.fit.slope;
    const bool ok = p0_summary.fit_ok && p1.fit_ok && s0 >= -0.7 &&
                    s0 <= -0.35 && s1 >= -1.25 && s1 <= -0.75 && s1 < s0;
    criterion(8, ok,
              "rate slopes over 20 seeds: p=0 -> " + fmt(s0) +
                  " ([-0.7, -0.35]), p=1 -> " + fmt(s1) +
                  " ([-1.25, -0.75]), steeper for p=1, " + fmt(t.seconds()) +
                  "s");
  } catch (const std::exception& e) {
    failed(8, e);
  }

  // 9. Baseline ordering at matched iteration count T = 1e5, 20 seeds: the
  //    one-evaluation baseline ends with a larger mean squared error and a
  //    slope shallower by at least 0.05 than the pair estimator at p = 0.
  try {
    Timer t;
    if (!have_p0) throw std::runtime_error("p=0 run unavailable");
    const ExperimentConfig cfg_ss = market_config(
        "accept_single_shot", AlgorithmKind::SingleShot, 0.0, 1.0, 100000);
    const ExperimentSummary ss =
        run_experiment(cfg_ss, (out_root / "single_shot").string());
    const double err_ss = ss.final_mean_sq_error;
    const double err_p0 = p0_summary.final_mean_sq_error;
    const double slope_gap = ss.fit.slope - p0_summary.fit.slope;
    const bool ok =
        ss.fit_ok && err_ss > err_p0 && slope_gap >= 0.05;
    criterion(9, ok,
              "one-evaluation baseline: final error " + fmt(err_ss) + " > " +
                  fmt(err_p0) + ", slope " + fmt(ss.fit.slope) +
                  " shallower than " + fmt(p0_summary.fit.slope) + " by " +
                  fmt(slope_gap) + " (>= 0.05), " + fmt(t.seconds()) + "s");
  } catch (const std::exception& e) {
    failed(9, e);
  }

  // 10. Information isolation: scaling one rival's observed cost (after the
  //     draw, so the randomness is untouched) leaves every other player's
  //     emitted update sequence bit-identical, for 5 random rescalings. The
  //     check replays the loop stepwise along a common trajectory, since in
  //     free-running play the rescaled player's own path shifts and feeds
  //     back into everyone's costs through the joint state.
  try {
    Timer t;
    const CournotParams params = generate_cournot_instance(20, 5, 1);
    const GameInstance base = make_cournot_game(params, SetKind::Simplex);
    Schedules s;
    s.gamma = 1.5;
    s.h0 = 0.5;
    const std::vector<double> x0 = default_start(base);
    const RngStream run_stream = RngStream(1).child(kRunStreamLabel);
    RngStream pick = RngStream(99).child(0);
    bool all_identical = true;
    bool all_rivals_moved = true;
    for (int rep = 0; rep < 5; ++rep) {
      const std::size_t rival =
          1 + static_cast<std::size_t>(pick.next_u64() % 19);
      const double factor = std::exp(pick.symmetric_uniform(std::log(5.0)));
      GameInstance scaled = base;
      auto inner = base.sample_all_costs;
      scaled.sample_all_costs = [inner, rival, factor](
                                    std::span<const double> x, RngStream& rng,
                                    std::span<double> out) {
        inner(x, rng, out);
        out[rival] *= factor;
      };
      std::vector<double> x = x0;
      std::vector<double> next_a(base.total_dim), next_b(base.total_dim);
      SdlScratch scratch_a, scratch_b;
      bool rival_moved = false;
      for (std::uint64_t n = 1; n <= 300; ++n) {
        sdl_step(base, s, Regularizer::euclidean(), UpdateRule{}, run_stream,
                 n, x, next_a, scratch_a);
        sdl_step(scaled, s, Regularizer::euclidean(), UpdateRule{}, run_stream,
                 n, x, next_b, scratch_b);
        for (std::size_t i = 0; i < base.num_players; ++i)
          for (std::size_t k = 0; k < base.dims[i]; ++k) {
            const double va = next_a[base.offsets[i] + k];
            const double vb = next_b[base.offsets[i] + k];
            if (i == rival) {
              if (va != vb) rival_moved = true;
            } else if (va != vb) {
              all_identical = false;
            }
          }
        x = next_a;
      }
      all_rivals_moved = all_rivals_moved && rival_moved;
    }
    criterion(10, all_identical && all_rivals_moved,
              std::string("5 rival cost rescalings, 300 replayed steps each: "
                          "other players' updates bit-identical (") +
                  (all_identical ? "yes" : "no") + "), rescaled player's own "
                  "updates changed (" +
                  (all_rivals_moved ? "yes" : "no") + "), " +
                  fmt(t.seconds()) + "s");
  } catch (const std::exception& e) {
    failed(10, e);
  }

  // 11. Reproducibility: a persisted config, reloaded and re-run, produces
  //     bit-identical trace CSVs.
  try {
    Timer t;
    ExperimentConfig cfg =
        market_config("accept_repro", AlgorithmKind::Sdl, 0.0, 0.5, 2000);
    cfg.seeds = {1, 2};
    const fs::path cfg_path = out_root / "accept_repro.cfg";
    write_text_file(cfg_path.string(), config_to_text(cfg));
    const ExperimentConfig loaded = load_config(cfg_path.string());
    run_experiment(loaded, (out_root / "repro_a").string());
    run_experiment(loaded, (out_root / "repro_b").string());
    bool identical = true;
    for (const char* leaf : {"trace_seed1.csv", "trace_seed2.csv"}) {
      const std::string a =
          read_text_file((out_root / "repro_a" / leaf).string());
      const std::string b =
          read_text_file((out_root / "repro_b" / leaf).string());
      identical = identical && !a.empty() && a == b;
    }
    criterion(11, identical,
              std::string("persisted config re-run: trace CSVs bit-identical "
                          "(") +
                  (identical ? "yes" : "no") + "), " + fmt(t.seconds()) + "s");
  } catch (const std::exception& e) {
    failed(11, e);
  }

  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures;
}
