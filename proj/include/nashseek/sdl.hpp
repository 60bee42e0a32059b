#pragma once
// The outer learning loop: every iteration draws joint perturbation
// directions, observes two shared game realizations per direction, lets each
// player assemble its own gradient estimate from its own observations only,
// and applies the mirror-descent step with diminishing step size.
//
// Schedules follow gamma_n = gamma/n, ell_n = ceil(ell0 * n^p),
// h_n = h0 * n^{-(p+1)/4}. A single-shot baseline loop (one evaluation per
// iteration at a sphere-perturbed point) is provided for comparison.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashseek/game.hpp"
#include "nashseek/linalg.hpp"
#include "nashseek/mirror_descent.hpp"
#include "nashseek/rng.hpp"

namespace nashseek {

struct Schedules {
  double gamma = 0.5;     // step constant, gamma_n = gamma / n
  std::uint64_t ell0 = 1; // perturbation-pair base count
  double p = 0.0;         // batch growth exponent, ell_n = ceil(ell0 * n^p)
  double h0 = 0.1;        // smoothing constant, h_n = h0 * n^{-(p+1)/4}

  void validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("Schedules: gamma <= 0");
    if (ell0 < 1) throw std::invalid_argument("Schedules: ell0 < 1");
    if (!(p >= 0.0)) throw std::invalid_argument("Schedules: p < 0");
    if (!(h0 > 0.0)) throw std::invalid_argument("Schedules: h0 <= 0");
  }
};

struct ScheduleValues {
  double gamma_n = 0.0;
  std::uint64_t ell_n = 0;
  double h_n = 0.0;
};

inline ScheduleValues schedules_at(const Schedules& s, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("schedules_at: n < 1");
  s.validate();
  ScheduleValues v;
  const double nd = static_cast<double>(n);
  v.gamma_n = s.gamma / nd;
  if (s.p == 0.0) {
    v.ell_n = s.ell0;
  } else if (s.p == 1.0) {
    v.ell_n = s.ell0 * n;
  } else {
    // Nudge below the ideal value by one part in 1e12 so that products that
    // are mathematically integral do not round up from floating error.
    const double ideal = static_cast<double>(s.ell0) * std::pow(nd, s.p);
    v.ell_n = static_cast<std::uint64_t>(std::ceil(ideal * (1.0 - 1e-12)));
    if (v.ell_n < 1) v.ell_n = 1;
  }
  v.h_n = s.h0 * std::pow(nd, -(s.p + 1.0) / 4.0);
  return v;
}

struct RunTrace {
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;  // iterations actually run
  // Per-iteration records, index n-1:
  std::vector<double> sq_error;  // ||x^n - x*||^2, empty without a reference
  std::vector<std::uint64_t> cum_evals;  // cumulative cost evals per player
  std::vector<double> gamma_log;
  std::vector<std::uint64_t> ell_log;
  std::vector<double> h_log;
  // Thinned iterate snapshots (iterate_iters[k] is the stage of iterates[k]):
  std::vector<std::uint64_t> iterate_iters;
  std::vector<std::vector<double>> iterates;
  std::vector<double> final_x;
  std::uint64_t negativity_events = 0;  // iterations with any x component < 0
  bool stopped_on_h_underflow = false;
};

struct RunOptions {
  std::uint64_t seed_label = 0;  // copied into the trace for bookkeeping
  double h_underflow_stop = 1e-12;
};

struct SdlScratch {
  std::vector<double> delta, plus, minus, costs_plus, costs_minus, grad;

  void resize(const GameInstance& game) {
    delta.resize(game.total_dim);
    plus.resize(game.total_dim);
    minus.resize(game.total_dim);
    costs_plus.resize(game.num_players);
    costs_minus.resize(game.num_players);
    grad.resize(game.total_dim);
  }
};

namespace detail {

inline void require_finite_costs(std::span<const double> costs,
                                 std::uint64_t n, std::uint64_t pair,
                                 const char* side) {
  for (std::size_t i = 0; i < costs.size(); ++i)
    if (!std::isfinite(costs[i]))
      throw std::runtime_error(
          "sdl: non-finite cost for player " + std::to_string(i) +
          " at iteration " + std::to_string(n) + ", pair " +
          std::to_string(pair) + ", side " + side);
}

}  // namespace detail

// One stage of the loop, exposed so tests can replay recorded trajectories.
//
// Phase 1 (shared sampling): for each of ell_n directions, all players'
// costs are observed at the two jointly perturbed points, each observation
// being one shared game realization. Phase 2 (local updates): player i's
// gradient block is accumulated from its own cost observations and its own
// slice of each direction, then stepped through mirror_step. No quantity
// belonging to another player enters phase 2 for player i.
inline ScheduleValues sdl_step(const GameInstance& game, const Schedules& s,
                               const Regularizer& reg, const UpdateRule& rule,
                               const RngStream& run_stream, std::uint64_t n,
                               std::span<const double> x,
                               std::span<double> x_next, SdlScratch& scratch) {
  const ScheduleValues sv = schedules_at(s, n);
  const std::size_t d = game.total_dim;
  scratch.resize(game);
  for (double& v : scratch.grad) v = 0.0;
  RngStream iter_stream = run_stream.child(n);
  const double pair_scale = 1.0 / (2.0 * sv.h_n * static_cast<double>(sv.ell_n));
  for (std::uint64_t j = 0; j < sv.ell_n; ++j) {
    RngStream pair = iter_stream.child(j);
    RngStream delta_stream = pair.child(0);
    delta_stream.fill_rademacher(scratch.delta);
    for (std::size_t k = 0; k < d; ++k) {
      scratch.plus[k] = x[k] + sv.h_n * scratch.delta[k];
      scratch.minus[k] = x[k] - sv.h_n * scratch.delta[k];
    }
    RngStream plus_stream = pair.child(1);
    RngStream minus_stream = pair.child(2);
    game.sample_all_costs(scratch.plus, plus_stream, scratch.costs_plus);
    game.sample_all_costs(scratch.minus, minus_stream, scratch.costs_minus);
    detail::require_finite_costs(scratch.costs_plus, n, j, "+");
    detail::require_finite_costs(scratch.costs_minus, n, j, "-");
    for (std::size_t i = 0; i < game.num_players; ++i) {
      const double diff =
          (scratch.costs_plus[i] - scratch.costs_minus[i]) * pair_scale;
      const std::size_t off = game.offsets[i];
      for (std::size_t k = 0; k < game.dims[i]; ++k)
        scratch.grad[off + k] += diff * scratch.delta[off + k];
    }
  }
  for (std::size_t i = 0; i < game.num_players; ++i) {
    std::vector<double> stepped =
        mirror_step(reg, game.sets[i], rule, game.player_block(x, i),
                    std::span<const double>(scratch.grad)
                        .subspan(game.offsets[i], game.dims[i]),
                    sv.gamma_n);
    copy_into(stepped, x_next.subspan(game.offsets[i], game.dims[i]));
  }
  return sv;
}

namespace detail {

class TraceRecorder {
 public:
  TraceRecorder(RunTrace& trace, std::uint64_t iterations,
                std::uint64_t record_every, const std::vector<double>* ref)
      : trace_(trace), record_every_(record_every), ref_(ref) {
    trace_.cum_evals.reserve(iterations);
    trace_.gamma_log.reserve(iterations);
    trace_.ell_log.reserve(iterations);
    trace_.h_log.reserve(iterations);
    if (ref_) trace_.sq_error.reserve(iterations);
  }

  void record(std::uint64_t n, std::span<const double> x,
              const ScheduleValues& sv, std::uint64_t evals_this_iter) {
    cum_ += evals_this_iter;
    trace_.cum_evals.push_back(cum_);
    trace_.gamma_log.push_back(sv.gamma_n);
    trace_.ell_log.push_back(sv.ell_n);
    trace_.h_log.push_back(sv.h_n);
    if (ref_) trace_.sq_error.push_back(squared_distance(x, *ref_));
    for (double v : x)
      if (v < 0.0) {
        ++trace_.negativity_events;
        break;
      }
    if (record_every_ > 0 && (n % record_every_ == 0 || n == 1)) {
      trace_.iterate_iters.push_back(n);
      trace_.iterates.push_back(to_vector(x));
    }
    trace_.iterations = n;
  }

  void finish(std::span<const double> x) { trace_.final_x = to_vector(x); }

 private:
  RunTrace& trace_;
  std::uint64_t record_every_;
  const std::vector<double>* ref_;
  std::uint64_t cum_ = 0;
};

inline void require_feasible_start(const GameInstance& game,
                                   std::span<const double> x0) {
  if (x0.size() != game.total_dim)
    throw std::invalid_argument("run: x0 dimension mismatch");
  if (!game.feasible(x0, 1e-9))
    throw std::invalid_argument("run: infeasible starting point");
}

}  // namespace detail

// Runs T stages from x0. record_every controls iterate snapshots only
// (0 = none); squared errors, schedules, and evaluation counts are kept for
// every iteration. Stops early if h_n underflows the configured floor.
inline RunTrace run_sdl(const GameInstance& game, const Schedules& s,
                        const Regularizer& reg, const UpdateRule& rule,
                        std::span<const double> x0, std::uint64_t iterations,
                        const std::vector<double>* reference,
                        const RngStream& run_stream,
                        std::uint64_t record_every = 0,
                        const RunOptions& options = {}) {
  if (iterations < 1) throw std::invalid_argument("run_sdl: iterations < 1");
  s.validate();
  game.validate();
  detail::require_feasible_start(game, x0);
  if (reference && reference->size() != game.total_dim)
    throw std::invalid_argument("run_sdl: reference dimension mismatch");
  RunTrace trace;
  trace.seed = options.seed_label;
  detail::TraceRecorder rec(trace, iterations, record_every, reference);
  std::vector<double> x = to_vector(x0), x_next(game.total_dim);
  SdlScratch scratch;
  for (std::uint64_t n = 1; n <= iterations; ++n) {
    const ScheduleValues sv = schedules_at(s, n);
    if (sv.h_n < options.h_underflow_stop) {
      trace.stopped_on_h_underflow = true;
      break;
    }
    sdl_step(game, s, reg, rule, run_stream, n, x, x_next, scratch);
    x.swap(x_next);
    rec.record(n, x, sv, 2 * sv.ell_n);
  }
  rec.finish(x);
  return trace;
}

// One stage of the single-shot baseline: every player perturbs its own
// strategy on its unit sphere, the joint perturbed point is played once, and
// player i scales its single cost observation into a gradient estimate
//   g_i = (m_i / h) * F_i(x~) * z_i.
inline void single_shot_step(const GameInstance& game, double gamma_n,
                             double h_n, const Regularizer& reg,
                             const UpdateRule& rule,
                             const RngStream& run_stream, std::uint64_t n,
                             std::span<const double> x,
                             std::span<double> x_next, SdlScratch& scratch) {
  scratch.resize(game);
  RngStream iter_stream = run_stream.child(n);
  // scratch.delta holds the stacked sphere directions here
  for (std::size_t i = 0; i < game.num_players; ++i) {
    RngStream z_stream = iter_stream.child(1 + i);
    z_stream.unit_sphere(
        std::span<double>(scratch.delta).subspan(game.offsets[i], game.dims[i]));
  }
  for (std::size_t k = 0; k < game.total_dim; ++k)
    scratch.plus[k] = x[k] + h_n * scratch.delta[k];
  RngStream eval_stream = iter_stream.child(0);
  game.sample_all_costs(scratch.plus, eval_stream, scratch.costs_plus);
  detail::require_finite_costs(scratch.costs_plus, n, 0, "~");
  for (std::size_t i = 0; i < game.num_players; ++i) {
    const double scale =
        static_cast<double>(game.dims[i]) / h_n * scratch.costs_plus[i];
    const std::size_t off = game.offsets[i];
    for (std::size_t k = 0; k < game.dims[i]; ++k)
      scratch.grad[off + k] = scale * scratch.delta[off + k];
    std::vector<double> stepped =
        mirror_step(reg, game.sets[i], rule, game.player_block(x, i),
                    std::span<const double>(scratch.grad)
                        .subspan(off, game.dims[i]),
                    gamma_n);
    copy_into(stepped, x_next.subspan(off, game.dims[i]));
  }
}

// Baseline loop; h_n = h0 * n^{-h_exponent} with the 1/3 default that this
// estimator's bias/variance tradeoff calls for, gamma_n = gamma / n.
inline RunTrace run_single_shot_baseline(
    const GameInstance& game, double gamma, double h0,
    const Regularizer& reg, const UpdateRule& rule, std::span<const double> x0,
    std::uint64_t iterations, const std::vector<double>* reference,
    const RngStream& run_stream, std::uint64_t record_every = 0,
    const RunOptions& options = {}, double h_exponent = 1.0 / 3.0) {
  if (iterations < 1)
    throw std::invalid_argument("run_single_shot_baseline: iterations < 1");
  if (!(gamma > 0.0) || !(h0 > 0.0))
    throw std::invalid_argument("run_single_shot_baseline: bad gamma or h0");
  game.validate();
  detail::require_feasible_start(game, x0);
  if (reference && reference->size() != game.total_dim)
    throw std::invalid_argument(
        "run_single_shot_baseline: reference dimension mismatch");
  RunTrace trace;
  trace.seed = options.seed_label;
  detail::TraceRecorder rec(trace, iterations, record_every, reference);
  std::vector<double> x = to_vector(x0), x_next(game.total_dim);
  SdlScratch scratch;
  for (std::uint64_t n = 1; n <= iterations; ++n) {
    const double nd = static_cast<double>(n);
    ScheduleValues sv;
    sv.gamma_n = gamma / nd;
    sv.ell_n = 1;
    sv.h_n = h0 * std::pow(nd, -h_exponent);
    if (sv.h_n < options.h_underflow_stop) {
      trace.stopped_on_h_underflow = true;
      break;
    }
    single_shot_step(game, sv.gamma_n, sv.h_n, reg, rule, run_stream, n, x,
                     x_next, scratch);
    x.swap(x_next);
    rec.record(n, x, sv, 1);
  }
  rec.finish(x);
  return trace;
}

}  // namespace nashseek
