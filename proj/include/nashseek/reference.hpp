#pragma once
// Ground truth and measurement: a high-precision reference equilibrium
// solver for games with an exact expected-gradient map, the fixed-point
// residual it certifies, and log-log slope fitting for empirical rates.
//
// The solver iterates x <- P(x - tau * phi(x)), which contracts for a
// strongly monotone Lipschitz map when tau = mu / L^2. Solutions are
// certified two ways: the fixed-point residual, and a per-player
// best-response probe that tries to improve each player's expected cost with
// rivals frozen.

#include <algorithm>
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

namespace nashseek {

struct NEReference {
  std::vector<double> x_star;
  double vi_residual = 0.0;
  std::vector<double> per_player_improvement;  // >= 0, ~0 at an equilibrium
  std::uint64_t solver_iterations = 0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::uint64_t window_lo = 0;
  std::uint64_t window_hi = 0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

// ||x - P(x - tau * phi(x))|| with per-player projections.
inline double vi_residual(const GameInstance& game, std::span<const double> x,
                          double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("vi_residual: tau <= 0");
  if (!game.exact_gradient)
    throw std::invalid_argument("vi_residual: exact_gradient missing");
  if (x.size() != game.total_dim)
    throw std::invalid_argument("vi_residual: dimension mismatch");
  std::vector<double> grad(game.total_dim), shifted(game.total_dim);
  game.exact_gradient(x, grad);
  for (std::size_t k = 0; k < game.total_dim; ++k)
    shifted[k] = x[k] - tau * grad[k];
  double sq = 0.0;
  for (std::size_t i = 0; i < game.num_players; ++i) {
    std::vector<double> proj =
        project_onto(game.sets[i], game.player_block(shifted, i));
    sq += squared_distance(proj, game.player_block(x, i));
  }
  return std::sqrt(sq);
}

namespace detail {

// Symmetric-part spectral bounds of the gradient map's Jacobian at x0,
// by central differences and power iteration. Exact for affine maps up to
// the power-iteration tolerance; safety margins are the caller's job.
struct SpectralBounds {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
};

inline SpectralBounds jacobian_spectral_bounds(const GameInstance& game,
                                               std::span<const double> x0,
                                               double fd_h = 1e-5) {
  const std::size_t d = game.total_dim;
  std::vector<double> jac(d * d);
  std::vector<double> point = to_vector(x0), gp(d), gm(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double xj = point[j];
    point[j] = xj + fd_h;
    game.exact_gradient(point, gp);
    point[j] = xj - fd_h;
    game.exact_gradient(point, gm);
    point[j] = xj;
    for (std::size_t i = 0; i < d; ++i)
      jac[i * d + j] = (gp[i] - gm[i]) / (2.0 * fd_h);
  }
  std::vector<double> sym(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      sym[i * d + j] = 0.5 * (jac[i * d + j] + jac[j * d + i]);

  // Power iteration on (shift*I - S); shift = 0 iterates on S itself. The
  // returned value is the Rayleigh quotient of S at the converged direction,
  // so a positive shift larger than lambda_max drives v toward the smallest
  // eigenvector of S and the return value toward lambda_min.
  auto rayleigh = [&](double shift) {
    std::vector<double> v(d), av(d);
    for (std::size_t i = 0; i < d; ++i)
      v[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
    const double v0 = norm(v);
    for (double& vi : v) vi /= v0;
    double quotient = 0.0;
    for (int it = 0; it < 800; ++it) {
      for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        const double* row = sym.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) s += row[j] * v[j];
        av[i] = s;
      }
      quotient = dot(v, av);
      if (shift != 0.0)
        for (std::size_t i = 0; i < d; ++i) av[i] = shift * v[i] - av[i];
      const double len = norm(av);
      if (!(len > 0.0)) return shift == 0.0 ? quotient : 0.0;
      for (std::size_t i = 0; i < d; ++i) v[i] = av[i] / len;
    }
    return quotient;
  };

  SpectralBounds b;
  b.lambda_max = rayleigh(0.0);
  b.lambda_min = rayleigh(std::abs(b.lambda_max) + 1.0);
  return b;
}

inline std::vector<double> center_point(const GameInstance& game) {
  std::vector<double> x(game.total_dim);
  for (std::size_t i = 0; i < game.num_players; ++i) {
    auto block = game.mutable_player_block(std::span<double>(x), i);
    const StrategySet& set = game.sets[i];
    switch (set.kind) {
      case SetKind::Box:
        for (std::size_t k = 0; k < set.dim; ++k)
          block[k] = 0.5 * (set.lower[k] + set.upper[k]);
        break;
      case SetKind::Simplex:
        for (auto& v : block) v = set.total / static_cast<double>(set.dim);
        break;
      case SetKind::HyperplaneSumOne:
        for (auto& v : block) v = 1.0 / static_cast<double>(set.dim);
        break;
    }
  }
  return x;
}

inline std::vector<double> skewed_point(const GameInstance& game) {
  std::vector<double> x(game.total_dim);
  for (std::size_t i = 0; i < game.num_players; ++i) {
    auto block = game.mutable_player_block(std::span<double>(x), i);
    const StrategySet& set = game.sets[i];
    switch (set.kind) {
      case SetKind::Box:
        for (std::size_t k = 0; k < set.dim; ++k)
          block[k] = set.lower[k] + 0.9 * (set.upper[k] - set.lower[k]);
        break;
      case SetKind::Simplex:
        for (auto& v : block) v = 0.0;
        block[0] = set.total;
        break;
      case SetKind::HyperplaneSumOne:
        for (auto& v : block) v = 0.0;
        block[0] = 1.0;
        break;
    }
  }
  return x;
}

struct FixedPointResult {
  std::vector<double> x;
  double residual = 0.0;
  std::uint64_t iterations = 0;
};

inline FixedPointResult projected_fixed_point(const GameInstance& game,
                                              std::vector<double> x,
                                              double tau, double target,
                                              std::uint64_t max_iter) {
  const std::size_t d = game.total_dim;
  std::vector<double> grad(d), shifted(d), x_next(d);
  FixedPointResult res;
  double residual = 0.0;
  std::uint64_t it = 0;
  for (; it < max_iter; ++it) {
    game.exact_gradient(x, grad);
    for (std::size_t k = 0; k < d; ++k) shifted[k] = x[k] - tau * grad[k];
    for (std::size_t i = 0; i < game.num_players; ++i) {
      std::vector<double> proj =
          project_onto(game.sets[i], game.player_block(shifted, i));
      copy_into(proj, game.mutable_player_block(std::span<double>(x_next), i));
    }
    residual = std::sqrt(squared_distance(x_next, x));
    x.swap(x_next);
    if (residual <= target || !std::isfinite(residual) || residual > 1e12) {
      ++it;
      break;
    }
  }
  res.x = std::move(x);
  res.residual = residual;
  res.iterations = it;
  return res;
}

}  // namespace detail

// Best-response probe: from x_star, minimize player i's expected cost over
// its own set with rivals frozen, by projected gradient with step 1/L.
// Descent is monotone, so the reported improvement is nonnegative.
inline double best_response_improvement(const GameInstance& game,
                                        std::span<const double> x_star,
                                        std::size_t player, double lipschitz,
                                        std::uint64_t inner_iters = 20000) {
  if (!game.expected_cost || !game.exact_gradient)
    throw std::invalid_argument(
        "best_response_improvement: analytic closures missing");
  const std::size_t d = game.total_dim;
  std::vector<double> point = to_vector(x_star), grad(d);
  const double base_cost = game.expected_cost(player, point);
  double best_cost = base_cost;
  const double tau = 1.0 / lipschitz;
  const std::size_t off = game.offsets[player], m = game.dims[player];
  std::vector<double> shifted(m);
  for (std::uint64_t it = 0; it < inner_iters; ++it) {
    game.exact_gradient(point, grad);
    for (std::size_t k = 0; k < m; ++k)
      shifted[k] = point[off + k] - tau * grad[off + k];
    std::vector<double> proj = project_onto(game.sets[player], shifted);
    const double moved =
        squared_distance(proj, game.player_block(std::span<const double>(point),
                                                 player));
    copy_into(proj, std::span<double>(point).subspan(off, m));
    best_cost = std::min(best_cost, game.expected_cost(player, point));
    if (moved < 1e-26) break;
  }
  return base_cost - best_cost;
}

// Solves for the unique equilibrium of the expected game. The internal
// residual target is tightened by the condition number so that two solves
// from different starts agree within 10*tol; both the fixed-point residual
// and the per-player best-response improvements are computed for the result.
// lipschitz/strong_mono of the gradient map may be supplied; otherwise they
// are estimated from the Jacobian at the set centers with safety margins.
inline NEReference solve_ne_reference(const GameInstance& game, double tol,
                                      std::uint64_t max_iter,
                                      double lipschitz = 0.0,
                                      double strong_mono = 0.0) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_ne_reference: tol <= 0");
  if (!game.exact_gradient)
    throw std::invalid_argument("solve_ne_reference: exact_gradient missing");
  game.validate();
  std::vector<double> start_a = detail::center_point(game);
  if (lipschitz <= 0.0 || strong_mono <= 0.0) {
    const auto bounds = detail::jacobian_spectral_bounds(game, start_a);
    if (lipschitz <= 0.0) lipschitz = bounds.lambda_max * 1.1;
    if (strong_mono <= 0.0) strong_mono = bounds.lambda_min * 0.9;
  }
  if (!(strong_mono > 0.0))
    throw std::domain_error(
        "solve_ne_reference: gradient map is not strongly monotone");
  // A residual of r bounds the distance to the fixed point by r / (1 - q),
  // q the contraction factor, so solving to this target keeps independent
  // starts within 10*tol of each other.
  auto target_for = [tol](double q) {
    return std::min(tol, 2.5 * tol * (1.0 - q));
  };
  // Step 1/L contracts with factor 1 - mu/L when the map has a symmetric
  // Jacobian (true for the Cournot family); the smaller step mu/L^2 is the
  // general strongly-monotone fallback with factor sqrt(1 - (mu/L)^2).
  const double ratio = strong_mono / lipschitz;
  const double tau_fast = 1.0 / lipschitz;
  const double q_fast = std::max(0.0, 1.0 - ratio);
  const double tau_safe = strong_mono / (lipschitz * lipschitz);
  const double q_safe = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));

  double target = target_for(q_fast);
  auto run_a = detail::projected_fixed_point(game, start_a, tau_fast, target,
                                             max_iter);
  auto run_b = detail::projected_fixed_point(game, detail::skewed_point(game),
                                             tau_fast, target, max_iter);
  if (run_a.residual > target || run_b.residual > target) {
    target = target_for(q_safe);
    run_a = detail::projected_fixed_point(game, std::move(start_a), tau_safe,
                                          target, max_iter);
    run_b = detail::projected_fixed_point(game, detail::skewed_point(game),
                                          tau_safe, target, max_iter);
  }
  if (run_a.residual > target || run_b.residual > target)
    throw std::runtime_error(
        "solve_ne_reference: no convergence in " + std::to_string(max_iter) +
        " iterations, last residual " + std::to_string(run_a.residual));
  const double disagreement =
      std::sqrt(squared_distance(run_a.x, run_b.x));
  if (disagreement > 10.0 * tol)
    throw std::runtime_error(
        "solve_ne_reference: starts disagree by " +
        std::to_string(disagreement) + " (limit " + std::to_string(10.0 * tol) +
        ")");

  NEReference ref;
  ref.x_star = std::move(run_a.x);
  ref.solver_iterations = run_a.iterations + run_b.iterations;
  ref.vi_residual = vi_residual(game, ref.x_star, 1.0 / lipschitz);
  ref.per_player_improvement.resize(game.num_players, 0.0);
  if (game.expected_cost) {
    for (std::size_t i = 0; i < game.num_players; ++i)
      ref.per_player_improvement[i] =
          best_response_improvement(game, ref.x_star, i, lipschitz);
  }
  return ref;
}

// Least squares on (log n, log value) over the tail window n >= fraction *
// n_max. Requires at least 50 points and strictly positive values.
inline RateFit fit_rate_slope(std::span<const std::uint64_t> iters,
                              std::span<const double> values,
                              double window_fraction = 0.1) {
  if (iters.size() != values.size())
    throw std::invalid_argument("fit_rate_slope: size mismatch");
  if (iters.empty()) throw std::invalid_argument("fit_rate_slope: empty input");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw std::invalid_argument("fit_rate_slope: bad window fraction");
  const std::uint64_t n_max = *std::max_element(iters.begin(), iters.end());
  const double lo = window_fraction * static_cast<double>(n_max);
  std::vector<double> xs, ys;
  RateFit fit;
  fit.window_hi = n_max;
  fit.window_lo = n_max;
  for (std::size_t k = 0; k < iters.size(); ++k) {
    if (static_cast<double>(iters[k]) < lo) continue;
    if (!(values[k] > 0.0))
      throw std::domain_error(
          "fit_rate_slope: nonpositive value in window at n = " +
          std::to_string(iters[k]));
    xs.push_back(std::log(static_cast<double>(iters[k])));
    ys.push_back(std::log(values[k]));
    fit.window_lo = std::min(fit.window_lo, iters[k]);
  }
  if (xs.size() < 50)
    throw std::invalid_argument("fit_rate_slope: fewer than 50 points in window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  // Threshold, not an exact-zero test: identical abscissae leave only
  // accumulated rounding noise in sxx, far below any real log-spacing.
  if (!(sxx > static_cast<double>(xs.size()) * 1e-24))
    throw std::domain_error("fit_rate_slope: degenerate abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = xs.size();
  const double ss_res = syy - sxy * sxy / sxx;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace nashseek
