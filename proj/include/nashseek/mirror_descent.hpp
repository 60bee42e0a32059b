#pragma once
// Per-player strategy update: Bregman machinery with the Euclidean
// regularizer, exact projections for box/simplex/hyperplane sets, and a
// property check for the prox inequalities.
//
// With the Euclidean regularizer the prox step
//   x+ = argmin_{x' in X} { <y, x - x'> + D(x', x) }
// reduces to the exact projection P_X(x + y); the descent update passes
// y = -gamma * grad.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nashseek/game.hpp"
#include "nashseek/linalg.hpp"
#include "nashseek/rng.hpp"

namespace nashseek {

// Only the Euclidean kind ships; the struct keeps the update code generic in
// the strong-convexity modulus instead of hard-coding 1/2 ||.||^2.
struct Regularizer {
  enum class Kind { Euclidean } kind = Kind::Euclidean;
  double sigma = 1.0;  // strong-convexity modulus

  static Regularizer euclidean() { return Regularizer{}; }
};

enum class ProjectionMode { FullSet, HyperplaneOnly };

struct UpdateRule {
  ProjectionMode projection_mode = ProjectionMode::FullSet;
};

inline double bregman_divergence(const Regularizer& reg,
                                 std::span<const double> x,
                                 std::span<const double> x_ref) {
  if (x.size() != x_ref.size())
    throw std::invalid_argument("bregman_divergence: dimension mismatch");
  switch (reg.kind) {
    case Regularizer::Kind::Euclidean:
      return 0.5 * reg.sigma * squared_distance(x, x_ref);
  }
  throw std::logic_error("bregman_divergence: unknown regularizer");
}

inline std::vector<double> project_box(std::span<const double> y,
                                       std::span<const double> lo,
                                       std::span<const double> hi) {
  if (y.size() != lo.size() || y.size() != hi.size())
    throw std::invalid_argument("project_box: size mismatch");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("project_box: lo > hi");
    out[i] = std::min(std::max(y[i], lo[i]), hi[i]);
  }
  return out;
}

// Exact Euclidean projection onto {x >= 0, 1^T x = total} by sort and
// threshold: with u the coordinates sorted descending, the active support is
// the largest k such that u_k exceeds the running threshold, and every
// coordinate is shifted down by that threshold and clamped at zero.
inline std::vector<double> project_simplex(std::span<const double> y,
                                           double total = 1.0) {
  if (!(total > 0.0)) throw std::invalid_argument("project_simplex: total <= 0");
  if (y.empty()) throw std::invalid_argument("project_simplex: empty input");
  std::vector<double> u(y.begin(), y.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    running += u[k];
    const double t = (running - total) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) tau = t;
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = std::max(y[i] - tau, 0.0);
  return out;
}

// Exact projection onto {1^T x = 1}: shift every coordinate equally.
inline std::vector<double> project_hyperplane_sum_one(
    std::span<const double> y) {
  if (y.empty())
    throw std::invalid_argument("project_hyperplane_sum_one: empty input");
  const double shift = (1.0 - sum(y)) / static_cast<double>(y.size());
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + shift;
  return out;
}

inline std::vector<double> project_onto(const StrategySet& set,
                                        std::span<const double> y) {
  if (y.size() != set.dim)
    throw std::invalid_argument("project_onto: dimension mismatch");
  switch (set.kind) {
    case SetKind::Box:
      return project_box(y, set.lower, set.upper);
    case SetKind::Simplex:
      return project_simplex(y, set.total);
    case SetKind::HyperplaneSumOne:
      return project_hyperplane_sum_one(y);
  }
  throw std::logic_error("project_onto: unknown set kind");
}

// One player's update. FullSet projects the gradient step exactly onto the
// player's set. HyperplaneOnly applies the closed-form affine step
//   x - gamma*g + (1/m) 1 1^T (gamma*g),
// which keeps 1^T x = 1 but does not enforce signs.
inline std::vector<double> mirror_step(const Regularizer& reg,
                                       const StrategySet& set,
                                       const UpdateRule& rule,
                                       std::span<const double> x,
                                       std::span<const double> grad,
                                       double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("mirror_step: gamma <= 0");
  if (x.size() != set.dim || grad.size() != set.dim)
    throw std::invalid_argument("mirror_step: dimension mismatch");
  if (reg.kind != Regularizer::Kind::Euclidean)
    throw std::logic_error("mirror_step: unsupported regularizer");
  const double scale = gamma / reg.sigma;
  if (rule.projection_mode == ProjectionMode::HyperplaneOnly) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i];
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("mirror_step: point not on the hyperplane");
    double mean_step = 0.0;
    for (double g : grad) mean_step += scale * g;
    mean_step /= static_cast<double>(x.size());
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = x[i] - scale * grad[i] + mean_step;
    return out;
  }
  if (!set.contains(x, 1e-9))
    throw std::invalid_argument("mirror_step: infeasible point");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - scale * grad[i];
  return project_onto(set, y);
}

struct ProxCheckReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_violation = 0.0;  // most negative slack observed, as a positive number
  bool passed = false;
};

namespace detail {

inline std::vector<double> random_point_in(const StrategySet& set,
                                           RngStream& rng) {
  std::vector<double> x(set.dim);
  switch (set.kind) {
    case SetKind::Box:
      for (std::size_t i = 0; i < set.dim; ++i)
        x[i] = rng.uniform(set.lower[i], set.upper[i]);
      return x;
    case SetKind::Simplex: {
      for (auto& v : x) v = rng.uniform(0.0, 1.0);
      return project_simplex(x, set.total);
    }
    case SetKind::HyperplaneSumOne: {
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
      return project_hyperplane_sum_one(x);
    }
  }
  throw std::logic_error("random_point_in: unknown set kind");
}

}  // namespace detail

// Property check for the prox step x+ = argmin{ <y, x - x'> + D(x', x) }
// (equal to P(x + y/sigma) in the Euclidean case). For random x, p in the set
// and random y, three inequalities must hold up to the given slack:
//   (a) D(p, x) >= (sigma/2) ||p - x||^2
//   (b) D(p, x+) <= D(p, x) - D(x+, x) + <y, x+ - p>
//   (c) D(p, x+) <= D(p, x) + <y, x - p> + ||y||^2 / (2 sigma)
inline ProxCheckReport check_prox_inequalities(const Regularizer& reg,
                                          const StrategySet& set,
                                          std::size_t trials, RngStream& rng,
                                          double slack = 1e-9) {
  if (trials < 1) throw std::invalid_argument("check_prox_inequalities: trials < 1");
  ProxCheckReport report;
  report.trials = trials;
  std::vector<double> y(set.dim);
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> x = detail::random_point_in(set, rng);
    std::vector<double> p = detail::random_point_in(set, rng);
    for (auto& v : y) v = rng.uniform(-2.0, 2.0);
    std::vector<double> shifted(set.dim);
    for (std::size_t i = 0; i < set.dim; ++i)
      shifted[i] = x[i] + y[i] / reg.sigma;
    std::vector<double> xplus = project_onto(set, shifted);

    const double d_p_x = bregman_divergence(reg, p, x);
    const double d_p_xplus = bregman_divergence(reg, p, xplus);
    const double d_xplus_x = bregman_divergence(reg, xplus, x);
    double y_xplus_minus_p = 0.0, y_x_minus_p = 0.0;
    for (std::size_t i = 0; i < set.dim; ++i) {
      y_xplus_minus_p += y[i] * (xplus[i] - p[i]);
      y_x_minus_p += y[i] * (x[i] - p[i]);
    }
    const double slack_a = d_p_x - 0.5 * reg.sigma * squared_distance(p, x);
    const double slack_b = (d_p_x - d_xplus_x + y_xplus_minus_p) - d_p_xplus;
    const double slack_c =
        (d_p_x + y_x_minus_p + squared_norm(y) / (2.0 * reg.sigma)) - d_p_xplus;
    const double worst = std::min({slack_a, slack_b, slack_c});
    if (worst < -slack) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, -worst);
    }
  }
  report.passed = report.violations == 0;
  return report;
}

}  // namespace nashseek
