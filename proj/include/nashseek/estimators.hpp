#pragma once
// Zeroth-order gradient estimators and an empirical bias/variance probe.
//
// The workhorse is the simultaneous-perturbation estimator
//   g = (1/ell) sum_j [fhat(x + h D_j) - fhat(x - h D_j)] / (2h) * D_j
// with Rademacher D_j, whose componentwise reciprocal equals itself. The two
// evaluations of each pair use independent noise. Also provided: the
// single-shot sphere estimator (one evaluation at a perturbed point) and
// coordinate-wise central finite differences.
//
// Evaluation callables have signature double(std::span<const double>,
// RngStream&). Estimators never consume the stream they are handed; they
// derive child streams per perturbation pair, so pairs could be evaluated
// concurrently and results are reproducible from the stream identity alone.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "nashseek/linalg.hpp"
#include "nashseek/rng.hpp"

namespace nashseek {

// Rademacher perturbation direction; entries are exactly +/-1.
struct PerturbationVector {
  std::vector<double> entries;
};

struct GradientEstimate {
  std::vector<double> g;
  double h_used = 0.0;
  std::uint64_t ell_used = 0;
  std::uint64_t eval_count = 0;
};

struct BiasVarianceReport {
  std::vector<double> mean_estimate;
  double empirical_bias_norm = 0.0;
  double empirical_variance = 0.0;  // trace of the sample covariance
  double mse = 0.0;
  std::uint64_t replications = 0;
};

inline PerturbationVector sample_perturbation(std::size_t d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_perturbation: d < 1");
  PerturbationVector p;
  p.entries.resize(d);
  rng.fill_rademacher(p.entries);
  return p;
}

template <class Eval>
GradientEstimate spsa_gradient(Eval&& eval, std::span<const double> x, double h,
                               std::uint64_t ell, const RngStream& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("spsa_gradient: h <= 0");
  if (ell < 1) throw std::invalid_argument("spsa_gradient: ell < 1");
  const std::size_t d = x.size();
  GradientEstimate est;
  est.g.assign(d, 0.0);
  est.h_used = h;
  est.ell_used = ell;
  est.eval_count = 2 * ell;
  std::vector<double> delta(d), plus(d), minus(d);
  for (std::uint64_t j = 0; j < ell; ++j) {
    RngStream pair = rng.child(j);
    RngStream delta_stream = pair.child(0);
    delta_stream.fill_rademacher(delta);
    for (std::size_t i = 0; i < d; ++i) {
      plus[i] = x[i] + h * delta[i];
      minus[i] = x[i] - h * delta[i];
    }
    RngStream plus_stream = pair.child(1);
    RngStream minus_stream = pair.child(2);
    const double fp = eval(std::span<const double>(plus), plus_stream);
    const double fm = eval(std::span<const double>(minus), minus_stream);
    const double scale = (fp - fm) / (2.0 * h);
    for (std::size_t i = 0; i < d; ++i) est.g[i] += scale * delta[i];
  }
  const double inv_ell = 1.0 / static_cast<double>(ell);
  for (double& v : est.g) v *= inv_ell;
  return est;
}

// One evaluation at the perturbed own-strategy point x + h z, z uniform on
// the unit sphere of the player's own space; g = (m/h) * fhat * z. The
// caller-supplied embed closure maps the perturbed own block to the joint
// point the oracle expects (identity when the oracle acts on own variables).
template <class Eval, class Embed>
GradientEstimate single_shot_gradient(Eval&& eval, std::span<const double> x_own,
                                      Embed&& embed, double h,
                                      const RngStream& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("single_shot_gradient: h <= 0");
  const std::size_t m = x_own.size();
  GradientEstimate est;
  est.g.resize(m);
  est.h_used = h;
  est.ell_used = 1;
  est.eval_count = 1;
  std::vector<double> z(m), perturbed(m);
  RngStream z_stream = rng.child(0);
  z_stream.unit_sphere(z);
  for (std::size_t i = 0; i < m; ++i) perturbed[i] = x_own[i] + h * z[i];
  std::span<const double> joint = embed(std::span<const double>(perturbed));
  RngStream eval_stream = rng.child(1);
  const double value = eval(joint, eval_stream);
  const double scale = static_cast<double>(m) / h * value;
  for (std::size_t i = 0; i < m; ++i) est.g[i] = scale * z[i];
  return est;
}

template <class Eval>
GradientEstimate central_fd_gradient(Eval&& eval, std::span<const double> x,
                                     double h, std::uint64_t reps,
                                     const RngStream& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("central_fd_gradient: h <= 0");
  if (reps < 1) throw std::invalid_argument("central_fd_gradient: reps < 1");
  const std::size_t d = x.size();
  GradientEstimate est;
  est.g.assign(d, 0.0);
  est.h_used = h;
  est.ell_used = reps;
  est.eval_count = 2 * d * reps;
  std::vector<double> point(x.begin(), x.end());
  for (std::uint64_t r = 0; r < reps; ++r) {
    RngStream rep = rng.child(r);
    for (std::size_t i = 0; i < d; ++i) {
      RngStream plus_stream = rep.child(2 * i);
      RngStream minus_stream = rep.child(2 * i + 1);
      const double xi = point[i];
      point[i] = xi + h;
      const double fp = eval(std::span<const double>(point), plus_stream);
      point[i] = xi - h;
      const double fm = eval(std::span<const double>(point), minus_stream);
      point[i] = xi;
      est.g[i] += (fp - fm) / (2.0 * h);
    }
  }
  const double inv = 1.0 / static_cast<double>(reps);
  for (double& v : est.g) v *= inv;
  return est;
}

enum class EstimatorKind { Spsa, SingleShot, CentralFd };

// Monte Carlo probe of an estimator's moments against a known gradient.
// Variance and MSE use 1/R normalization so the decomposition
//   mse = bias_norm^2 + variance
// is an algebraic identity of the same sample; both sides are accumulated
// independently and the report is checked against the identity in tests.
// For Spsa, ell is the pair count; for CentralFd it is the averaging reps;
// SingleShot ignores it and perturbs on the sphere of the full input space.
template <class Eval>
BiasVarianceReport empirical_bias_variance(EstimatorKind kind, Eval&& eval,
                                           std::span<const double> x,
                                           std::span<const double> true_grad,
                                           double h, std::uint64_t ell,
                                           std::uint64_t replications,
                                           const RngStream& rng) {
  if (replications < 100)
    throw std::invalid_argument("empirical_bias_variance: replications < 100");
  const std::size_t d = x.size();
  if (true_grad.size() != d)
    throw std::invalid_argument("empirical_bias_variance: gradient size");
  std::vector<double> mean(d, 0.0), m2(d, 0.0);
  double mse_direct = 0.0;
  const auto identity_embed = [](std::span<const double> own) { return own; };
  for (std::uint64_t r = 0; r < replications; ++r) {
    RngStream stream = rng.child(r);
    GradientEstimate est;
    switch (kind) {
      case EstimatorKind::Spsa:
        est = spsa_gradient(eval, x, h, ell, stream);
        break;
      case EstimatorKind::SingleShot:
        est = single_shot_gradient(eval, x, identity_embed, h, stream);
        break;
      case EstimatorKind::CentralFd:
        est = central_fd_gradient(eval, x, h, ell, stream);
        break;
    }
    mse_direct += squared_distance(est.g, true_grad);
    // Welford, vectorized per coordinate.
    const double inv_count = 1.0 / static_cast<double>(r + 1);
    for (std::size_t i = 0; i < d; ++i) {
      const double delta = est.g[i] - mean[i];
      mean[i] += delta * inv_count;
      m2[i] += delta * (est.g[i] - mean[i]);
    }
  }
  BiasVarianceReport report;
  report.replications = replications;
  report.mean_estimate = std::move(mean);
  report.empirical_bias_norm =
      std::sqrt(squared_distance(report.mean_estimate, true_grad));
  double var = 0.0;
  for (double v : m2) var += v;
  report.empirical_variance = var / static_cast<double>(replications);
  report.mse = mse_direct / static_cast<double>(replications);
  return report;
}

// The smoothing radius minimizing the probe MSE at fixed pair count scales
// as ell^{-1/6}: bias^2 ~ h^4 against variance ~ 1/(ell h^2). Useful for
// choosing probe settings; the learning loop uses its own schedule because
// minimizing per-estimate MSE does not give the best convergence rate.
inline double mse_optimal_h(std::uint64_t ell, double constant = 1.0) {
  if (ell < 1) throw std::invalid_argument("mse_optimal_h: ell < 1");
  return constant * std::pow(static_cast<double>(ell), -1.0 / 6.0);
}

}  // namespace nashseek
