#pragma once
// Bias/variance study plumbing: named probe targets with known gradients,
// sweep grids over the smoothing radius h and the pair count ell, and small
// log-log slope fits for the variance scaling laws (expected -2 against h in
// a noise-dominated regime, -1 against ell).

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashseek/cournot.hpp"
#include "nashseek/csv.hpp"
#include "nashseek/estimators.hpp"
#include "nashseek/reference.hpp"

namespace nashseek {

struct ProbeTargetSpec {
  std::string name;
  std::vector<double> x;
  std::vector<double> true_grad;
  std::function<double(std::span<const double>, RngStream&)> eval;
};

// f(x) = sum_k (k+1) x_k^2 plus additive U[-1,1] noise, probed at the
// minimizer: the gradient is zero there, so estimator variance is pure
// observation noise and the 1/(ell h^2) law shows up cleanly.
inline ProbeTargetSpec make_quad_noise_target(std::size_t dim = 4) {
  ProbeTargetSpec t;
  t.name = "quad_noise";
  t.x.assign(dim, 0.0);
  t.true_grad.assign(dim, 0.0);
  t.eval = [dim](std::span<const double> x, RngStream& rng) {
    double v = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      v += static_cast<double>(k + 1) * x[k] * x[k];
    return v + rng.symmetric_uniform(1.0);
  };
  return t;
}

// Player 0's noisy cost as a function of its own block, rivals frozen at the
// set centers; the true gradient is the matching block of the exact map.
inline ProbeTargetSpec make_cournot_probe_target(const CournotParams& params) {
  params.validate();
  GameInstance game = make_cournot_game(params, SetKind::Simplex);
  ProbeTargetSpec t;
  t.name = "cournot";
  std::vector<double> base = detail::center_point(game);
  t.x = to_vector(game.player_block(std::span<const double>(base), 0));
  std::vector<double> grad(game.total_dim);
  game.exact_gradient(base, grad);
  t.true_grad =
      to_vector(std::span<const double>(grad).subspan(0, game.dims[0]));
  const std::size_t m = game.dims[0];
  t.eval = [params, base, m](std::span<const double> own, RngStream& rng) {
    if (own.size() != m)
      throw std::invalid_argument("cournot probe: own-block size mismatch");
    std::vector<double> joint = base;
    for (std::size_t k = 0; k < m; ++k) joint[k] = own[k];
    return cournot_noisy_cost(params, 0, joint, rng);
  };
  return t;
}

// Unwindowed least squares on (log x, log y); for the handful of sweep
// points here, unlike the trace slope fitter.
inline double loglog_slope(std::span<const double> xs,
                           std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("loglog_slope: need >= 2 aligned points");
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k] > 0.0) || !(ys[k] > 0.0))
      throw std::domain_error("loglog_slope: nonpositive input");
    lx[k] = std::log(xs[k]);
    ly[k] = std::log(ys[k]);
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw std::domain_error("loglog_slope: degenerate xs");
  return sxy / sxx;
}

struct BiasVarianceCell {
  double h = 0.0;
  std::uint64_t ell = 0;
  BiasVarianceReport report;
};

struct BiasVarianceStudy {
  std::string target_name;
  std::uint64_t replications = 0;
  double h_ref = 0.0;        // fixed h for the ell sweep
  std::uint64_t ell_ref = 0; // fixed ell for the h sweep
  std::vector<BiasVarianceCell> h_sweep;
  std::vector<BiasVarianceCell> ell_sweep;
  double variance_slope_vs_h = 0.0;
  double variance_slope_vs_ell = 0.0;
};

inline BiasVarianceStudy run_bias_variance_study(
    const ProbeTargetSpec& target, const std::vector<double>& h_list,
    const std::vector<std::uint64_t>& ell_list, double h_ref,
    std::uint64_t ell_ref, std::uint64_t replications, std::uint64_t seed) {
  if (h_list.empty() || ell_list.empty())
    throw std::invalid_argument("bias-variance study: empty sweep list");
  BiasVarianceStudy study;
  study.target_name = target.name;
  study.replications = replications;
  study.h_ref = h_ref;
  study.ell_ref = ell_ref;
  RngStream root = RngStream(seed).child(0x62760a);
  std::uint64_t cell_index = 0;
  auto run_cell = [&](double h, std::uint64_t ell) {
    BiasVarianceCell cell;
    cell.h = h;
    cell.ell = ell;
    cell.report = empirical_bias_variance(
        EstimatorKind::Spsa, target.eval, target.x, target.true_grad, h, ell,
        replications, root.child(cell_index++));
    return cell;
  };
  std::vector<double> hs, vars_h;
  for (double h : h_list) {
    auto cell = run_cell(h, ell_ref);
    hs.push_back(h);
    vars_h.push_back(cell.report.empirical_variance);
    study.h_sweep.push_back(std::move(cell));
  }
  std::vector<double> ells, vars_ell;
  for (std::uint64_t ell : ell_list) {
    auto cell = run_cell(h_ref, ell);
    ells.push_back(static_cast<double>(ell));
    vars_ell.push_back(cell.report.empirical_variance);
    study.ell_sweep.push_back(std::move(cell));
  }
  if (hs.size() >= 2) study.variance_slope_vs_h = loglog_slope(hs, vars_h);
  if (ells.size() >= 2)
    study.variance_slope_vs_ell = loglog_slope(ells, vars_ell);
  return study;
}

inline std::string bias_variance_csv(const BiasVarianceStudy& study) {
  std::ostringstream os;
  os << "target,sweep,h,ell,replications,bias_norm,variance,mse\n";
  auto row = [&](const char* sweep, const BiasVarianceCell& c) {
    os << study.target_name << ',' << sweep << ',' << format_double(c.h) << ','
       << c.ell << ',' << c.report.replications << ','
       << format_double(c.report.empirical_bias_norm) << ','
       << format_double(c.report.empirical_variance) << ','
       << format_double(c.report.mse) << '\n';
  };
  for (const auto& c : study.h_sweep) row("h", c);
  for (const auto& c : study.ell_sweep) row("ell", c);
  return os.str();
}

inline std::string bias_variance_summary(const BiasVarianceStudy& study) {
  std::ostringstream os;
  os << "bias-variance study on target " << study.target_name << ", "
     << study.replications << " replications per cell\n";
  os << "variance vs h at ell=" << study.ell_ref
     << ": log-log slope = " << format_double(study.variance_slope_vs_h)
     << " (noise-dominated expectation: -2)\n";
  os << "variance vs ell at h=" << format_double(study.h_ref)
     << ": log-log slope = " << format_double(study.variance_slope_vs_ell)
     << " (expectation: -1)\n";
  os << "# machine-readable\n";
  os << "target=" << study.target_name << '\n';
  os << "replications=" << study.replications << '\n';
  os << "variance_slope_vs_h=" << format_double(study.variance_slope_vs_h)
     << '\n';
  os << "variance_slope_vs_ell=" << format_double(study.variance_slope_vs_ell)
     << '\n';
  return os.str();
}

}  // namespace nashseek
