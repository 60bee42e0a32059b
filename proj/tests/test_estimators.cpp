#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <span>
#include <vector>

#include "nashseek/estimators.hpp"
#include "nashseek/rng.hpp"

using namespace nashseek;

namespace {

// f(x) = sum (k+1) x_k^2 + U[-1,1] noise; grad = 2 (k+1) x_k.
double noisy_quadratic(std::span<const double> x, RngStream& rng) {
  double v = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    v += static_cast<double>(k + 1) * x[k] * x[k];
  return v + rng.symmetric_uniform(1.0);
}

std::vector<double> quadratic_gradient(std::span<const double> x) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    g[k] = 2.0 * static_cast<double>(k + 1) * x[k];
  return g;
}

}  // namespace

TEST_CASE("two-point estimate is unbiased on a noisy quadratic") {
  const std::vector<double> x{0.3, -0.2, 0.5, 0.1};
  const std::vector<double> true_grad = quadratic_gradient(x);
  RngStream root(1001);
  const auto report =
      empirical_bias_variance(EstimatorKind::Spsa, noisy_quadratic, x,
                              true_grad, 0.1, 4, 20000, root);
  // standard error of the bias norm ~ sqrt(variance / R)
  const double se = std::sqrt(report.empirical_variance / 20000.0);
  CHECK(report.empirical_bias_norm < 4.0 * se + 1e-12);
}

TEST_CASE("one-dimensional noiseless quadratic is recovered exactly") {
  const std::vector<double> x{0.7};
  auto clean = [](std::span<const double> p, RngStream&) {
    return 3.0 * p[0] * p[0];
  };
  RngStream g(5);
  const GradientEstimate est = spsa_gradient(clean, x, 0.05, 1, g);
  // (f(x+h) - f(x-h)) / 2h = 6x exactly, for either sign of the direction
  CHECK(est.g[0] == Catch::Approx(6.0 * 0.7).margin(1e-12));
}

TEST_CASE("cubic smoothing bias equals h^2 at the unit point") {
  // f(x) = x^3, x = 1: the two-point difference quotient is 3x^2 + h^2, so
  // the estimate's expectation exceeds the gradient by exactly h^2.
  const std::vector<double> x{1.0};
  auto cubic = [](std::span<const double> p, RngStream&) {
    return p[0] * p[0] * p[0];
  };
  for (double h : {0.05, 0.1}) {
    RngStream root(2002);
    const auto report = empirical_bias_variance(
        EstimatorKind::Spsa, cubic, x, std::vector<double>{3.0}, h, 1, 200,
        root);
    CHECK(report.empirical_bias_norm / (h * h) ==
          Catch::Approx(1.0).margin(1e-9));
    CHECK(report.empirical_variance < 1e-20);  // noiseless, d = 1
  }
}

TEST_CASE("variance scales like 1/ell and 1/h^2 in the noise regime") {
  // At the quadratic's minimizer the signal vanishes, so the difference
  // quotient is pure noise: variance ~ d sigma^2 / (2 ell h^2).
  const std::vector<double> x(4, 0.0);
  const std::vector<double> true_grad(4, 0.0);

  std::vector<double> log_ell, log_var_ell;
  for (std::uint64_t ell : {1, 2, 4, 8, 16, 32, 64}) {
    RngStream root(3000 + ell);
    const auto report = empirical_bias_variance(
        EstimatorKind::Spsa, noisy_quadratic, x, true_grad, 0.1, ell, 4000,
        root);
    log_ell.push_back(std::log(static_cast<double>(ell)));
    log_var_ell.push_back(std::log(report.empirical_variance));
  }
  // least-squares slope
  auto slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
  };
  CHECK(slope(log_ell, log_var_ell) == Catch::Approx(-1.0).margin(0.15));

  std::vector<double> log_h, log_var_h;
  for (double h : {0.02, 0.04, 0.08, 0.16, 0.32}) {
    RngStream root(static_cast<std::uint64_t>(4000 + 1000 * h));
    const auto report = empirical_bias_variance(
        EstimatorKind::Spsa, noisy_quadratic, x, true_grad, h, 4, 4000, root);
    log_h.push_back(std::log(h));
    log_var_h.push_back(std::log(report.empirical_variance));
  }
  CHECK(slope(log_h, log_var_h) == Catch::Approx(-2.0).margin(0.25));
}

TEST_CASE("decomposition identity: mse equals bias^2 plus variance") {
  const std::vector<double> x{0.4, -0.1, 0.2};
  const std::vector<double> true_grad = quadratic_gradient(x);
  for (auto kind :
       {EstimatorKind::Spsa, EstimatorKind::SingleShot, EstimatorKind::CentralFd}) {
    RngStream root(5005);
    const auto report = empirical_bias_variance(kind, noisy_quadratic, x,
                                                true_grad, 0.15, 3, 500, root);
    const double lhs = report.mse;
    const double rhs = report.empirical_bias_norm * report.empirical_bias_norm +
                       report.empirical_variance;
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("evaluation counts: pairs for the two-point, one for single-shot,"
          " 2 d reps for differences") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
  RngStream g(6);
  CHECK(spsa_gradient(noisy_quadratic, x, 0.1, 7, g).eval_count == 14);
  const auto identity = [](std::span<const double> p) { return p; };
  CHECK(single_shot_gradient(noisy_quadratic, x, identity, 0.1, g).eval_count ==
        1);
  CHECK(central_fd_gradient(noisy_quadratic, x, 0.1, 3, g).eval_count ==
        2 * 5 * 3);
}

TEST_CASE("estimates are a pure function of the stream identity") {
  const std::vector<double> x{0.3, -0.2};
  RngStream fresh(7);
  RngStream consumed(7);
  consumed.next_u64();
  const auto a = spsa_gradient(noisy_quadratic, x, 0.1, 5, fresh);
  const auto b = spsa_gradient(noisy_quadratic, x, 0.1, 5, consumed);
  CHECK(a.g == b.g);

  const auto c = spsa_gradient(noisy_quadratic, x, 0.1, 5, RngStream(8));
  CHECK(a.g != c.g);
}

TEST_CASE("single-shot estimate is unbiased on a noisy linear function") {
  auto linear = [](std::span<const double> p, RngStream& rng) {
    return 3.0 * p[0] - 2.0 * p[1] + 0.5 + rng.symmetric_uniform(0.5);
  };
  const std::vector<double> x{0.2, 0.6};
  const std::vector<double> true_grad{3.0, -2.0};
  RngStream root(9009);
  const auto report = empirical_bias_variance(
      EstimatorKind::SingleShot, linear, x, true_grad, 0.2, 1, 40000, root);
  const double se = std::sqrt(report.empirical_variance / 40000.0);
  CHECK(report.empirical_bias_norm < 4.0 * se + 1e-12);
}

TEST_CASE("single-shot evaluates at the perturbed point on the own sphere") {
  // capture the evaluated point; it must be x + h z with ||z|| = 1.
  std::vector<double> seen;
  auto capture = [&seen](std::span<const double> p, RngStream&) {
    seen.assign(p.begin(), p.end());
    return 0.0;
  };
  const std::vector<double> x{0.5, 0.5, 0.0};
  const auto identity = [](std::span<const double> p) { return p; };
  RngStream g(10);
  const auto est = single_shot_gradient(capture, x, identity, 0.25, g);
  REQUIRE(seen.size() == 3);
  double sq = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double zk = (seen[k] - x[k]) / 0.25;
    sq += zk * zk;
  }
  CHECK(sq == Catch::Approx(1.0).margin(1e-10));
  CHECK(est.h_used == 0.25);
}

TEST_CASE("central differences nail a smooth noiseless gradient") {
  auto smooth = [](std::span<const double> p, RngStream&) {
    return std::sin(p[0]) + std::exp(0.5 * p[1]);
  };
  const std::vector<double> x{0.3, -0.4};
  RngStream g(11);
  const auto est = central_fd_gradient(smooth, x, 1e-5, 1, g);
  CHECK(est.g[0] == Catch::Approx(std::cos(0.3)).margin(1e-9));
  CHECK(est.g[1] == Catch::Approx(0.5 * std::exp(-0.2)).margin(1e-9));
}

TEST_CASE("probe-friendly smoothing radius follows the sixth-root law") {
  CHECK(mse_optimal_h(1) == 1.0);
  CHECK(mse_optimal_h(64) == Catch::Approx(std::pow(64.0, -1.0 / 6.0)));
  CHECK(mse_optimal_h(8, 2.0) == Catch::Approx(2.0 * std::pow(8.0, -1.0 / 6.0)));
  CHECK_THROWS(mse_optimal_h(0));
}

TEST_CASE("perturbation directions are signs and estimator guards fire") {
  RngStream g(12);
  const auto p = sample_perturbation(10, g);
  REQUIRE(p.entries.size() == 10);
  for (double v : p.entries) CHECK((v == 1.0 || v == -1.0));

  const std::vector<double> x{0.1};
  CHECK_THROWS(spsa_gradient(noisy_quadratic, x, 0.0, 1, g));
  CHECK_THROWS(spsa_gradient(noisy_quadratic, x, 0.1, 0, g));
  const auto identity = [](std::span<const double> q) { return q; };
  CHECK_THROWS(single_shot_gradient(noisy_quadratic, x, identity, -1.0, g));
  CHECK_THROWS(central_fd_gradient(noisy_quadratic, x, 0.1, 0, g));
  RngStream root(13);
  CHECK_THROWS(empirical_bias_variance(EstimatorKind::Spsa, noisy_quadratic, x,
                                       std::vector<double>{0.0}, 0.1, 1, 99,
                                       root));
}
