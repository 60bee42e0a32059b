#pragma once
// Multi-market Cournot competition with random demand and cost disturbances.
//
// Player i ships quantity x_{i,j} to market j. The market price falls
// linearly in total supply, p_j = a_j + zeta_j - b_j * sum_i x_{i,j}, and the
// player pays unit cost c_{i,j} + eta_{i,j}. The cost (negative profit) is
//   F_i = sum_j (c_{i,j} + eta_{i,j} - p_j) * x_{i,j}.
// zeta is common to all players within one market realization; eta_i is
// private. Both are centered uniform, so expectations drop the noise.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "nashseek/game.hpp"
#include "nashseek/linalg.hpp"
#include "nashseek/rng.hpp"

namespace nashseek {

struct CournotParams {
  std::size_t num_players = 0;
  std::size_t num_markets = 0;
  std::vector<double> demand_intercept;       // a_j, length m
  std::vector<double> demand_slope;           // b_j, length m
  std::vector<double> unit_cost;              // c_{i,j}, N x m row-major
  std::vector<double> capacity;               // C_{i,j}, Box sets only
  std::vector<double> price_noise_halfwidth;  // zeta_j ~ U[-w_j, w_j]
  std::vector<double> cost_noise_halfwidth;   // eta_{i,j} ~ U[-w_{i,j}, w_{i,j}]

  void validate() const {
    const std::size_t n = num_players, m = num_markets;
    if (n < 2 || m < 1)
      throw std::invalid_argument("CournotParams: need >= 2 players, >= 1 market");
    if (demand_intercept.size() != m || demand_slope.size() != m ||
        price_noise_halfwidth.size() != m)
      throw std::invalid_argument("CournotParams: market vector size mismatch");
    if (unit_cost.size() != n * m || capacity.size() != n * m ||
        cost_noise_halfwidth.size() != n * m)
      throw std::invalid_argument("CournotParams: player matrix size mismatch");
    for (std::size_t j = 0; j < m; ++j) {
      if (!(demand_intercept[j] > 0.0) || !(demand_slope[j] > 0.0))
        throw std::invalid_argument("CournotParams: a_j, b_j must be positive");
      if (price_noise_halfwidth[j] < 0.0)
        throw std::invalid_argument("CournotParams: negative noise half-width");
    }
    for (std::size_t k = 0; k < n * m; ++k) {
      if (!(unit_cost[k] > 0.0))
        throw std::invalid_argument("CournotParams: c_{i,j} must be positive");
      if (cost_noise_halfwidth[k] < 0.0)
        throw std::invalid_argument("CournotParams: negative noise half-width");
    }
  }
};

// Random instance: c ~ U[3,4], a ~ U[4,5], b ~ U[0.5,0.55]; noise half-widths
// a_j/8 and c_{i,j}/8. Deterministic for fixed (N, m, seed).
inline CournotParams generate_cournot_instance(std::size_t num_players,
                                               std::size_t num_markets,
                                               std::uint64_t seed) {
  if (num_players < 2 || num_markets < 1)
    throw std::invalid_argument(
        "generate_cournot_instance: need >= 2 players, >= 1 market");
  CournotParams p;
  p.num_players = num_players;
  p.num_markets = num_markets;
  RngStream root(seed);
  RngStream a_stream = root.child(0);
  RngStream b_stream = root.child(1);
  RngStream c_stream = root.child(2);
  p.demand_intercept.resize(num_markets);
  p.demand_slope.resize(num_markets);
  p.price_noise_halfwidth.resize(num_markets);
  for (std::size_t j = 0; j < num_markets; ++j) {
    p.demand_intercept[j] = a_stream.uniform(4.0, 5.0);
    p.demand_slope[j] = b_stream.uniform(0.5, 0.55);
    p.price_noise_halfwidth[j] = p.demand_intercept[j] / 8.0;
  }
  const std::size_t nm = num_players * num_markets;
  p.unit_cost.resize(nm);
  p.cost_noise_halfwidth.resize(nm);
  for (std::size_t k = 0; k < nm; ++k) {
    p.unit_cost[k] = c_stream.uniform(3.0, 4.0);
    p.cost_noise_halfwidth[k] = p.unit_cost[k] / 8.0;
  }
  p.capacity.assign(nm, 1.0);
  return p;
}

// Two firms, one market, no noise: a=5, b=1, c=3, generous box bounds.
// The unconstrained equilibrium is x* = (2/3, 2/3).
inline CournotParams duopoly_params() {
  CournotParams p;
  p.num_players = 2;
  p.num_markets = 1;
  p.demand_intercept = {5.0};
  p.demand_slope = {1.0};
  p.unit_cost = {3.0, 3.0};
  p.capacity = {10.0, 10.0};
  p.price_noise_halfwidth = {0.0};
  p.cost_noise_halfwidth = {0.0, 0.0};
  return p;
}

namespace detail {

constexpr std::size_t kStackMarkets = 64;

template <class Fn>
inline void with_market_buffer(std::size_t m, Fn&& fn) {
  if (m <= kStackMarkets) {
    double buf[kStackMarkets];
    fn(std::span<double>(buf, m));
  } else {
    std::vector<double> buf(m);
    fn(std::span<double>(buf));
  }
}

}  // namespace detail

// One draw of player i's cost; fresh zeta and eta_i each call.
inline double cournot_noisy_cost(const CournotParams& p, std::size_t i,
                                 std::span<const double> x, RngStream& rng) {
  const std::size_t n = p.num_players, m = p.num_markets;
  if (i >= n || x.size() != n * m)
    throw std::invalid_argument("cournot_noisy_cost: bad player or point size");
  double cost = 0.0;
  detail::with_market_buffer(m, [&](std::span<double> price) {
    for (std::size_t j = 0; j < m; ++j) price[j] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double* row = x.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) price[j] += row[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double zeta = rng.symmetric_uniform(p.price_noise_halfwidth[j]);
      price[j] = p.demand_intercept[j] + zeta - p.demand_slope[j] * price[j];
    }
    const double* own = x.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double eta = rng.symmetric_uniform(p.cost_noise_halfwidth[i * m + j]);
      cost += (p.unit_cost[i * m + j] + eta - price[j]) * own[j];
    }
  });
  if (!std::isfinite(cost))
    throw std::domain_error("cournot_noisy_cost: non-finite cost");
  return cost;
}

// One shared realization: a single zeta draw prices all markets, then each
// player's private eta row is drawn in player order.
inline void cournot_sample_all_costs(const CournotParams& p,
                                     std::span<const double> x, RngStream& rng,
                                     std::span<double> costs_out) {
  const std::size_t n = p.num_players, m = p.num_markets;
  if (x.size() != n * m || costs_out.size() != n)
    throw std::invalid_argument("cournot_sample_all_costs: size mismatch");
  detail::with_market_buffer(m, [&](std::span<double> price) {
    for (std::size_t j = 0; j < m; ++j) price[j] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double* row = x.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) price[j] += row[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double zeta = rng.symmetric_uniform(p.price_noise_halfwidth[j]);
      price[j] = p.demand_intercept[j] + zeta - p.demand_slope[j] * price[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double* own = x.data() + i * m;
      double cost = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double eta =
            rng.symmetric_uniform(p.cost_noise_halfwidth[i * m + j]);
        cost += (p.unit_cost[i * m + j] + eta - price[j]) * own[j];
      }
      costs_out[i] = cost;
    }
  });
}

// f_i(x) = sum_j (c_{i,j} - a_j + b_j * sum_k x_{k,j}) * x_{i,j}
inline double cournot_expected_cost(const CournotParams& p, std::size_t i,
                                    std::span<const double> x) {
  const std::size_t n = p.num_players, m = p.num_markets;
  if (i >= n || x.size() != n * m)
    throw std::invalid_argument("cournot_expected_cost: bad player or size");
  double cost = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double supply = 0.0;
    for (std::size_t k = 0; k < n; ++k) supply += x[k * m + j];
    cost += (p.unit_cost[i * m + j] - p.demand_intercept[j] +
             p.demand_slope[j] * supply) *
            x[i * m + j];
  }
  return cost;
}

// Stacked own-partials; component (i,j) = c_{i,j} - a_j + b_j (S_j + x_{i,j})
// with S_j the total supply in market j.
inline void cournot_exact_gradient(const CournotParams& p,
                                   std::span<const double> x,
                                   std::span<double> grad_out) {
  const std::size_t n = p.num_players, m = p.num_markets;
  if (x.size() != n * m || grad_out.size() != n * m)
    throw std::invalid_argument("cournot_exact_gradient: size mismatch");
  detail::with_market_buffer(m, [&](std::span<double> supply) {
    for (std::size_t j = 0; j < m; ++j) supply[j] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double* row = x.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) supply[j] += row[j];
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        grad_out[i * m + j] = p.unit_cost[i * m + j] - p.demand_intercept[j] +
                              p.demand_slope[j] * (supply[j] + x[i * m + j]);
  });
}

// Strong-monotonicity modulus of the gradient map, normalized so that
// (phi(x) - phi(y))^T (x - y) >= (beta/2) ||x - y||^2.
//
// The map is affine with a per-market Jacobian block b_j (I + 11^T) over
// players; the smallest eigenvalue of the symmetric part is min_j b_j, so
// beta = 2 min_j b_j.
inline double compute_beta(const CournotParams& p) {
  p.validate();
  double min_b = p.demand_slope[0];
  for (double b : p.demand_slope) min_b = std::min(min_b, b);
  if (!(min_b > 0.0))
    throw std::domain_error("compute_beta: map is not strongly monotone");
  return 2.0 * min_b;
}

// Largest eigenvalue of the same blocks: (N + 1) max_j b_j. Used as the
// Lipschitz constant of the gradient map.
inline double cournot_lipschitz(const CournotParams& p) {
  double max_b = p.demand_slope[0];
  for (double b : p.demand_slope) max_b = std::max(max_b, b);
  return static_cast<double>(p.num_players + 1) * max_b;
}

// Wraps parameters into a GameInstance with the requested per-player set:
// Box from capacities, unit Simplex, or the sum-one hyperplane.
inline GameInstance make_cournot_game(const CournotParams& params,
                                      SetKind kind) {
  params.validate();
  auto p = std::make_shared<const CournotParams>(params);
  const std::size_t n = p->num_players, m = p->num_markets;
  GameInstance g;
  init_game_layout(g, std::vector<std::size_t>(n, m));
  g.sets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (kind) {
      case SetKind::Box: {
        std::vector<double> hi(p->capacity.begin() + i * m,
                               p->capacity.begin() + (i + 1) * m);
        g.sets.push_back(StrategySet::box(std::vector<double>(m, 0.0), hi));
        break;
      }
      case SetKind::Simplex:
        g.sets.push_back(StrategySet::simplex(m, 1.0));
        break;
      case SetKind::HyperplaneSumOne:
        g.sets.push_back(StrategySet::hyperplane_sum_one(m));
        break;
    }
  }
  g.noisy_cost = [p](std::size_t i, std::span<const double> x, RngStream& rng) {
    return cournot_noisy_cost(*p, i, x, rng);
  };
  g.sample_all_costs = [p](std::span<const double> x, RngStream& rng,
                           std::span<double> out) {
    cournot_sample_all_costs(*p, x, rng, out);
  };
  g.expected_cost = [p](std::size_t i, std::span<const double> x) {
    return cournot_expected_cost(*p, i, x);
  };
  g.exact_gradient = [p](std::span<const double> x, std::span<double> out) {
    cournot_exact_gradient(*p, x, out);
  };
  g.validate();
  return g;
}

}  // namespace nashseek
