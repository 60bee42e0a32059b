#pragma once
// Game abstraction: per-player strategy sets and black-box cost access.
//
// A game exposes costs through sampling closures so that learning code never
// sees model structure. Closed-form expected costs and gradients are optional
// attachments used by reference solvers and tests only.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashseek/linalg.hpp"
#include "nashseek/rng.hpp"

namespace nashseek {

enum class SetKind { Box, Simplex, HyperplaneSumOne };

// One player's feasible set.
//   Box: lower[i] <= x[i] <= upper[i]
//   Simplex: x >= 0, sum(x) = total
//   HyperplaneSumOne: sum(x) = 1, no sign constraint
struct StrategySet {
  SetKind kind = SetKind::Box;
  std::size_t dim = 0;
  std::vector<double> lower;  // Box only
  std::vector<double> upper;  // Box only
  double total = 1.0;         // Simplex only

  static StrategySet box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty())
      throw std::invalid_argument("StrategySet::box: bad bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i]))
        throw std::invalid_argument("StrategySet::box: lower > upper");
    StrategySet s;
    s.kind = SetKind::Box;
    s.dim = lo.size();
    s.lower = std::move(lo);
    s.upper = std::move(hi);
    return s;
  }

  static StrategySet simplex(std::size_t dim, double total = 1.0) {
    if (dim == 0 || !(total > 0.0))
      throw std::invalid_argument("StrategySet::simplex: bad arguments");
    StrategySet s;
    s.kind = SetKind::Simplex;
    s.dim = dim;
    s.total = total;
    return s;
  }

  static StrategySet hyperplane_sum_one(std::size_t dim) {
    if (dim == 0)
      throw std::invalid_argument("StrategySet::hyperplane_sum_one: dim == 0");
    StrategySet s;
    s.kind = SetKind::HyperplaneSumOne;
    s.dim = dim;
    return s;
  }

  bool contains(std::span<const double> x, double tol = 1e-12) const {
    if (x.size() != dim) return false;
    switch (kind) {
      case SetKind::Box:
        for (std::size_t i = 0; i < dim; ++i)
          if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        return true;
      case SetKind::Simplex: {
        for (double v : x)
          if (v < -tol) return false;
        return std::abs(sum(x) - total) <= tol;
      }
      case SetKind::HyperplaneSumOne:
        return std::abs(sum(x) - 1.0) <= tol;
    }
    return false;
  }
};

// Joint strategy vectors are stored flat, player blocks in order.
struct GameInstance {
  std::size_t num_players = 0;
  std::vector<std::size_t> dims;     // per-player block sizes
  std::vector<std::size_t> offsets;  // block start within the flat vector
  std::size_t total_dim = 0;
  std::vector<StrategySet> sets;

  // One noisy observation of player i's cost at joint point x.
  std::function<double(std::size_t i, std::span<const double> x, RngStream& rng)>
      noisy_cost;

  // One shared game realization: all players' costs observed at the same
  // random disturbance draw, as a simultaneous play produces them.
  std::function<void(std::span<const double> x, RngStream& rng,
                     std::span<double> costs_out)>
      sample_all_costs;

  // Optional analytic structure (reference solvers, tests).
  std::function<double(std::size_t i, std::span<const double> x)> expected_cost;
  // Stacked partial gradients: block i holds d f_i / d x_i evaluated at x.
  std::function<void(std::span<const double> x, std::span<double> grad_out)>
      exact_gradient;

  std::span<const double> player_block(std::span<const double> x,
                                       std::size_t i) const {
    return x.subspan(offsets[i], dims[i]);
  }
  std::span<double> mutable_player_block(std::span<double> x,
                                         std::size_t i) const {
    return x.subspan(offsets[i], dims[i]);
  }

  bool feasible(std::span<const double> x, double tol = 1e-12) const {
    if (x.size() != total_dim) return false;
    for (std::size_t i = 0; i < num_players; ++i)
      if (!sets[i].contains(player_block(x, i), tol)) return false;
    return true;
  }

  void validate() const {
    if (num_players == 0) throw std::invalid_argument("game: no players");
    if (dims.size() != num_players || sets.size() != num_players)
      throw std::invalid_argument("game: dims/sets size mismatch");
    std::size_t off = 0;
    for (std::size_t i = 0; i < num_players; ++i) {
      if (dims[i] == 0) throw std::invalid_argument("game: zero-dim player");
      if (sets[i].dim != dims[i])
        throw std::invalid_argument("game: set dim mismatch");
      if (offsets[i] != off) throw std::invalid_argument("game: bad offsets");
      off += dims[i];
    }
    if (off != total_dim) throw std::invalid_argument("game: bad total_dim");
    if (!noisy_cost || !sample_all_costs)
      throw std::invalid_argument("game: sampling closures missing");
  }
};

inline void init_game_layout(GameInstance& g, std::vector<std::size_t> dims) {
  g.num_players = dims.size();
  g.dims = std::move(dims);
  g.offsets.resize(g.num_players);
  std::size_t off = 0;
  for (std::size_t i = 0; i < g.num_players; ++i) {
    g.offsets[i] = off;
    off += g.dims[i];
  }
  g.total_dim = off;
}

}  // namespace nashseek
