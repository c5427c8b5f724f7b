#pragma once

// Independent reference computations used only by the tests. None of them
// calls into the engine's split search, training or valuation code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "optstop/cart.hpp"
#include "optstop/ensemble.hpp"

namespace oracle {

struct SplitChoice {
  bool is_leaf = true;
  int weight = 1;
  std::size_t dim = 0;
  double threshold = 0.0;
  double score = 0.0;
};

// Tries every dimension and every distinct coordinate value except the largest
// as a "x[d] <= c" threshold and sums the left side directly.
inline SplitChoice exhaustive_delta_split(const optstop::SampleSet& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += s.weight(i);
  SplitChoice best;
  bool found = false;
  for (std::size_t d = 0; d < s.dim(); ++d) {
    std::vector<double> values;
    for (std::size_t i = 0; i < s.size(); ++i) values.push_back(s.coord(i, d));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
      double left = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.coord(i, d) <= values[t]) left += s.weight(i);
      }
      const double score = std::max(std::abs(left), std::abs(total - left));
      if (!found || score > best.score) {
        found = true;
        best.score = score;
        best.dim = d;
        best.threshold = values[t];
      }
    }
  }
  if (found && best.score > std::abs(total)) {
    best.is_leaf = false;
  } else {
    best.is_leaf = true;
    best.weight = total > 0.0 ? 0 : 1;
  }
  return best;
}

// Price lattice chain: from state s at step n the chain moves to each entry of
// succ[n][s] (a multiset of lattice indices) with equal probability. All lists
// at one step have the same length, so when every combination of successor
// choices becomes one path, the equally weighted paths carry exactly the
// chain's law.
struct LatticeChain {
  std::vector<double> lattice;
  std::size_t start = 0;
  std::vector<std::vector<std::vector<std::size_t>>> succ;  // [n][s] -> successors

  std::size_t steps() const { return succ.size(); }
};

inline LatticeChain random_chain(std::mt19937_64& rng, std::size_t steps,
                                 std::vector<double> lattice) {
  LatticeChain c;
  c.lattice = std::move(lattice);
  const std::size_t S = c.lattice.size();
  c.start = std::uniform_int_distribution<std::size_t>(0, S - 1)(rng);
  std::uniform_int_distribution<std::size_t> pick(0, S - 1);
  std::uniform_int_distribution<std::size_t> fanout(1, 3);
  c.succ.resize(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    c.succ[n].resize(S);
    const std::size_t m = fanout(rng);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t j = 0; j < m; ++j) c.succ[n][s].push_back(pick(rng));
    }
  }
  return c;
}

inline optstop::PathEnsemble chain_ensemble(const LatticeChain& c) {
  const std::size_t N = c.steps();
  std::vector<std::vector<std::size_t>> paths{{c.start}};
  for (std::size_t n = 0; n < N; ++n) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& p : paths) {
      for (std::size_t s : c.succ[n][p.back()]) {
        auto q = p;
        q.push_back(s);
        next.push_back(std::move(q));
      }
    }
    paths = std::move(next);
  }
  std::vector<double> data;
  for (const auto& p : paths) {
    for (std::size_t s : p) data.push_back(c.lattice[s]);
  }
  return optstop::PathEnsemble(paths.size(), N, 1, std::move(data), 0,
                               optstop::EnsembleLabel::training);
}

// Optimal expected reward of the chain by backward induction on its own
// transition probabilities. `u(n, x)` is the reward.
inline double chain_value(const LatticeChain& c,
                          const std::function<double(std::size_t, double)>& u) {
  const std::size_t N = c.steps();
  const std::size_t S = c.lattice.size();
  std::vector<double> V(S);
  for (std::size_t s = 0; s < S; ++s) V[s] = u(N, c.lattice[s]);
  for (std::size_t n = N; n-- > 0;) {
    std::vector<double> W(S);
    for (std::size_t s = 0; s < S; ++s) {
      double cont = 0.0;
      for (std::size_t t : c.succ[n][s]) cont += V[t];
      cont /= static_cast<double>(c.succ[n][s].size());
      W[s] = std::max(u(n, c.lattice[s]), cont);
    }
    V = std::move(W);
  }
  return V[c.start];
}

// Bermudan put on a Cox-Ross-Rubinstein tree with `fine` steps, exercisable
// only at the `dates` equally spaced dates 0, T/dates, ..., T. `fine` must be
// a multiple of `dates`.
inline double crr_bermudan_put(double x0, double strike, double rate, double sigma,
                               double maturity, std::size_t dates, std::size_t fine) {
  const double dt = maturity / static_cast<double>(fine);
  const double up = std::exp(sigma * std::sqrt(dt));
  const double down = 1.0 / up;
  const double p = (std::exp(rate * dt) - down) / (up - down);
  const double disc = std::exp(-rate * dt);
  const std::size_t every = fine / dates;
  std::vector<double> v(fine + 1);
  for (std::size_t j = 0; j <= fine; ++j) {
    const double x = x0 * std::pow(up, static_cast<double>(j)) *
                     std::pow(down, static_cast<double>(fine - j));
    v[j] = std::max(strike - x, 0.0);
  }
  for (std::size_t i = fine; i-- > 0;) {
    for (std::size_t j = 0; j <= i; ++j) {
      v[j] = disc * (p * v[j + 1] + (1.0 - p) * v[j]);
      if (i % every == 0) {
        const double x = x0 * std::pow(up, static_cast<double>(j)) *
                         std::pow(down, static_cast<double>(i - j));
        v[j] = std::max(v[j], strike - x);
      }
    }
  }
  return v[0];
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Black-Scholes European put.
inline double black_scholes_put(double x0, double strike, double rate, double sigma,
                                double maturity) {
  const double sd = sigma * std::sqrt(maturity);
  const double d1 = (std::log(x0 / strike) + (rate + 0.5 * sigma * sigma) * maturity) / sd;
  const double d2 = d1 - sd;
  return strike * std::exp(-rate * maturity) * normal_cdf(-d2) - x0 * normal_cdf(-d1);
}

// Optimal value and first optimal stopping step along one known reward sequence.
struct DeterministicOptimum {
  double value;
  std::size_t step;
};

inline DeterministicOptimum deterministic_optimum(const std::vector<double>& u) {
  const std::size_t N = u.size() - 1;
  std::vector<double> best_after(N + 1, -INFINITY);
  for (std::size_t n = N; n-- > 0;) best_after[n] = std::max(best_after[n + 1], u[n + 1]);
  for (std::size_t n = 0; n < N; ++n) {
    if (u[n] >= best_after[n]) return {u[n], n};
  }
  return {u[N], N};
}

}  // namespace oracle
