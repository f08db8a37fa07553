#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "hvf/parallel.hpp"
#include "hvf/rng.hpp"

namespace hvf {

struct GaussianSampler {
  std::vector<double> mean;
  std::vector<double> std;
};

struct CemConfig {
  int num_samples = 200;  // population per iteration
  int num_elites = 40;    // refit set
  int max_iters = 5;
  double std_threshold = 1e-3;  // stop once max per-dim std falls below
  double std_floor = 1e-6;      // refit never collapses a dim entirely
  // Tie policy. false: first_batch overwrites the trailing slots of iteration
  // one and equal-cost ties go to the most recent iteration (later samples
  // come from a tighter refit). true: first_batch occupies the leading slots
  // and the first sample ever to reach a cost keeps it — injected analytic
  // candidates then anchor flat-landscape ties instead of losing them to
  // whichever random sample happened to be scored last.
  bool keep_first_tie = false;
};

struct CemResult {
  std::vector<double> best_vector;
  double best_cost = std::numeric_limits<double>::infinity();
  uint64_t best_eval_seed = 0;       // seed handed to the objective for the winner
  std::vector<double> elite_mean_cost;   // per iteration
  std::vector<double> best_cost_history; // running best after each iteration
  GaussianSampler final_sampler;         // refit state when the loop stopped
  // Scores of the force-included first-batch candidates, in the order given,
  // with the seeds they were evaluated under. Lets callers make exact
  // "no worse than candidate X" claims.
  std::vector<double> injected_costs;
  std::vector<uint64_t> injected_seeds;
  int iterations = 0;
};

namespace detail {

template <class F>
inline constexpr bool objective_takes_rng =
    std::is_invocable_r_v<double, F&, std::span<const double>, Rng&>;

template <class F>
double eval_objective(F& f, std::span<const double> x, uint64_t seed) {
  if constexpr (objective_takes_rng<F>) {
    Rng r(seed);
    return f(x, r);
  } else {
    static_assert(std::is_invocable_r_v<double, F&, std::span<const double>>,
                  "objective must be double(span<const double>[, Rng&])");
    return f(x);
  }
}

}  // namespace detail

// Cross-entropy search with a diagonal Gaussian, initialised at N(0, I).
//
// Per iteration: draw num_samples vectors (serially, so the stream is
// deterministic), evaluate them (possibly in parallel, each with its own
// derived seed), sort ascending by (cost, sample index) and refit mean/std to
// the top num_elites. Returns the best vector *ever evaluated*, not the final
// mean. first_batch vectors overwrite samples of iteration one (which end
// per CemConfig::keep_first_tie), so specific candidates are always scored.
template <class F>
CemResult cem_optimize(F&& objective, int dim, const CemConfig& cfg, Rng& rng,
                       std::span<const std::vector<double>> first_batch = {}) {
  if (dim < 1) throw std::invalid_argument("cem: dim must be positive");
  if (cfg.num_samples < 1 || cfg.num_elites < 1 || cfg.num_elites > cfg.num_samples)
    throw std::invalid_argument("cem: bad sample/elite counts");
  if (cfg.max_iters < 1) throw std::invalid_argument("cem: max_iters must be positive");

  const int m = cfg.num_samples;
  std::vector<double> mean(dim, 0.0), stdev(dim, 1.0);
  std::vector<double> samples(std::size_t(m) * dim);
  std::vector<double> costs(m);
  std::vector<uint64_t> seeds(m);
  std::vector<int> order(m);

  CemResult res;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    for (int i = 0; i < m; ++i)
      for (int d = 0; d < dim; ++d)
        samples[std::size_t(i) * dim + d] = mean[d] + stdev[d] * rng.normal();

    int inject = 0;
    if (iter == 0 && !first_batch.empty()) {
      inject = int(std::min<std::size_t>(first_batch.size(), std::size_t(m)));
      for (int j = 0; j < inject; ++j) {
        const auto& v = first_batch[first_batch.size() - inject + j];
        if (int(v.size()) != dim)
          throw std::invalid_argument("cem: first_batch dimension mismatch");
        const int slot = cfg.keep_first_tie ? j : m - inject + j;
        std::copy(v.begin(), v.end(), samples.begin() + std::size_t(slot) * dim);
      }
    }

    for (int i = 0; i < m; ++i) seeds[i] = rng.next_u64();

    F& f = objective;
    parallel_for(std::size_t(m), [&](std::size_t i) {
      costs[i] = detail::eval_objective(
          f, std::span<const double>(samples.data() + i * dim, dim), seeds[i]);
    });

    for (int i = 0; i < m; ++i)
      if (!std::isfinite(costs[i]))
        throw std::runtime_error("cem: non-finite cost at sample " + std::to_string(i) +
                                 " (" + std::to_string(costs[i]) + ")");

    for (int j = 0; j < inject; ++j) {
      const int slot = cfg.keep_first_tie ? j : m - inject + j;
      res.injected_costs.push_back(costs[slot]);
      res.injected_seeds.push_back(seeds[slot]);
    }

    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
    });

    // Tie direction depends on the policy: see CemConfig::keep_first_tie.
    if (cfg.keep_first_tie ? costs[order[0]] < res.best_cost
                           : costs[order[0]] <= res.best_cost) {
      const int w = order[0];
      res.best_cost = costs[w];
      res.best_eval_seed = seeds[w];
      res.best_vector.assign(samples.begin() + std::size_t(w) * dim,
                             samples.begin() + std::size_t(w + 1) * dim);
    }

    const int e = cfg.num_elites;
    double elite_cost = 0.0;
    for (int d = 0; d < dim; ++d) {
      double mu = 0.0;
      for (int j = 0; j < e; ++j) mu += samples[std::size_t(order[j]) * dim + d];
      mu /= e;
      double var = 0.0;
      for (int j = 0; j < e; ++j) {
        const double dev = samples[std::size_t(order[j]) * dim + d] - mu;
        var += dev * dev;
      }
      mean[d] = mu;
      stdev[d] = std::max(std::sqrt(var / e), cfg.std_floor);
    }
    for (int j = 0; j < e; ++j) elite_cost += costs[order[j]];
    res.elite_mean_cost.push_back(elite_cost / e);
    res.best_cost_history.push_back(res.best_cost);
    res.iterations = iter + 1;

    if (*std::max_element(stdev.begin(), stdev.end()) < cfg.std_threshold) break;
  }
  res.final_sampler = {mean, stdev};
  return res;
}

}  // namespace hvf
