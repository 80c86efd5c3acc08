#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include "esrl/types.hpp"

namespace esrl {

/// Diagonal Gaussian over the flat parameter vector.
struct CemDistribution {
  Vec mu;
  Vec sigma;

  void validate() const;
};

struct CemConfig {
  int n_samples = 15;
  int n_elites = 3;
  int n_iterations = 500;
  double sigma_floor = 1e-6;
  // Extra sampling noise added in quadrature, decaying linearly to zero.
  double extra_std = 0.0;
  int extra_decay_iterations = 0;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
};

struct Evaluation {
  double fitness = 0.0;
  bool success = false;
};

/// Must be safe to call concurrently when workers > 1.
using Objective = std::function<Evaluation(const Vec&)>;

struct IterationStats {
  int iteration = 0;
  double mean_fitness = 0.0;  // over finite fitnesses
  double max_fitness = 0.0;
  double best_fitness = 0.0;  // best seen so far
  double success_rate = 0.0;  // fraction of elites that succeeded
  double mean_sigma = 0.0;    // after the update
};

struct CemResult {
  Vec best;
  double best_fitness = 0.0;
  bool best_success = false;
  CemDistribution final_distribution;
  std::vector<IterationStats> history;
};

std::vector<Vec> sample(const CemDistribution& dist, int n, std::mt19937_64& rng);

/// Distribution actually sampled at iteration it (sigma widened by the extra noise).
CemDistribution sampling_distribution(const CemDistribution& dist, const CemConfig& cfg, int it);

/// Indices of the n_elites best finite fitnesses; ties go to the lower index.
std::vector<int> select_elites(const std::vector<double>& fitnesses, int n_elites);

/// MLE refit of mu and (population) sigma on the elites, sigma floored.
CemDistribution elite_update(const CemDistribution& dist, const std::vector<Vec>& samples,
                             const std::vector<double>& fitnesses, const CemConfig& cfg);

CemResult optimize(const Objective& objective, const CemDistribution& init, const CemConfig& cfg,
                   const std::function<void(const IterationStats&)>& on_iteration = {});

void write_history_csv(std::ostream& out, const std::vector<IterationStats>& history);

}  // namespace esrl
