#include "esrl/cem.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

namespace esrl {

void CemDistribution::validate() const {
  require(mu.size() == sigma.size(), "cem: mu and sigma sizes differ");
  require(mu.allFinite() && sigma.allFinite(), "cem: non-finite distribution");
  require((sigma.array() > 0.0).all(), "cem: sigma must be > 0");
}

void CemConfig::validate() const {
  require(n_samples >= 1, "cem: n_samples must be >= 1");
  require(n_elites >= 1 && n_elites <= n_samples, "cem: need 1 <= n_elites <= n_samples");
  require(n_iterations >= 0, "cem: n_iterations must be >= 0");
  require(sigma_floor > 0.0, "cem: sigma_floor must be > 0");
  require(std::isfinite(extra_std) && extra_std >= 0.0, "cem: extra_std must be >= 0");
  require(extra_decay_iterations >= 0, "cem: extra_decay_iterations must be >= 0");
  require(workers >= 1, "cem: workers must be >= 1");
}

std::vector<Vec> sample(const CemDistribution& dist, int n, std::mt19937_64& rng) {
  require(n >= 1, "cem: sample count must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(n);
  const auto p = dist.mu.size();
  for (int i = 0; i < n; ++i) {
    Vec theta(p);
    for (Eigen::Index j = 0; j < p; ++j) theta(j) = dist.mu(j) + dist.sigma(j) * normal(rng);
    out.push_back(std::move(theta));
  }
  return out;
}

std::vector<int> select_elites(const std::vector<double>& fitnesses, int n_elites) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(fitnesses.size()); ++i)
    if (std::isfinite(fitnesses[i])) idx.push_back(i);
  if (static_cast<int>(idx.size()) < n_elites)
    throw std::runtime_error("cem: fewer finite fitnesses than elites");
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return fitnesses[a] > fitnesses[b]; });
  idx.resize(n_elites);
  return idx;
}

CemDistribution elite_update(const CemDistribution& dist, const std::vector<Vec>& samples,
                             const std::vector<double>& fitnesses, const CemConfig& cfg) {
  require(samples.size() == fitnesses.size(), "cem: samples and fitnesses differ in length");
  const std::vector<int> elites = select_elites(fitnesses, cfg.n_elites);
  const auto p = dist.mu.size();
  CemDistribution next{Vec::Zero(p), Vec::Zero(p)};
  for (int i : elites) next.mu += samples[i];
  next.mu /= static_cast<double>(elites.size());
  Vec var = Vec::Zero(p);
  for (int i : elites) var += (samples[i] - next.mu).cwiseAbs2();
  var /= static_cast<double>(elites.size());
  next.sigma = var.cwiseSqrt().cwiseMax(cfg.sigma_floor);
  return next;
}

namespace {

std::vector<Evaluation> evaluate_batch(const Objective& objective, const std::vector<Vec>& thetas,
                                       int workers) {
  std::vector<Evaluation> out(thetas.size());
  auto run = [&](std::size_t i) {
    try {
      out[i] = objective(thetas[i]);
    } catch (const std::exception&) {
      out[i] = Evaluation{-std::numeric_limits<double>::infinity(), false};
    }
  };
  const int n_threads = std::min<int>(workers, static_cast<int>(thetas.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < thetas.size(); ++i) run(i);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < thetas.size(); i += n_threads) run(i);
      });
  }
  return out;
}

}  // namespace

CemDistribution sampling_distribution(const CemDistribution& dist, const CemConfig& cfg, int it) {
  if (cfg.extra_std == 0.0 || it >= cfg.extra_decay_iterations) return dist;
  const double w = 1.0 - static_cast<double>(it) / cfg.extra_decay_iterations;
  CemDistribution out = dist;
  out.sigma = (dist.sigma.cwiseAbs2().array() + w * cfg.extra_std * cfg.extra_std).sqrt().matrix();
  return out;
}

CemResult optimize(const Objective& objective, const CemDistribution& init, const CemConfig& cfg,
                   const std::function<void(const IterationStats&)>& on_iteration) {
  cfg.validate();
  init.validate();
  std::mt19937_64 rng(cfg.seed);
  CemResult result;
  result.final_distribution = init;
  result.best = init.mu;
  result.best_fitness = -std::numeric_limits<double>::infinity();

  for (int it = 0; it < cfg.n_iterations; ++it) {
    const CemDistribution draw = sampling_distribution(result.final_distribution, cfg, it);
    const std::vector<Vec> thetas = sample(draw, cfg.n_samples, rng);
    const std::vector<Evaluation> evals = evaluate_batch(objective, thetas, cfg.workers);

    std::vector<double> fitness(evals.size());
    IterationStats stats;
    stats.iteration = it;
    stats.max_fitness = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int finite = 0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
      fitness[i] = std::isnan(evals[i].fitness) ? -std::numeric_limits<double>::infinity()
                                                : evals[i].fitness;
      if (!std::isfinite(fitness[i])) continue;
      sum += fitness[i];
      ++finite;
      stats.max_fitness = std::max(stats.max_fitness, fitness[i]);
      if (fitness[i] > result.best_fitness) {
        result.best_fitness = fitness[i];
        result.best = thetas[i];
        result.best_success = evals[i].success;
      }
    }
    stats.mean_fitness = finite > 0 ? sum / finite : -std::numeric_limits<double>::infinity();

    const std::vector<int> elites = select_elites(fitness, cfg.n_elites);
    int elite_success = 0;
    for (int i : elites) elite_success += evals[i].success ? 1 : 0;
    stats.success_rate = static_cast<double>(elite_success) / cfg.n_elites;

    result.final_distribution = elite_update(result.final_distribution, thetas, fitness, cfg);
    stats.best_fitness = result.best_fitness;
    stats.mean_sigma = result.final_distribution.sigma.mean();
    result.history.push_back(stats);
    if (on_iteration) on_iteration(stats);
  }
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<IterationStats>& history) {
  out << "iteration,mean_fitness,max_fitness,success_rate,mean_sigma,best_fitness\n";
  out << std::setprecision(17);
  for (const auto& h : history) {
    out << h.iteration << ',' << h.mean_fitness << ',' << h.max_fitness << ',' << h.success_rate
        << ',' << h.mean_sigma << ',' << h.best_fitness << '\n';
  }
}

}  // namespace esrl
