#pragma once

#include <iosfwd>
#include <vector>

#include "esrl/envs.hpp"
#include "esrl/policy.hpp"

namespace esrl {

/// r = -(w_quad d^2 + w_log log(d^2 + alpha)),  d = |x - goal|
struct RewardConfig {
  double w_quad = 1.0;
  double w_log = 1.0;
  double alpha = 1e-5;

  void validate() const;
};

double reward(const RewardConfig& cfg, const Vec& x, const Vec& goal);

struct TrajectoryPoint {
  SimState state;
  Vec action;
  double reward = 0.0;
};

/// One closed-loop episode. `total_reward` sums the rewards of the states
/// reached after each of the T control steps (trajectory rows 1..T).
struct EpisodeResult {
  double total_reward = 0.0;
  bool success = false;
  bool terminated_early = false;
  int steps_completed = 0;
  std::vector<TrajectoryPoint> trajectory;
};

EpisodeResult run_episode(const EsPolicyParams& policy, const Environment& env, int horizon,
                          const RewardConfig& reward_cfg, bool record = false);
/// Same, from an explicit start state instead of env.initial_state().
EpisodeResult run_episode_from(const EsPolicyParams& policy, const Environment& env,
                               const SimState& start, int horizon,
                               const RewardConfig& reward_cfg, bool record = false);

/// CSV with columns t, x0.., xdot0.., u0.., reward.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj);

}  // namespace esrl
