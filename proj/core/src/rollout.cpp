#include "esrl/rollout.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace esrl {

void RewardConfig::validate() const {
  require(alpha > 0.0, "reward: alpha must be > 0");
  require(w_quad >= 0.0 && w_log >= 0.0, "reward: weights must be >= 0");
  require(w_quad > 0.0 || w_log > 0.0, "reward: weights must not both be zero");
}

double reward(const RewardConfig& cfg, const Vec& x, const Vec& goal) {
  if (x.size() != goal.size()) throw std::invalid_argument("reward: dimension mismatch");
  const double d2 = (x - goal).squaredNorm();
  return -(cfg.w_quad * d2 + cfg.w_log * std::log(d2 + cfg.alpha));
}

EpisodeResult run_episode(const EsPolicyParams& policy, const Environment& env, int horizon,
                          const RewardConfig& reward_cfg, bool record) {
  return run_episode_from(policy, env, env.initial_state(), horizon, reward_cfg, record);
}

EpisodeResult run_episode_from(const EsPolicyParams& policy, const Environment& env,
                               const SimState& start, int horizon,
                               const RewardConfig& reward_cfg, bool record) {
  require(horizon >= 0, "run_episode: negative horizon");
  require(policy.dim() == env.dim(), "run_episode: policy and environment dimensions differ");
  const Vec goal = env.goal();
  const int substeps = env.substeps();

  EpisodeResult result;
  SimState s = start;
  if (record) result.trajectory.reserve(static_cast<std::size_t>(horizon) + 1);

  for (int t = 0; t < horizon; ++t) {
    Vec first_action;
    try {
      for (int k = 0; k < substeps; ++k) {
        Vec u = policy_action(policy, s.x, s.xdot);
        if (!u.allFinite()) throw SimulationFault("policy produced a non-finite action");
        if (k == 0) first_action = u;
        s = env.step(s, u);
      }
    } catch (const SimulationFault&) {
      result.terminated_early = true;
      break;
    }
    if (record) {
      if (t == 0) result.trajectory.push_back({start, first_action, reward(reward_cfg, start.x, goal)});
      else result.trajectory.back().action = first_action;
    }
    const double r = reward(reward_cfg, s.x, goal);
    result.total_reward += r;
    result.steps_completed = t + 1;
    if (env.success(s)) result.success = true;
    if (record) result.trajectory.push_back({s, Vec::Zero(env.dim()), r});
  }
  if (record && result.trajectory.empty())
    result.trajectory.push_back({start, Vec::Zero(env.dim()), reward(reward_cfg, start.x, goal)});
  return result;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj) {
  const int n = traj.empty() ? 0 : static_cast<int>(traj.front().state.x.size());
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  for (int i = 0; i < n; ++i) out << ",xdot" << i;
  for (int i = 0; i < n; ++i) out << ",u" << i;
  out << ",reward\n";
  out << std::setprecision(17);
  for (const auto& p : traj) {
    out << p.state.t;
    for (int i = 0; i < n; ++i) out << ',' << p.state.x(i);
    for (int i = 0; i < n; ++i) out << ',' << p.state.xdot(i);
    for (int i = 0; i < n; ++i) out << ',' << (p.action.size() == n ? p.action(i) : 0.0);
    out << ',' << p.reward << '\n';
  }
}

}  // namespace esrl
