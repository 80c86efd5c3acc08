#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "esrl/cem.hpp"
#include "esrl/envs.hpp"
#include "esrl/policy.hpp"
#include "esrl/rollout.hpp"
#include "esrl/serialization.hpp"
#include "esrl/verify.hpp"

namespace esrl {

enum class ExitCode : int { kOk = 0, kUsage = 1, kVerificationFailed = 2, kRuntimeFault = 3 };

/// Bad config or arguments.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { kBlock, kArm };

struct EvalConfig {
  int n_trials = 15;
  double init_sigma_q0 = 0.0;
};

struct VerifyRunConfig {
  std::string scenario = "all";  // audit | free | contact | all
  int rollouts = 20;
  double free_dt = 1e-4;  // arm tick length for the free-motion rollouts
  int free_ticks = 5000;
  int contact_ticks = 2000;
  double free_c = 2e5;
  double contact_c = 500.0;
  double param_radius = 1.0;
  double state_radius = 1.0;
};

/// Everything a run needs. Loaded from JSON; missing keys keep these defaults.
struct RunConfig {
  Task task = Task::kBlock;
  std::uint64_t seed = 0;
  Block2dConfig block;
  Arm2Config arm;
  PolicyArchitecture policy;
  RewardConfig reward;
  int horizon = 200;
  CemConfig cem;
  double init_sigma = 0.2;
  EvalConfig eval;
  VerifyRunConfig verify;

  /// Block task defaults with the block search settings.
  static RunConfig block_defaults();
  /// Arm reaching task with the wider arm networks.
  static RunConfig arm_defaults();

  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved config, every field present.
nlohmann::json config_to_json(const RunConfig& cfg);
/// Hex FNV-1a of the resolved config without the seed and worker count.
std::string config_hash(const RunConfig& cfg);

std::unique_ptr<Environment> make_environment(const RunConfig& cfg);
/// Policy architecture with the goal taken from the task environment.
PolicyArchitecture resolved_architecture(const RunConfig& cfg);

struct TrainOptions {
  bool record_trajectories = false;
  bool progress = false;
};

struct TrainSummary {
  CemResult result;
  Checkpoint checkpoint;
  std::string config_hash;
};

/// Writes checkpoint.json, history.csv and config.json into out_dir (and
/// trajectory.csv for the best sample when asked).
TrainSummary cmd_train(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       const TrainOptions& opts = {});

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Success fraction over n_trials episodes started from Gaussian
/// perturbations of the training start. Starts overlapping an obstacle are
/// redrawn. Trial i uses the same normal draws at every sigma.
nlohmann::json cmd_eval(const Checkpoint& ckpt, const RunConfig& cfg);

struct VerifyOptions {
  bool random_params = false;
  bool negate_damping = false;
  double inject_energy = 0.0;  // gain of the energy-generating contact fake
};

struct VerifySummary {
  bool passed = false;
  nlohmann::json report;
};

VerifySummary cmd_verify(const RunConfig& cfg, const Checkpoint* ckpt, const VerifyOptions& opts);

/// Trains every potential variant into out_dir/<variant> and writes
/// out_dir/ablation.csv.
nlohmann::json cmd_ablate(const RunConfig& cfg, const std::filesystem::path& out_dir,
                          const TrainOptions& opts = {});

}  // namespace esrl
