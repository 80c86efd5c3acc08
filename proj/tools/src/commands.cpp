#include "esrl/commands.hpp"

#include <cmath>
#include <functional>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

#include "esrl/baselines.hpp"

namespace esrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string provenance_line(const std::string& hash, std::uint64_t seed) {
  return "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

// Independent stream per (seed, purpose, index).
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

enum Purpose : std::uint64_t { kInit = 1, kCem = 2, kEval = 3, kVerify = 4 };

Objective episode_objective(const FlatLayout& layout, const Environment& env,
                            const RunConfig& cfg) {
  return [&layout, &env, &cfg](const Vec& theta) {
    const EsPolicyParams p = unflatten(layout, theta);
    const EpisodeResult r = run_episode(p, env, cfg.horizon, cfg.reward);
    if (r.terminated_early) return Evaluation{-std::numeric_limits<double>::infinity(), false};
    return Evaluation{r.total_reward, r.success};
  };
}

// A rollout that blows up counts as a failed check.
LyapunovReport guarded(const std::function<LyapunovReport()>& check, int& faults) {
  try {
    return check();
  } catch (const SimulationFault&) {
    ++faults;
    LyapunovReport r;
    r.max_violation = std::numeric_limits<double>::infinity();
    r.passed = false;
    return r;
  }
}

SimState random_state(const Vec& centre, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-radius, radius);
  SimState s;
  s.x = centre;
  s.xdot = Vec::Zero(centre.size());
  for (Eigen::Index i = 0; i < centre.size(); ++i) {
    s.x(i) += unif(rng);
    s.xdot(i) = unif(rng);
  }
  return s;
}

}  // namespace

TrainSummary cmd_train(const RunConfig& cfg, const fs::path& out_dir, const TrainOptions& opts) {
  cfg.validate();
  fs::create_directories(out_dir);
  const std::string hash = config_hash(cfg);
  const auto env = make_environment(cfg);
  const PolicyArchitecture arch = resolved_architecture(cfg);
  const FlatLayout layout = FlatLayout::make(arch);

  std::mt19937_64 init_rng = stream(cfg.seed, kInit);
  const EsPolicyParams p0 = make_policy(arch.variant, arch, init_rng);
  const CemDistribution init{flatten(p0, layout).values,
                             Vec::Constant(layout.total, cfg.init_sigma)};
  CemConfig cem = cfg.cem;
  cem.seed = stream(cfg.seed, kCem)();

  auto report = [&](const IterationStats& s) {
    if (!opts.progress) return;
    if (s.iteration % 50 == 0 || s.iteration + 1 == cem.n_iterations) {
      std::cerr << "iter " << s.iteration << " mean " << s.mean_fitness << " max "
                << s.max_fitness << " success " << s.success_rate << " sigma " << s.mean_sigma
                << '\n';
    }
  };

  TrainSummary out;
  out.config_hash = hash;
  out.result = optimize(episode_objective(layout, *env, cfg), init, cem, report);

  Checkpoint& ck = out.checkpoint;
  ck.arch = arch;
  ck.values = out.result.best;
  ck.distribution = out.result.final_distribution;
  ck.config_hash = hash;
  ck.seed = cfg.seed;
  ck.best_fitness = out.result.best_fitness;

  write_json(out_dir / "checkpoint.json", checkpoint_to_json(ck));
  {
    std::ofstream h = open_out(out_dir / "history.csv");
    h << provenance_line(hash, cfg.seed);
    write_history_csv(h, out.result.history);
  }
  json resolved = config_to_json(cfg);
  resolved["config_hash"] = hash;
  write_json(out_dir / "config.json", resolved);

  if (opts.record_trajectories) {
    const EpisodeResult ep =
        run_episode(unflatten(layout, out.result.best), *env, cfg.horizon, cfg.reward, true);
    std::ofstream t = open_out(out_dir / "trajectory.csv");
    t << provenance_line(hash, cfg.seed);
    write_trajectory_csv(t, ep.trajectory);
  }
  return out;
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open checkpoint " + path.string());
  try {
    return checkpoint_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint " + path.string() + ": " + e.what());
  }
}

json cmd_eval(const Checkpoint& ck, const RunConfig& cfg) {
  cfg.validate();
  const FlatLayout layout = FlatLayout::make(ck.arch);
  if (layout.hash() != FlatLayout::make(resolved_architecture(cfg)).hash())
    throw std::runtime_error("eval: checkpoint layout does not match the config");
  const EsPolicyParams policy = unflatten(layout, ck.values);
  const auto env = make_environment(cfg);
  const SimState start = env->initial_state();
  const double sigma = cfg.eval.init_sigma_q0;

  json trials = json::array();
  int successes = 0;
  double reward_sum = 0.0;
  for (int i = 0; i < cfg.eval.n_trials; ++i) {
    std::mt19937_64 rng = stream(cfg.seed, kEval, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    SimState s0 = start;
    if (sigma > 0.0) {
      int attempts = 0;
      do {
        if (++attempts > 10000) throw std::runtime_error("eval: cannot draw a free start state");
        for (Eigen::Index k = 0; k < s0.x.size(); ++k) s0.x(k) = start.x(k) + sigma * normal(rng);
      } while (!env->start_is_free(s0.x));
    }
    const EpisodeResult r = run_episode_from(policy, *env, s0, cfg.horizon, cfg.reward);
    successes += r.success ? 1 : 0;
    reward_sum += r.total_reward;
    trials.push_back({{"start", vector_to_json(s0.x)},
                      {"success", r.success},
                      {"total_reward", r.total_reward},
                      {"terminated_early", r.terminated_early}});
  }
  return {{"config_hash", config_hash(cfg)},
          {"checkpoint_config_hash", ck.config_hash},
          {"seed", cfg.seed},
          {"n_trials", cfg.eval.n_trials},
          {"init_sigma_q0", sigma},
          {"successes", successes},
          {"success_rate", static_cast<double>(successes) / cfg.eval.n_trials},
          {"mean_reward", reward_sum / cfg.eval.n_trials},
          {"trials", trials}};
}

VerifySummary cmd_verify(const RunConfig& cfg, const Checkpoint* ck, const VerifyOptions& opts) {
  cfg.validate();
  if (!ck && !opts.random_params) throw UsageError("verify: need a checkpoint or random params");
  const VerifyRunConfig& vc = cfg.verify;
  const PolicyArchitecture arch = ck ? ck->arch : resolved_architecture(cfg);
  const FlatLayout layout = FlatLayout::make(arch);

  std::mt19937_64 rng = stream(cfg.seed, kVerify);
  std::vector<FlatParamVector> params;
  if (opts.random_params) {
    for (int i = 0; i < vc.rollouts; ++i) params.push_back(random_flat(layout, rng, vc.param_radius));
  } else {
    params.push_back(FlatParamVector{ck->values, layout});
  }
  VerifyHooks hooks;
  hooks.negate_damping = opts.negate_damping;

  auto wrap = [&](std::shared_ptr<const Environment> env) -> std::shared_ptr<const Environment> {
    if (opts.inject_energy > 0.0) return std::make_shared<EnergyInjectingEnv>(env, opts.inject_energy);
    return env;
  };
  const bool all = vc.scenario == "all";
  json checks = json::object();
  bool passed = true;

  if (all || vc.scenario == "audit") {
    int failures = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      AuditConfig ac;
      ac.seed = rng();
      if (!audit_preconditions(params[i], ac).passed()) ++failures;
    }
    checks["audit"] = {{"cases", params.size()}, {"failures", failures}, {"passed", failures == 0}};
    passed = passed && failures == 0;
  }

  if (all || vc.scenario == "free") {
    Arm2Config arm = cfg.arm;
    arm.dt = vc.free_dt;
    arm.substeps = 1;
    const auto env = wrap(std::make_shared<Arm2Env>(arm));
    VerifyConfig c{vc.free_c};
    int failures = 0, faults = 0;
    double worst = 0.0;
    const int runs = opts.random_params ? static_cast<int>(params.size()) : vc.rollouts;
    for (int i = 0; i < runs; ++i) {
      const EsPolicyParams p = unflatten(layout, params[opts.random_params ? i : 0].values);
      const SimState s0 = random_state(p.goal, vc.state_radius, rng);
      const LyapunovReport r = guarded(
          [&] { return check_free_motion_decrease(p, *env, s0, vc.free_ticks, c, hooks); }, faults);
      worst = std::max(worst, r.max_violation);
      if (!r.passed) ++failures;
    }
    checks["free"] = {{"cases", runs},
                      {"failures", failures},
                      {"faults", faults},
                      {"max_violation", worst},
                      {"tolerance", vc.free_c * vc.free_dt},
                      {"passed", failures == 0}};
    passed = passed && failures == 0;
  }

  if (all || vc.scenario == "contact") {
    const auto env = wrap(std::make_shared<Block2dEnv>(cfg.block));
    VerifyConfig c{vc.contact_c};
    int failures = 0, faults = 0;
    double worst = 0.0;
    for (const FlatParamVector& flat : params) {
      EsPolicyParams p = unflatten(layout, flat.values);
      p.goal = cfg.block.goal();
      const LyapunovReport r = guarded(
          [&] { return check_passivity(p, *env, env->initial_state(), vc.contact_ticks, c, hooks); },
          faults);
      worst = std::max(worst, r.max_violation);
      if (!r.passed) ++failures;
    }
    checks["contact"] = {{"cases", params.size()},
                         {"failures", failures},
                         {"faults", faults},
                         {"max_violation", worst},
                         {"tolerance", vc.contact_c * cfg.block.dt},
                         {"passed", failures == 0}};
    passed = passed && failures == 0;
  }

  VerifySummary out;
  out.passed = passed;
  out.report = {{"config_hash", config_hash(cfg)},
                {"seed", cfg.seed},
                {"scenario", vc.scenario},
                {"random_params", opts.random_params},
                {"negate_damping", opts.negate_damping},
                {"inject_energy", opts.inject_energy},
                {"checks", checks},
                {"passed", passed}};
  return out;
}

json cmd_ablate(const RunConfig& cfg, const fs::path& out_dir, const TrainOptions& opts) {
  cfg.validate();
  fs::create_directories(out_dir);
  json rows = json::array();
  std::ofstream csv = open_out(out_dir / "ablation.csv");
  csv << provenance_line(config_hash(cfg), cfg.seed);
  csv << "variant,best_fitness,best_success,max_success_rate,first_success_iteration\n";
  for (PotentialVariant v :
       {PotentialVariant::kCombined, PotentialVariant::kIcnnOnly, PotentialVariant::kQuadOnly}) {
    RunConfig run = cfg;
    run.policy.variant = v;
    const TrainSummary s = cmd_train(run, out_dir / to_string(v), opts);
    double max_rate = 0.0;
    int first = -1;
    for (const IterationStats& h : s.result.history) {
      max_rate = std::max(max_rate, h.success_rate);
      if (first < 0 && h.success_rate > 0.0) first = h.iteration;
    }
    csv << to_string(v) << ',' << s.result.best_fitness << ',' << (s.result.best_success ? 1 : 0)
        << ',' << max_rate << ',' << first << '\n';
    rows.push_back({{"variant", to_string(v)},
                    {"config_hash", s.config_hash},
                    {"best_fitness", s.result.best_fitness},
                    {"best_success", s.result.best_success},
                    {"max_success_rate", max_rate},
                    {"first_success_iteration", first}});
  }
  return {{"seed", cfg.seed}, {"variants", rows}};
}

}  // namespace esrl
