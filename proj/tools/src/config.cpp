#include <fstream>
#include <set>
#include <sstream>

#include "esrl/commands.hpp"

namespace esrl {

namespace {

using nlohmann::json;

// Reads keys from one config section and rejects keys it never asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw UsageError("config: section '" + name_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw UsageError("config: bad value for " + name_ + "." + key + ": " + e.what());
    }
  }

  void variant(const char* key, PotentialVariant& out) {
    std::string s = to_string(out);
    get(key, s);
    try {
      out = parse_variant(s);
    } catch (const std::invalid_argument& e) {
      throw UsageError("config: " + name_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw UsageError("config: unknown key " + name_ + "." + k);
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_block(const json& j, Block2dConfig& c) {
  Section s(j, "block");
  s.get("block_side", c.block_side);
  s.get("slot_clearance", c.slot_clearance);
  s.get("slot_depth", c.slot_depth);
  s.get("slot_position", c.slot_position);
  s.get("shoulder_width", c.shoulder_width);
  s.get("wall_base", c.wall_base);
  s.get("mass", c.mass);
  s.get("contact_stiffness", c.contact_stiffness);
  s.get("contact_damping", c.contact_damping);
  s.get("wall_friction", c.wall_friction);
  s.get("dt", c.dt);
  s.get("substeps", c.substeps);
  s.get("success_depth", c.success_depth);
  s.get("initial_position", c.initial_position);
  s.finish();
}

void read_arm(const json& j, Arm2Config& c) {
  Section s(j, "arm");
  s.get("link_masses", c.link_masses);
  s.get("link_lengths", c.link_lengths);
  s.get("link_inertias", c.link_inertias);
  s.get("gravity", c.gravity);
  s.get("gravity_compensated", c.gravity_compensated);
  s.get("joint_viscous_friction", c.joint_viscous_friction);
  s.get("dt", c.dt);
  s.get("substeps", c.substeps);
  s.get("initial_q", c.initial_q);
  s.get("goal_q", c.goal_q);
  s.get("goal_tolerance", c.goal_tolerance);
  s.finish();
}

void read_policy(const json& j, PolicyArchitecture& a) {
  Section s(j, "policy");
  s.variant("variant", a.variant);
  s.get("icnn_hidden", a.icnn_hidden);
  s.get("diag_hidden", a.diag_hidden);
  s.get("offdiag_hidden", a.offdiag_hidden);
  s.get("srelu_d", a.srelu_d);
  s.get("eta_init", a.eta_init);
  s.get("eta_min", a.eta_min);
  s.get("eta_max", a.eta_max);
  s.get("eps_diag", a.eps_diag);
  s.finish();
}

void read_reward(const json& j, RewardConfig& r) {
  Section s(j, "reward");
  s.get("w_quad", r.w_quad);
  s.get("w_log", r.w_log);
  s.get("alpha", r.alpha);
  s.finish();
}

void read_cem(const json& j, RunConfig& cfg) {
  Section s(j, "cem");
  s.get("n_samples", cfg.cem.n_samples);
  s.get("n_elites", cfg.cem.n_elites);
  s.get("n_iterations", cfg.cem.n_iterations);
  s.get("init_sigma", cfg.init_sigma);
  s.get("sigma_floor", cfg.cem.sigma_floor);
  s.get("extra_std", cfg.cem.extra_std);
  s.get("extra_decay_iterations", cfg.cem.extra_decay_iterations);
  s.get("workers", cfg.cem.workers);
  s.finish();
}

void read_eval(const json& j, EvalConfig& e) {
  Section s(j, "eval");
  s.get("n_trials", e.n_trials);
  s.get("init_sigma_q0", e.init_sigma_q0);
  s.finish();
}

void read_verify(const json& j, VerifyRunConfig& v) {
  Section s(j, "verify");
  s.get("scenario", v.scenario);
  s.get("rollouts", v.rollouts);
  s.get("free_dt", v.free_dt);
  s.get("free_ticks", v.free_ticks);
  s.get("contact_ticks", v.contact_ticks);
  s.get("free_c", v.free_c);
  s.get("contact_c", v.contact_c);
  s.get("param_radius", v.param_radius);
  s.get("state_radius", v.state_radius);
  s.finish();
}

Task parse_task(const std::string& s) {
  if (s == "block") return Task::kBlock;
  if (s == "arm") return Task::kArm;
  throw UsageError("config: unknown task '" + s + "'");
}

const char* task_name(Task t) { return t == Task::kBlock ? "block" : "arm"; }

}  // namespace

RunConfig RunConfig::block_defaults() {
  RunConfig c;
  c.task = Task::kBlock;
  c.cem.n_iterations = 500;
  c.cem.extra_std = 0.2;
  c.cem.extra_decay_iterations = 250;
  return c;
}

RunConfig RunConfig::arm_defaults() {
  RunConfig c;
  c.task = Task::kArm;
  c.policy.icnn_hidden = {24, 24};
  c.policy.diag_hidden = {12, 12};
  c.policy.offdiag_hidden = {12, 12};
  c.arm.dt = 1e-3;
  c.arm.substeps = 10;
  c.cem.n_iterations = 100;
  return c;
}

void RunConfig::validate() const {
  try {
    block.validate();
    arm.validate();
    resolved_architecture(*this).validate();
    reward.validate();
    cem.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (horizon < 1) throw UsageError("config: episode.horizon must be >= 1");
  if (!(init_sigma > 0.0)) throw UsageError("config: cem.init_sigma must be > 0");
  if (eval.n_trials < 1) throw UsageError("config: eval.n_trials must be >= 1");
  if (!(eval.init_sigma_q0 >= 0.0)) throw UsageError("config: eval.init_sigma_q0 must be >= 0");
  const auto& v = verify;
  if (v.scenario != "audit" && v.scenario != "free" && v.scenario != "contact" &&
      v.scenario != "all")
    throw UsageError("config: verify.scenario must be audit, free, contact or all");
  if (v.rollouts < 1 || v.free_ticks < 1 || v.contact_ticks < 1)
    throw UsageError("config: verify counts must be >= 1");
  if (!(v.free_dt > 0.0) || !(v.free_c > 0.0) || !(v.contact_c > 0.0) || !(v.param_radius > 0.0) ||
      !(v.state_radius > 0.0))
    throw UsageError("config: verify constants must be > 0");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  Task task = Task::kBlock;
  if (j.contains("task")) {
    if (!j.at("task").is_string()) throw UsageError("config: task must be a string");
    task = parse_task(j.at("task").get<std::string>());
  }
  RunConfig cfg = task == Task::kBlock ? RunConfig::block_defaults() : RunConfig::arm_defaults();

  Section top(j, "config");
  std::string task_str = task_name(task);
  top.get("task", task_str);
  top.get("seed", cfg.seed);
  std::string written_hash;  // present in resolved snapshots
  top.get("config_hash", written_hash);
  if (const json* s = top.sub("block")) read_block(*s, cfg.block);
  if (const json* s = top.sub("arm")) read_arm(*s, cfg.arm);
  if (const json* s = top.sub("policy")) read_policy(*s, cfg.policy);
  if (const json* s = top.sub("reward")) read_reward(*s, cfg.reward);
  if (const json* s = top.sub("episode")) {
    Section ep(*s, "episode");
    ep.get("horizon", cfg.horizon);
    ep.finish();
  }
  if (const json* s = top.sub("cem")) read_cem(*s, cfg);
  if (const json* s = top.sub("eval")) read_eval(*s, cfg.eval);
  if (const json* s = top.sub("verify")) read_verify(*s, cfg.verify);
  top.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["task"] = task_name(c.task);
  j["seed"] = c.seed;
  const auto& b = c.block;
  j["block"] = {{"block_side", b.block_side},
                {"slot_clearance", b.slot_clearance},
                {"slot_depth", b.slot_depth},
                {"slot_position", b.slot_position},
                {"shoulder_width", b.shoulder_width},
                {"wall_base", b.wall_base},
                {"mass", b.mass},
                {"contact_stiffness", b.contact_stiffness},
                {"contact_damping", b.contact_damping},
                {"wall_friction", b.wall_friction},
                {"dt", b.dt},
                {"substeps", b.substeps},
                {"success_depth", b.success_depth},
                {"initial_position", b.initial_position}};
  const auto& a = c.arm;
  j["arm"] = {{"link_masses", a.link_masses},
              {"link_lengths", a.link_lengths},
              {"link_inertias", a.link_inertias},
              {"gravity", a.gravity},
              {"gravity_compensated", a.gravity_compensated},
              {"joint_viscous_friction", a.joint_viscous_friction},
              {"dt", a.dt},
              {"substeps", a.substeps},
              {"initial_q", a.initial_q},
              {"goal_q", a.goal_q},
              {"goal_tolerance", a.goal_tolerance}};
  const auto& p = c.policy;
  j["policy"] = {{"variant", to_string(p.variant)},
                 {"icnn_hidden", p.icnn_hidden},
                 {"diag_hidden", p.diag_hidden},
                 {"offdiag_hidden", p.offdiag_hidden},
                 {"srelu_d", p.srelu_d},
                 {"eta_init", p.eta_init},
                 {"eta_min", p.eta_min},
                 {"eta_max", p.eta_max},
                 {"eps_diag", p.eps_diag}};
  j["reward"] = {{"w_quad", c.reward.w_quad}, {"w_log", c.reward.w_log}, {"alpha", c.reward.alpha}};
  j["episode"] = {{"horizon", c.horizon}};
  j["cem"] = {{"n_samples", c.cem.n_samples},
              {"n_elites", c.cem.n_elites},
              {"n_iterations", c.cem.n_iterations},
              {"init_sigma", c.init_sigma},
              {"sigma_floor", c.cem.sigma_floor},
              {"extra_std", c.cem.extra_std},
              {"extra_decay_iterations", c.cem.extra_decay_iterations},
              {"workers", c.cem.workers}};
  j["eval"] = {{"n_trials", c.eval.n_trials}, {"init_sigma_q0", c.eval.init_sigma_q0}};
  const auto& v = c.verify;
  j["verify"] = {{"scenario", v.scenario},         {"rollouts", v.rollouts},
                 {"free_dt", v.free_dt},
                 {"free_ticks", v.free_ticks},     {"contact_ticks", v.contact_ticks},
                 {"free_c", v.free_c},             {"contact_c", v.contact_c},
                 {"param_radius", v.param_radius}, {"state_radius", v.state_radius}};
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("seed");
  j["cem"].erase("workers");
  return hex64(fnv1a64(j.dump()));
}

std::unique_ptr<Environment> make_environment(const RunConfig& cfg) {
  if (cfg.task == Task::kBlock) return std::make_unique<Block2dEnv>(cfg.block);
  return std::make_unique<Arm2Env>(cfg.arm);
}

PolicyArchitecture resolved_architecture(const RunConfig& cfg) {
  PolicyArchitecture a = cfg.policy;
  a.dim = 2;
  a.goal = make_environment(cfg)->goal();
  return a;
}

}  // namespace esrl
