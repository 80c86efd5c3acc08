#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "esrl/commands.hpp"

namespace fs = std::filesystem;
using esrl::ExitCode;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_out) {
  c.out = default_out;
  cmd->add_option("--config", c.config, "JSON config file (block defaults when omitted)");
  cmd->add_option("--seed", c.seed, "Override the config seed");
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--workers", c.workers, "Episode evaluation threads")->check(CLI::PositiveNumber);
}

esrl::RunConfig resolve(const Common& c, const std::string& fallback_config = {}) {
  esrl::RunConfig cfg = esrl::RunConfig::block_defaults();
  if (!c.config.empty()) {
    cfg = esrl::load_config(c.config);
  } else if (!fallback_config.empty() && fs::exists(fallback_config)) {
    cfg = esrl::load_config(fallback_config);
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.workers) cfg.cem.workers = *c.workers;
  cfg.validate();
  return cfg;
}

void write_report(const fs::path& dir, const std::string& name, const nlohmann::json& j) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-shaping policies trained with the cross-entropy method"};
  app.require_subcommand(1);

  Common train_opts, eval_opts, verify_opts, ablate_opts;
  bool record = false;
  bool quiet = false;

  CLI::App* train = app.add_subcommand("train", "Run CEM on the configured task");
  add_common(train, train_opts, "runs/train");
  train->add_flag("--record-trajectories", record, "Write trajectory.csv for the best sample");
  train->add_flag("--quiet", quiet, "No progress lines");

  CLI::App* eval = app.add_subcommand("eval", "Success rate from perturbed start positions");
  add_common(eval, eval_opts, ".");
  std::string eval_ckpt;
  std::optional<int> n_trials;
  std::optional<double> init_sigma;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint.json from train")->required();
  eval->add_option("--n-trials", n_trials, "Episodes per evaluation")->check(CLI::PositiveNumber);
  eval->add_option("--init-sigma-q0", init_sigma, "Std of the start perturbation")
      ->check(CLI::NonNegativeNumber);

  CLI::App* verify = app.add_subcommand("verify", "Numerical stability audit");
  add_common(verify, verify_opts, "");
  std::string verify_ckpt;
  bool random_params = false;
  std::string scenario;
  std::string mutate = "none";
  auto* ck_opt = verify->add_option("--checkpoint", verify_ckpt, "checkpoint.json to audit");
  verify->add_flag("--random-params", random_params, "Audit random parameter vectors")
      ->excludes(ck_opt);
  verify->add_option("--scenario", scenario, "audit, free, contact or all")
      ->check(CLI::IsMember({"audit", "free", "contact", "all"}));
  verify->add_option("--mutate", mutate, "Deliberate fault to check the checker")
      ->check(CLI::IsMember({"none", "negate-damping", "inject-energy"}))
      ->capture_default_str();

  CLI::App* ablate = app.add_subcommand("ablate", "Train every potential variant and compare");
  add_common(ablate, ablate_opts, "runs/ablate");
  ablate->add_flag("--record-trajectories", record, "Write trajectory.csv for each variant");
  ablate->add_flag("--quiet", quiet, "No progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*train) {
      const esrl::RunConfig cfg = resolve(train_opts);
      const esrl::TrainSummary s = esrl::cmd_train(cfg, train_opts.out, {record, !quiet});
      std::cout << "best_fitness " << s.result.best_fitness << " best_success "
                << s.result.best_success << " config_hash " << s.config_hash << " seed "
                << cfg.seed << '\n';
    } else if (*eval) {
      const esrl::Checkpoint ck = esrl::load_checkpoint(eval_ckpt);
      esrl::RunConfig cfg =
          resolve(eval_opts, (fs::path(eval_ckpt).parent_path() / "config.json").string());
      if (n_trials) cfg.eval.n_trials = *n_trials;
      if (init_sigma) cfg.eval.init_sigma_q0 = *init_sigma;
      const nlohmann::json summary = esrl::cmd_eval(ck, cfg);
      write_report(eval_opts.out, "eval.json", summary);
      std::cout << "success_rate " << summary["success_rate"].get<double>() << " ("
                << summary["successes"].get<int>() << "/" << cfg.eval.n_trials << ")\n";
    } else if (*verify) {
      esrl::RunConfig cfg = resolve(verify_opts);
      if (!scenario.empty()) cfg.verify.scenario = scenario;
      std::optional<esrl::Checkpoint> ck;
      if (!verify_ckpt.empty()) ck = esrl::load_checkpoint(verify_ckpt);
      esrl::VerifyOptions vo;
      vo.random_params = random_params;
      vo.negate_damping = mutate == "negate-damping";
      vo.inject_energy = mutate == "inject-energy" ? 5.0 : 0.0;
      const esrl::VerifySummary s = esrl::cmd_verify(cfg, ck ? &*ck : nullptr, vo);
      if (!verify_opts.out.empty()) write_report(verify_opts.out, "verify.json", s.report);
      std::cout << s.report["checks"].dump() << '\n' << (s.passed ? "PASSED" : "FAILED") << '\n';
      if (!s.passed) return static_cast<int>(ExitCode::kVerificationFailed);
    } else if (*ablate) {
      const esrl::RunConfig cfg = resolve(ablate_opts);
      const nlohmann::json rows = esrl::cmd_ablate(cfg, ablate_opts.out, {record, !quiet});
      std::cout << rows.dump(2) << '\n';
    }
  } catch (const esrl::UsageError& e) {
    std::cerr << "esrl: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kUsage);
  } catch (const std::exception& e) {
    std::cerr << "esrl: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kRuntimeFault);
  }
  return static_cast<int>(ExitCode::kOk);
}
