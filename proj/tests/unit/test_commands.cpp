#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "esrl/commands.hpp"

namespace esrl {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("esrl_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig tiny_block() {
  RunConfig cfg = RunConfig::block_defaults();
  cfg.cem.n_iterations = 4;
  cfg.horizon = 20;
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ESRL_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Serialization, MatrixRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1e3);
  Mat m(3, 4);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = n(rng) / 7.0;
  const Mat back = matrix_from_json(nlohmann::json::parse(matrix_to_json(m).dump()));
  EXPECT_TRUE((back.array() == m.array()).all());
}

TEST(Serialization, PolicyRoundTripIsBitExact) {
  PolicyArchitecture a;
  a.goal = Vec{{0.1, -0.3}};
  std::mt19937_64 rng(2);
  const FlatLayout layout = FlatLayout::make(a);
  const EsPolicyParams p = unflatten(layout, random_flat(layout, rng).values);
  const EsPolicyParams q = policy_from_json(nlohmann::json::parse(to_json(p).dump()));
  EXPECT_TRUE((flatten(p, layout).values.array() == flatten(q, layout).values.array()).all());
  EXPECT_TRUE((q.goal.array() == p.goal.array()).all());
}

TEST(Serialization, CheckpointRoundTripAndHashCheck) {
  Checkpoint c;
  c.arch.goal = Vec{{0.0, -0.025}};
  const FlatLayout layout = FlatLayout::make(c.arch);
  std::mt19937_64 rng(3);
  c.values = random_flat(layout, rng).values;
  c.distribution = {c.values, Vec::Constant(layout.total, 0.2)};
  c.config_hash = "abc";
  c.seed = 7;
  c.best_fitness = -12.5;
  const nlohmann::json j = nlohmann::json::parse(checkpoint_to_json(c).dump());
  const Checkpoint back = checkpoint_from_json(j);
  EXPECT_TRUE((back.values.array() == c.values.array()).all());
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.config_hash, "abc");

  nlohmann::json bad = j;
  bad["layout_hash"] = "0000000000000000";
  EXPECT_THROW(checkpoint_from_json(bad), std::runtime_error);
  bad = j;
  bad["architecture"]["icnn_hidden"] = {16, 8};
  EXPECT_THROW(checkpoint_from_json(bad), std::runtime_error);
}

TEST(Config, DefaultsRoundTrip) {
  for (const RunConfig& cfg : {RunConfig::block_defaults(), RunConfig::arm_defaults()}) {
    const RunConfig back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
    EXPECT_EQ(config_hash(back), config_hash(cfg));
  }
}

TEST(Config, PaperDefaultsArePrefilled) {
  const RunConfig cfg = RunConfig::block_defaults();
  EXPECT_EQ(cfg.cem.n_samples, 15);
  EXPECT_EQ(cfg.cem.n_elites, 3);
  EXPECT_EQ(cfg.horizon, 200);
  EXPECT_EQ(cfg.init_sigma, 0.2);
  EXPECT_EQ(cfg.policy.eta_init, 0.1);
  EXPECT_EQ(cfg.policy.eta_min, 1e-3);
  EXPECT_EQ(cfg.policy.eta_max, 5.0);
  EXPECT_EQ(cfg.policy.icnn_hidden, (std::vector<int>{16, 16}));
  EXPECT_EQ(cfg.policy.diag_hidden, (std::vector<int>{8, 8}));
  EXPECT_EQ(cfg.eval.n_trials, 15);
}

TEST(Config, UnknownKeysAndBadValuesAreRejected) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"cem": {"n_sample": 3}})")), UsageError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), UsageError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"cem": {"n_elites": 99}})")),
               UsageError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"task": "juggle"})")), UsageError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"episode": {"horizon": "x"}})")),
               UsageError);
}

TEST(Config, HashIgnoresSeedAndWorkers) {
  RunConfig a = RunConfig::block_defaults();
  RunConfig b = a;
  b.seed = 99;
  b.cem.workers = 4;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.horizon = 150;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Train, WritesFilesAndIsDeterministic) {
  const RunConfig cfg = tiny_block();
  const fs::path a = scratch("train_a"), b = scratch("train_b");
  const TrainSummary s = cmd_train(cfg, a, {true, false});
  cmd_train(cfg, b);
  for (const char* f : {"checkpoint.json", "history.csv", "config.json", "trajectory.csv"})
    EXPECT_TRUE(fs::exists(a / f)) << f;
  const std::string history = slurp(a / "history.csv");
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 2 + cfg.cem.n_iterations);
  EXPECT_EQ(history.rfind("# config_hash=" + s.config_hash + " seed=0\n", 0), 0u);
  EXPECT_EQ(history, slurp(b / "history.csv"));
  EXPECT_EQ(slurp(a / "checkpoint.json"), slurp(b / "checkpoint.json"));

  const RunConfig back = load_config(a / "config.json");
  EXPECT_EQ(config_hash(back), s.config_hash);
  const Checkpoint ck = load_checkpoint(a / "checkpoint.json");
  EXPECT_EQ(ck.config_hash, s.config_hash);
  EXPECT_TRUE((ck.values.array() == s.result.best.array()).all());
}

TEST(Eval, ZeroSpreadGivesIdenticalTrials) {
  const RunConfig cfg = tiny_block();
  const TrainSummary s = cmd_train(cfg, scratch("eval"));
  RunConfig ec = cfg;
  ec.eval.n_trials = 4;
  const nlohmann::json out = cmd_eval(s.checkpoint, ec);
  const int successes = out["successes"];
  EXPECT_TRUE(successes == 0 || successes == 4);
  for (const auto& t : out["trials"]) EXPECT_EQ(t["total_reward"], out["trials"][0]["total_reward"]);
  EXPECT_EQ(out["n_trials"], 4);
}

TEST(Eval, PerturbedStartsAreFreeAndShared) {
  const RunConfig cfg = tiny_block();
  const TrainSummary s = cmd_train(cfg, scratch("eval_sigma"));
  RunConfig ec = cfg;
  ec.eval.n_trials = 6;
  ec.eval.init_sigma_q0 = 0.02;
  const nlohmann::json a = cmd_eval(s.checkpoint, ec);
  const nlohmann::json b = cmd_eval(s.checkpoint, ec);
  EXPECT_EQ(a.dump(), b.dump());
  const Block2dEnv env(cfg.block);
  for (const auto& t : a["trials"]) EXPECT_TRUE(env.start_is_free(vector_from_json(t["start"])));
}

TEST(Eval, LayoutMismatchThrows) {
  const RunConfig cfg = tiny_block();
  const TrainSummary s = cmd_train(cfg, scratch("eval_mismatch"));
  RunConfig other = cfg;
  other.policy.icnn_hidden = {8};
  EXPECT_THROW(cmd_eval(s.checkpoint, other), std::runtime_error);
}

TEST(Verify, RandomParamsPassAndMutationsFail) {
  RunConfig cfg = RunConfig::block_defaults();
  cfg.verify.rollouts = 3;
  cfg.verify.free_ticks = 1000;
  cfg.verify.contact_ticks = 500;
  VerifyOptions opts;
  opts.random_params = true;
  const VerifySummary ok = cmd_verify(cfg, nullptr, opts);
  EXPECT_TRUE(ok.passed) << ok.report.dump();
  opts.negate_damping = true;
  EXPECT_FALSE(cmd_verify(cfg, nullptr, opts).passed);
  opts.negate_damping = false;
  opts.inject_energy = 5.0;
  EXPECT_FALSE(cmd_verify(cfg, nullptr, opts).passed);
  EXPECT_THROW(cmd_verify(cfg, nullptr, VerifyOptions{}), UsageError);
}

TEST(Ablate, WritesComparisonCsv) {
  RunConfig cfg = tiny_block();
  cfg.cem.n_iterations = 2;
  const fs::path out = scratch("ablate");
  const nlohmann::json rows = cmd_ablate(cfg, out);
  EXPECT_EQ(rows["variants"].size(), 3u);
  const std::string csv = slurp(out / "ablation.csv");
  EXPECT_NE(csv.find("variant,best_fitness"), std::string::npos);
  for (const char* v : {"combined", "icnn_only", "quad_only"}) {
    EXPECT_NE(csv.find(v), std::string::npos);
    EXPECT_TRUE(fs::exists(out / v / "history.csv"));
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  {
    std::ofstream cfg(dir / "tiny.json");
    cfg << R"({"episode": {"horizon": 10}, "cem": {"n_iterations": 2},
               "verify": {"rollouts": 2, "free_ticks": 500, "contact_ticks": 300}})";
    std::ofstream bad(dir / "bad.json");
    bad << R"({"cem": {"n_sampls": 3}})";
  }
  const std::string tiny = "--config " + (dir / "tiny.json").string();
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("train --no-such-flag"), 1);
  EXPECT_EQ(run_cli("train --config " + (dir / "bad.json").string()), 1);
  EXPECT_EQ(run_cli("train --quiet " + tiny + " --out " + (dir / "run").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "run" / "history.csv"));
  EXPECT_EQ(run_cli("eval --checkpoint " + (dir / "run" / "checkpoint.json").string() + " --out " +
                    dir.string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "eval.json"));
  EXPECT_EQ(run_cli("verify --random-params " + tiny), 0);
  EXPECT_EQ(run_cli("verify --random-params --mutate negate-damping " + tiny), 2);
  EXPECT_EQ(run_cli("verify --random-params --mutate inject-energy " + tiny), 2);
  EXPECT_EQ(run_cli("verify " + tiny), 1);
  {
    std::ofstream corrupt(dir / "broken.json");
    corrupt << "{\"format\": 1}";
  }
  EXPECT_EQ(run_cli("eval --checkpoint " + (dir / "broken.json").string()), 3);
}

}  // namespace
}  // namespace esrl
