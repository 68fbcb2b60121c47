#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "vwta/config.hpp"
#include "vwta/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Winner-takes-all conditional density estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::int64_t seed_override = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "override the configured seed list");
  };

  CLI::App* generate = app.add_subcommand("generate", "write dataset splits to disk");
  CLI::App* train = app.add_subcommand("train", "fit one model per seed");
  CLI::App* eval = app.add_subcommand("eval", "score checkpoints on the test split");
  CLI::App* sweep = app.add_subcommand("sweep-h", "bandwidth sweep plus golden-section tuning");
  CLI::App* theory = app.add_subcommand("theory", "asymptotic risk table over K");
  CLI::App* sample = app.add_subcommand("sample", "draw from a fitted estimator");
  for (CLI::App* cmd : {generate, train, eval, sweep, theory, sample}) add_common(cmd);

  double sample_x = 0.5;
  int sample_n = 1000;
  sample->add_option("--x", sample_x, "conditioning input in [0,1]");
  sample->add_option("--n", sample_n, "number of draws");

  CLI11_PARSE(app, argc, argv);

  try {
    vwta::RunConfig cfg = vwta::parse_config_file(config_path);
    if (seed_override >= 0) cfg.seeds = {std::uint64_t(seed_override)};
    if (generate->parsed()) return vwta::cmd_generate(cfg, out_dir);
    if (train->parsed()) return vwta::cmd_train(cfg, out_dir);
    if (eval->parsed()) return vwta::cmd_eval(cfg, out_dir);
    if (sweep->parsed()) return vwta::cmd_sweep_h(cfg, out_dir);
    if (theory->parsed()) return vwta::cmd_theory(cfg, out_dir);
    if (sample->parsed()) return vwta::cmd_sample(cfg, out_dir, sample_x, sample_n);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
