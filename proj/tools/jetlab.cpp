#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "jetlab/commands.hpp"
#include "jetlab/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"jet-space geometric calculus and least-squares PDE solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  jetlab::CommandOverrides ov;
  int samples = -1;
  std::uint64_t seed = 0;
  bool seed_set = false, samples_set = false, tol_set = false;
  double tol = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "configuration JSON")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--samples", samples, "seeded sample count")
        ->each([&](const std::string&) { samples_set = true; });
    sub->add_option("--seed", seed, "random seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--tol", tol, "verification tolerance")
        ->each([&](const std::string&) { tol_set = true; });
  };

  CLI::App* analyze = app.add_subcommand("analyze", "dump geometry at seeded jet points");
  CLI::App* verify = app.add_subcommand("verify", "run the invariant checks");
  CLI::App* solve = app.add_subcommand("solve", "minimize the least-squares energy");
  CLI::App* reduce = app.add_subcommand("reduce", "prolong a higher-order system to first order");
  for (CLI::App* sub : {analyze, verify, solve, reduce}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  if (samples_set) ov.samples = samples;
  if (seed_set) ov.seed = seed;
  if (tol_set) ov.tol = tol;

  try {
    jetlab::RunConfig cfg = jetlab::load_config(config_path);
    if (app.got_subcommand(analyze)) return jetlab::run_analyze(cfg, out_dir, ov);
    if (app.got_subcommand(verify)) return jetlab::run_verify(cfg, out_dir, ov);
    if (app.got_subcommand(solve)) return jetlab::run_solve(cfg, out_dir);
    return jetlab::run_reduce(cfg, out_dir);
  } catch (const jetlab::LineSearchFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
