#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "noiselab/harness.hpp"
#include "noiselab/sampler.hpp"

namespace {

struct SubArgs {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  int threads = 0;
  bool seed_set = false;
};

void add_run_subcommand(CLI::App& app, const std::string& name,
                        const std::string& description,
                        std::vector<std::pair<std::string, SubArgs>>& queue) {
  auto args = std::make_shared<SubArgs>();
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", args->config, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args->out, "output directory")->required();
  sub->add_option("--seed", args->seed, "seed override");
  sub->add_option("--threads", args->threads, "worker thread count");
  sub->callback([&queue, name, args, sub] {
    args->seed_set = sub->count("--seed") > 0;
    queue.emplace_back(name, *args);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "noiselab: antithetic / k-antithetic / RQMC noise designs for "
      "diffusion-style samplers, with estimator and symmetry experiments"};
  app.require_subcommand(1);

  std::vector<std::pair<std::string, SubArgs>> queue;
  add_run_subcommand(app, "correlation",
                     "PN vs RR pixel correlation tables and histograms",
                     queue);
  add_run_subcommand(app, "uq",
                     "confidence intervals and efficiency per estimator",
                     queue);
  add_run_subcommand(app, "qmc-tradeoff",
                     "CI length across replicate/point-count splits", queue);
  add_run_subcommand(app, "symmetry",
                     "score slices, antisymmetry scores, temporal correlation",
                     queue);
  add_run_subcommand(app, "ou",
                     "spectral decay and Fisher-information curves", queue);
  add_run_subcommand(app, "fkg",
                     "monotone-map correlation checks and step conditions",
                     queue);

  CLI11_PARSE(app, argc, argv);

  for (const auto& [kind, args] : queue) {
    noiselab::harness::RunOptions options;
    options.config_path = args.config;
    options.out_dir = args.out;
    if (args.seed_set) {
      options.seed_override = static_cast<std::uint64_t>(args.seed);
    }
    options.threads = args.threads;
    try {
      noiselab::harness::run_experiment(kind, options);
    } catch (const noiselab::harness::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 3;
    }
  }
  return 0;
}
