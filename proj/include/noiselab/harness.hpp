#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace noiselab::harness {

// Invalid or inconsistent experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;  // 0 = library default
};

// Experiment kinds: correlation | uq | qmc-tradeoff | symmetry | ou | fkg.
// Reads the JSON config, runs the experiment, and writes manifest.json,
// tables/*.csv and plotdata/*.csv under out_dir. Throws ConfigError on bad
// configs and NumericalError on runtime numerical failures.
void run_experiment(const std::string& kind, const RunOptions& options);

}  // namespace noiselab::harness
