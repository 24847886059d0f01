#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "noiselab/harness.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using noiselab::harness::ConfigError;
using noiselab::harness::RunOptions;
using noiselab::harness::run_experiment;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("noiselab_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const json& j,
                      const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream f(p);
  f << j.dump(2);
  return p;
}

json linear_model() {
  return json{{"shape", {1, 4, 4}},
              {"schedule", {{"type", "linear_beta"},
                            {"steps", 10},
                            {"beta_min", 1e-3},
                            {"beta_max", 0.05}}},
              {"mixture",
               {{"components",
                 {{{"weight", 1.0}, {"sigma", 1.0}, {"mean", {{"fill", 0.0}}}}}}}}};
}

json mixture_model() {
  return json{
      {"shape", {3, 4, 4}},
      {"schedule", {{"type", "linear_beta"},
                    {"steps", 20},
                    {"beta_min", 1e-3},
                    {"beta_max", 0.1}}},
      {"mixture",
       {{"components",
         {{{"weight", 0.5}, {"sigma", 0.5}, {"mean", {{"fill", 0.6}}}},
          {{"weight", 0.3}, {"sigma", 0.7}, {"mean", {{"fill", -0.4}}}},
          {{"weight", 0.2},
           {"sigma", 0.4},
           {"mean", {{"alternating", {0.2, -0.2}}}}}}}}}};
}

// cell lookup in a tiny CSV: header column name -> value, filtered by the
// first columns matching the given prefix values
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::string line;
  std::getline(f, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(f, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && std::getline(ss, cell, ',');
         ++i) {
      row[header[i]] = cell;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// byte-level comparison of two output trees
void require_identical_trees(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
  }
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  REQUIRE(fa == fb);
  for (const auto& rel : fa) {
    REQUIRE(slurp(a / rel) == slurp(b / rel));
  }
}

}  // namespace

TEST_CASE("config validation: field-level errors") {
  TempDir tmp("cfg");
  json base{{"schema_version", 1},
            {"experiment", "correlation"},
            {"seed", 5},
            {"model", linear_model()},
            {"pairs", 16}};

  {  // unknown key anywhere is an error
    json bad = base;
    bad["typo_key"] = 1;
    RunOptions opt{write_config(tmp.path, bad).string(),
                   (tmp.path / "out1").string()};
    CHECK_THROWS_WITH_AS(run_experiment("correlation", opt),
                         doctest::Contains("typo_key"), ConfigError);
  }
  {  // missing seed
    json bad = base;
    bad.erase("seed");
    RunOptions opt{write_config(tmp.path, bad).string(),
                   (tmp.path / "out2").string()};
    CHECK_THROWS_AS(run_experiment("correlation", opt), ConfigError);
  }
  {  // experiment kind must match the subcommand
    RunOptions opt{write_config(tmp.path, base).string(),
                   (tmp.path / "out3").string()};
    CHECK_THROWS_AS(run_experiment("uq", opt), ConfigError);
  }
  {  // nested unknown key in the model
    json bad = base;
    bad["model"]["mystery"] = 2;
    RunOptions opt{write_config(tmp.path, bad).string(),
                   (tmp.path / "out4").string()};
    CHECK_THROWS_WITH_AS(run_experiment("correlation", opt),
                         doctest::Contains("mystery"), ConfigError);
  }
  {  // malformed JSON
    const fs::path p = tmp.path / "broken.json";
    std::ofstream(p) << "{ not json";
    RunOptions opt{p.string(), (tmp.path / "out5").string()};
    CHECK_THROWS_AS(run_experiment("correlation", opt), ConfigError);
  }
}

TEST_CASE("correlation run: linear score gives exact PN cancellation") {
  TempDir tmp("corr");
  const int pairs = 64;
  json cfg{{"schema_version", 1},
           {"experiment", "correlation"},
           {"seed", 11},
           {"model", linear_model()},
           {"pairs", pairs}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("correlation", opt);

  const auto rows = read_csv(tmp.path / "out" / "tables" /
                             "correlation_summary.csv");
  REQUIRE(rows.size() == 4);
  double pn_cent = 0.0, rr_cent = 0.0;
  for (const auto& row : rows) {
    if (row.at("metric") == "centralized") {
      if (row.at("pairing") == "pn") pn_cent = std::stod(row.at("mean"));
      if (row.at("pairing") == "rr") rr_cent = std::stod(row.at("mean"));
    }
  }
  CHECK(pn_cent == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(rr_cent) < 3.0 / std::sqrt(static_cast<double>(pairs)));

  // manifest records artifacts and call counts
  const json manifest =
      json::parse(slurp(tmp.path / "out" / "manifest.json"));
  CHECK(manifest.at("experiment") == "correlation");
  CHECK(manifest.at("sampler_calls") == 4 * pairs);
  CHECK(manifest.at("artifacts").size() >= 3);
}

TEST_CASE("correlation run: mixture PN well below RR") {
  TempDir tmp("corrmix");
  json cfg{{"schema_version", 1},
           {"experiment", "correlation"},
           {"seed", 3},
           {"model", mixture_model()},
           {"pairs", 200}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("correlation", opt);
  const auto rows =
      read_csv(tmp.path / "out" / "tables" / "correlation_summary.csv");
  std::map<std::string, std::pair<double, double>> stats;  // mean, sd
  for (const auto& row : rows) {
    stats[row.at("pairing") + "/" + row.at("metric")] = {
        std::stod(row.at("mean")), std::stod(row.at("sd"))};
  }
  const auto [pn_mean, pn_sd] = stats.at("pn/centralized");
  const auto [rr_mean, rr_sd] = stats.at("rr/centralized");
  const double pooled_se =
      std::sqrt((pn_sd * pn_sd + rr_sd * rr_sd) / 200.0);
  CHECK(pn_mean < rr_mean - 5.0 * pooled_se);

  // the Welch test flags the separation
  const auto tests =
      read_csv(tmp.path / "out" / "tables" / "correlation_tests.csv");
  for (const auto& row : tests) {
    REQUIRE(std::stod(row.at("p_value")) < 1e-6);
  }
}

TEST_CASE("correlation run with the stochastic sampler") {
  TempDir tmp("corrddpm");
  json model = mixture_model();
  model["sampler"] = "ddpm";
  json cfg{{"schema_version", 1},
           {"experiment", "correlation"},
           {"seed", 9},
           {"model", model},
           {"pairs", 64}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("correlation", opt);
  const auto rows =
      read_csv(tmp.path / "out" / "tables" / "correlation_summary.csv");
  for (const auto& row : rows) {
    if (row.at("pairing") == "pn" && row.at("metric") == "centralized") {
      CHECK(std::stod(row.at("mean")) < -0.5);
    }
  }
}

TEST_CASE("uq run: budgets, efficiency table, zero-width sentinel") {
  TempDir tmp("uq");
  json cfg{{"schema_version", 1},
           {"experiment", "uq"},
           {"seed", 21},
           {"model", linear_model()},
           {"budget",
            {{"total", 128}, {"rqmc", {{"replicates", 8}, {"points", 16}}}}},
           {"methods", {"mc", "amc_k2", "amc_k8", "rqmc"}},
           {"statistics", {"mean_pixel", "contrast"}}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("uq", opt);

  const auto rows = read_csv(tmp.path / "out" / "tables" / "uq.csv");
  REQUIRE(rows.size() == 8);  // 2 statistics x 4 methods
  for (const auto& row : rows) {
    if (row.at("method") == "mc") {
      REQUIRE(std::stod(row.at("efficiency")) == doctest::Approx(1.0));
    }
    if (row.at("method") == "amc_k2") {
      // antithetic cancellation for a linear map: width zero up to float
      // summation order, efficiency at (or numerically near) the sentinel
      REQUIRE(std::stod(row.at("ci_width")) < 1e-10);
      const bool sentinel = row.at("efficiency") == "inf" ||
                            std::stod(row.at("efficiency")) > 1e10;
      REQUIRE(sentinel);
    }
  }

  // every method consumed exactly the same number of sampler calls
  const json manifest = json::parse(slurp(tmp.path / "out" / "manifest.json"));
  const json& calls = manifest.at("call_counts");
  for (const auto& m : {"mc", "amc_k2", "amc_k8", "rqmc"}) {
    REQUIRE(calls.at(m) == 128);
  }

  // budget mismatch rejected
  json bad = cfg;
  bad["budget"]["rqmc"]["points"] = 32;
  RunOptions bad_opt{write_config(tmp.path, bad, "bad.json").string(),
                     (tmp.path / "out_bad").string()};
  CHECK_THROWS_AS(run_experiment("uq", bad_opt), ConfigError);

  // methods without the mc baseline rejected
  json nomc = cfg;
  nomc["methods"] = {"amc_k2"};
  RunOptions nomc_opt{write_config(tmp.path, nomc, "nomc.json").string(),
                      (tmp.path / "out_nomc").string()};
  CHECK_THROWS_AS(run_experiment("uq", nomc_opt), ConfigError);
}

TEST_CASE("uq run: mixture model AMC beats MC on mean_pixel") {
  TempDir tmp("uqmix");
  json cfg{{"schema_version", 1},
           {"experiment", "uq"},
           {"seed", 23},
           {"model", mixture_model()},
           {"budget", {{"total", 512}}},
           {"methods", {"mc", "amc_k2"}},
           {"statistics", {"mean_pixel", "brightness"}}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("uq", opt);
  const auto rows = read_csv(tmp.path / "out" / "tables" / "uq.csv");
  for (const auto& row : rows) {
    if (row.at("method") == "amc_k2" && row.at("statistic") == "mean_pixel") {
      CHECK(std::stod(row.at("efficiency")) > 1.0);
    }
  }
}

TEST_CASE("qmc-tradeoff run accepts the published splits, rejects R=1") {
  TempDir tmp("qmct");
  json cfg{{"schema_version", 1},
           {"experiment", "qmc-tradeoff"},
           {"seed", 31},
           {"model", mixture_model()},
           {"total", 3200},
           {"splits",
            {{{"replicates", 25}, {"points", 128}},
             {{"replicates", 50}, {"points", 64}},
             {{"replicates", 200}, {"points", 16}}}},
           {"statistics", {"mean_pixel"}}};
  // shrink the budget so the test stays fast but keep the split shapes
  cfg["total"] = 256;
  cfg["splits"] = {{{"replicates", 4}, {"points", 64}},
                   {{"replicates", 16}, {"points", 16}},
                   {{"replicates", 64}, {"points", 4}}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("qmc-tradeoff", opt);
  const auto rows =
      read_csv(tmp.path / "out" / "tables" / "qmc_tradeoff.csv");
  REQUIRE(rows.size() == 4);  // mc row + three splits
  for (const auto& row : rows) {
    REQUIRE(std::stod(row.at("ci_width")) >= 0.0);
    REQUIRE(std::isfinite(std::stod(row.at("ci_width"))));
  }

  json bad = cfg;
  bad["splits"] = {{{"replicates", 1}, {"points", 256}}};
  RunOptions bad_opt{write_config(tmp.path, bad, "bad.json").string(),
                     (tmp.path / "outb").string()};
  CHECK_THROWS_AS(run_experiment("qmc-tradeoff", bad_opt), ConfigError);
}

TEST_CASE("symmetry run: AS column near 1 for a symmetric mixture") {
  TempDir tmp("sym");
  json model{{"dim", 6},
             {"schedule", {{"type", "linear_beta"},
                           {"steps", 8},
                           {"beta_min", 0.01},
                           {"beta_max", 0.2}}},
             {"mixture",
              {{"components",
                {{{"weight", 0.5}, {"sigma", 0.5}, {"mean", {{"fill", 0.7}}}},
                 {{"weight", 0.5},
                  {"sigma", 0.5},
                  {"mean", {{"fill", -0.7}}}}}}}}};
  json cfg{{"schema_version", 1},
           {"experiment", "symmetry"},
           {"seed", 41},
           {"model", model},
           {"slice", {{"t_values", {1, 4, 8}}, {"coords", {0, 3}}}},
           {"temporal",
            {{"pairs", 32}, {"export_trajectories", 2}, {"record_eps", false}}},
           {"center", {{"probes", 16}}}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("symmetry", opt);

  const auto as_rows =
      read_csv(tmp.path / "out" / "tables" / "antisymmetry_scores.csv");
  REQUIRE(as_rows.size() == 6);
  for (const auto& row : as_rows) {
    REQUIRE(std::stod(row.at("as_score")) >= 1.0 - 1e-8);
  }
  const auto centers =
      read_csv(tmp.path / "out" / "tables" / "symmetry_centers.csv");
  for (const auto& row : centers) {
    REQUIRE(std::abs(std::stod(row.at("center"))) < 1e-12);
  }
  CHECK(fs::exists(tmp.path / "out" / "plotdata" /
                   "temporal_correlation.csv"));
}

TEST_CASE("ou run: FI column matches the closed form for N(m,1)") {
  TempDir tmp("ou");
  json cfg{{"schema_version", 1},
           {"experiment", "ou"},
           {"seed", 51},
           {"mixture",
            {{"components",
              {{{"weight", 1.0}, {"mean", 2.0}, {"sigma", 1.0}}}}}},
           {"t_grid", {0.1, 0.5, 1.0, 1.5, 2.0}},
           {"max_degree", 8},
           {"quadrature_order", 48}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("ou", opt);
  const auto rows = read_csv(tmp.path / "out" / "plotdata" / "decay.csv");
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    const double t = std::stod(row.at("t"));
    const double fi = std::stod(row.at("fisher_information"));
    REQUIRE(fi == doctest::Approx(4.0 * std::exp(-2.0 * t)).epsilon(1e-6));
  }
  // variance >= 2 rejected (density ratio leaves L^2)
  json bad = cfg;
  bad["mixture"]["components"][0]["sigma"] = 1.5;
  RunOptions bad_opt{write_config(tmp.path, bad, "bad.json").string(),
                     (tmp.path / "outb").string()};
  CHECK_THROWS_AS(run_experiment("ou", bad_opt), ConfigError);
}

TEST_CASE("fkg run: no violations, condition table, summary json") {
  TempDir tmp("fkg");
  json model{{"dim", 2},
             {"schedule", {{"type", "linear_beta"},
                           {"steps", 6},
                           {"beta_min", 0.02},
                           {"beta_max", 0.2}}},
             {"mixture",
              {{"components",
                {{{"weight", 1.0}, {"sigma", 1.0}, {"mean", {{"fill", 0.0}}}}}}}}};
  json cfg{{"schema_version", 1},
           {"experiment", "fkg"},
           {"seed", 61},
           {"chains", {{"count", 20}, {"samples", 4000}}},
           {"ddim_check", {{"model", model}, {"probes", 64}}},
           {"step_sweep", {4, 8}}};
  RunOptions opt{write_config(tmp.path, cfg).string(),
                 (tmp.path / "out").string()};
  run_experiment("fkg", opt);

  const auto chains = read_csv(tmp.path / "out" / "tables" / "fkg_chains.csv");
  REQUIRE(chains.size() == 20);
  for (const auto& row : chains) REQUIRE(row.at("violates") == "0");

  const json summary =
      json::parse(slurp(tmp.path / "out" / "tables" / "fkg_summary.json"));
  CHECK(summary.at("chain_violations") == 0);
  CHECK(summary.at("condition_holds_everywhere") == true);
  CHECK(summary.at("min_composed_jacobian_entry").get<double>() >= -1e-8);

  const auto sweep =
      read_csv(tmp.path / "out" / "tables" / "fkg_step_sweep.csv");
  REQUIRE(sweep.size() == 2);
  for (const auto& row : sweep) REQUIRE(row.at("condition_holds_all") == "1");
}

TEST_CASE("determinism: identical runs produce identical output trees") {
  TempDir tmp("det");
  json cfg{{"schema_version", 1},
           {"experiment", "correlation"},
           {"seed", 77},
           {"model", mixture_model()},
           {"pairs", 32}};
  const fs::path cfg_path = write_config(tmp.path, cfg);
  run_experiment("correlation",
                 RunOptions{cfg_path.string(), (tmp.path / "a").string()});
  run_experiment("correlation",
                 RunOptions{cfg_path.string(), (tmp.path / "b").string()});
  require_identical_trees(tmp.path / "a", tmp.path / "b");

  // thread count must not change the bytes either
  RunOptions threaded{cfg_path.string(), (tmp.path / "c").string()};
  threaded.threads = 3;
  run_experiment("correlation", threaded);
  require_identical_trees(tmp.path / "a", tmp.path / "c");

  // a different seed changes them
  RunOptions reseeded{cfg_path.string(), (tmp.path / "d").string()};
  reseeded.seed_override = 78;
  run_experiment("correlation", reseeded);
  CHECK(slurp(tmp.path / "a" / "tables" / "correlation_summary.csv") !=
        slurp(tmp.path / "d" / "tables" / "correlation_summary.csv"));
}

#ifdef NOISELAB_CLI_PATH
TEST_CASE("cli exit codes: 0 success, 2 config error, 3 numerical failure") {
  TempDir tmp("cli");
  json cfg{{"schema_version", 1},
           {"experiment", "correlation"},
           {"seed", 5},
           {"model", linear_model()},
           {"pairs", 8}};
  const fs::path good = write_config(tmp.path, cfg, "good.json");

  auto run_cli = [&](const std::string& args) {
    const std::string cmd = std::string(NOISELAB_CLI_PATH) + " " + args +
                            " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run_cli("correlation --config " + good.string() + " --out " +
                (tmp.path / "o1").string()) == 0);

  json bad = cfg;
  bad["pairs"] = 1;  // fails validation
  const fs::path badp = write_config(tmp.path, bad, "bad.json");
  CHECK(run_cli("correlation --config " + badp.string() + " --out " +
                (tmp.path / "o2").string()) == 2);

  // statistic undefined at runtime: centroid of an all-black image model
  json dark = cfg;
  dark["experiment"] = "uq";
  dark["model"]["mixture"]["components"][0]["mean"] = {{"fill", -40.0}};
  dark["model"]["mixture"]["components"][0]["sigma"] = 0.01;
  dark["budget"] = {{"total", 16}};
  dark["methods"] = {"mc"};
  dark["statistics"] = {"centroid_row"};
  dark.erase("pairs");
  const fs::path darkp = write_config(tmp.path, dark, "dark.json");
  CHECK(run_cli("uq --config " + darkp.string() + " --out " +
                (tmp.path / "o3").string()) == 3);
}
#endif
