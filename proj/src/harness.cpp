#include "noiselab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "noiselab/checksum.hpp"
#include "noiselab/csv.hpp"
#include "noiselab/estimators.hpp"
#include "noiselab/fkg.hpp"
#include "noiselab/hermite.hpp"
#include "noiselab/image_stats.hpp"
#include "noiselab/mixture.hpp"
#include "noiselab/noise.hpp"
#include "noiselab/ou.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/quantiles.hpp"
#include "noiselab/sampler.hpp"
#include "noiselab/schedule.hpp"
#include "noiselab/sobol.hpp"
#include "noiselab/symmetry.hpp"

namespace noiselab::harness {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Stable stream roles; work items derive their streams from (role, index)
// so results never depend on scheduling order.
constexpr std::uint64_t kRolePn = 1;
constexpr std::uint64_t kRoleRr = 2;
constexpr std::uint64_t kRoleStep = 3;
constexpr std::uint64_t kRoleMc = 4;
constexpr std::uint64_t kRoleAmc2 = 5;
constexpr std::uint64_t kRoleAmc8 = 6;
constexpr std::uint64_t kRoleRqmc = 7;
constexpr std::uint64_t kRoleAnchor = 8;
constexpr std::uint64_t kRoleTemporal = 9;
constexpr std::uint64_t kRoleCenter = 10;
constexpr std::uint64_t kRoleChain = 11;
constexpr std::uint64_t kRoleProbe = 12;

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw ConfigError(ctx + ": " + msg);
}

void check_keys(const json& obj, const std::string& ctx,
                const std::set<std::string>& required,
                const std::set<std::string>& optional) {
  if (!obj.is_object()) fail(ctx, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!required.count(key) && !optional.count(key)) {
      fail(ctx, "unknown key '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(ctx, "missing key '" + key + "'");
  }
}

double get_num(const json& obj, const std::string& ctx, const char* key) {
  if (!obj.at(key).is_number()) fail(ctx, std::string(key) + " must be a number");
  return obj.at(key).get<double>();
}

std::int64_t get_int(const json& obj, const std::string& ctx, const char* key) {
  if (!obj.at(key).is_number_integer()) {
    fail(ctx, std::string(key) + " must be an integer");
  }
  return obj.at(key).get<std::int64_t>();
}

// ---------------------------------------------------------------------------
// model parsing

struct ScheduleSpec {
  int steps = 0;
  double beta_min = 0.0;
  double beta_max = 0.0;

  Schedule build(int override_steps = 0) const {
    return linear_beta_schedule(override_steps > 0 ? override_steps : steps,
                                beta_min, beta_max);
  }
};

struct ModelSpec {
  bool has_shape = false;
  int C = 0, H = 0, W = 0;
  int d = 0;
  ScheduleSpec schedule_spec;
  Schedule schedule;
  MixtureParams mixture;
  std::string sampler = "ddim";
};

std::vector<double> parse_mean_pattern(const json& j, const std::string& ctx,
                                       const ModelSpec& model) {
  check_keys(j, ctx, {}, {"fill", "values", "ramp", "rows_ramp",
                          "top_bottom", "alternating"});
  if (j.size() != 1) fail(ctx, "mean pattern needs exactly one key");
  const int d = model.d;
  std::vector<double> mean(d, 0.0);
  if (j.contains("fill")) {
    std::fill(mean.begin(), mean.end(), j["fill"].get<double>());
  } else if (j.contains("values")) {
    auto vals = j["values"].get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != d) {
      fail(ctx, "values length must equal the model dimension");
    }
    mean = vals;
  } else if (j.contains("ramp")) {
    auto ab = j["ramp"].get<std::vector<double>>();
    if (ab.size() != 2) fail(ctx, "ramp needs [from, to]");
    for (int i = 0; i < d; ++i) {
      mean[i] = d == 1 ? ab[0] : ab[0] + (ab[1] - ab[0]) * i / (d - 1);
    }
  } else if (j.contains("alternating")) {
    auto ab = j["alternating"].get<std::vector<double>>();
    if (ab.size() != 2) fail(ctx, "alternating needs [even, odd]");
    for (int i = 0; i < d; ++i) mean[i] = (i % 2 == 0) ? ab[0] : ab[1];
  } else if (j.contains("rows_ramp") || j.contains("top_bottom")) {
    if (!model.has_shape) fail(ctx, "pattern requires an image shape");
    if (j.contains("rows_ramp")) {
      auto ab = j["rows_ramp"].get<std::vector<double>>();
      if (ab.size() != 2) fail(ctx, "rows_ramp needs [from, to]");
      for (int c = 0; c < model.C; ++c) {
        for (int i = 0; i < model.H; ++i) {
          const double v = model.H == 1
                               ? ab[0]
                               : ab[0] + (ab[1] - ab[0]) * i / (model.H - 1);
          for (int w = 0; w < model.W; ++w) {
            mean[(static_cast<std::size_t>(c) * model.H + i) * model.W + w] = v;
          }
        }
      }
    } else {
      auto ab = j["top_bottom"].get<std::vector<double>>();
      if (ab.size() != 2) fail(ctx, "top_bottom needs [top, bottom]");
      for (int c = 0; c < model.C; ++c) {
        for (int i = 0; i < model.H; ++i) {
          const double v = i < model.H / 2 ? ab[0] : ab[1];
          for (int w = 0; w < model.W; ++w) {
            mean[(static_cast<std::size_t>(c) * model.H + i) * model.W + w] = v;
          }
        }
      }
    }
  }
  return mean;
}

ModelSpec parse_model(const json& j, const std::string& ctx, bool need_shape) {
  check_keys(j, ctx, {"schedule", "mixture"}, {"shape", "dim", "sampler"});
  ModelSpec model;
  if (j.contains("shape") == j.contains("dim")) {
    fail(ctx, "exactly one of 'shape' and 'dim' is required");
  }
  if (j.contains("shape")) {
    auto shape = j["shape"].get<std::vector<int>>();
    if (shape.size() != 3 || shape[0] < 1 || shape[1] < 1 || shape[2] < 1) {
      fail(ctx, "shape must be [C, H, W] with positive entries");
    }
    model.has_shape = true;
    model.C = shape[0];
    model.H = shape[1];
    model.W = shape[2];
    model.d = shape[0] * shape[1] * shape[2];
  } else {
    if (need_shape) fail(ctx, "this experiment requires an image shape");
    model.d = static_cast<int>(get_int(j, ctx, "dim"));
    if (model.d < 1) fail(ctx, "dim must be positive");
  }

  const json& sj = j["schedule"];
  check_keys(sj, ctx + ".schedule", {"type", "steps", "beta_min", "beta_max"},
             {});
  if (sj["type"].get<std::string>() != "linear_beta") {
    fail(ctx + ".schedule", "unsupported type (expected 'linear_beta')");
  }
  model.schedule_spec.steps = static_cast<int>(get_int(sj, ctx, "steps"));
  model.schedule_spec.beta_min = get_num(sj, ctx, "beta_min");
  model.schedule_spec.beta_max = get_num(sj, ctx, "beta_max");
  try {
    model.schedule = model.schedule_spec.build();
  } catch (const std::invalid_argument& e) {
    fail(ctx + ".schedule", e.what());
  }

  const json& mj = j["mixture"];
  check_keys(mj, ctx + ".mixture", {"components"}, {});
  if (!mj["components"].is_array() || mj["components"].empty()) {
    fail(ctx + ".mixture", "components must be a nonempty array");
  }
  model.mixture.d = model.d;
  for (std::size_t k = 0; k < mj["components"].size(); ++k) {
    const json& cj = mj["components"][k];
    const std::string cctx = ctx + ".mixture.components[" + std::to_string(k) + "]";
    check_keys(cj, cctx, {"weight", "sigma", "mean"}, {});
    model.mixture.weights.push_back(get_num(cj, cctx, "weight"));
    const double sigma = get_num(cj, cctx, "sigma");
    model.mixture.sigma2.push_back(sigma * sigma);
    auto mean = parse_mean_pattern(cj["mean"], cctx + ".mean", model);
    model.mixture.means.insert(model.mixture.means.end(), mean.begin(),
                               mean.end());
  }
  try {
    model.mixture.validate();
  } catch (const std::invalid_argument& e) {
    fail(ctx + ".mixture", e.what());
  }

  if (j.contains("sampler")) {
    model.sampler = j["sampler"].get<std::string>();
    if (model.sampler != "ddim" && model.sampler != "ddpm") {
      fail(ctx, "sampler must be 'ddim' or 'ddpm'");
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// statistics over generated states

ImageTensor image_from_output(std::span<const double> y, const ModelSpec& m) {
  ImageTensor img(m.C, m.H, m.W);
  for (std::size_t i = 0; i < y.size(); ++i) {
    img.v[i] = std::clamp(0.5 * (y[i] + 1.0), 0.0, 1.0);
  }
  return img;
}

const std::set<std::string> kStatisticNames = {"mean_pixel", "brightness",
                                               "contrast", "centroid_row"};

double eval_statistic(const std::string& name, const ImageTensor& img) {
  if (name == "mean_pixel") return mean_pixel(img);
  if (name == "brightness") return brightness(img);
  if (name == "contrast") return contrast(img);
  return centroid_row(img);
}

std::vector<std::string> parse_statistics(const json& j,
                                          const std::string& ctx,
                                          const ModelSpec& model) {
  auto stats = j.get<std::vector<std::string>>();
  if (stats.empty()) fail(ctx, "statistics must be nonempty");
  for (const auto& s : stats) {
    if (!kStatisticNames.count(s)) fail(ctx, "unknown statistic '" + s + "'");
    if (s == "brightness" && model.C != 3) {
      fail(ctx, "brightness requires a 3-channel shape");
    }
    if (s == "contrast" && model.H < 2) fail(ctx, "contrast requires H >= 2");
  }
  return stats;
}

// ---------------------------------------------------------------------------
// run context

struct RunContext {
  json config;
  std::uint64_t seed = 0;
  fs::path out;
  ExecPolicy policy = ExecPolicy::openmp;
  std::int64_t sampler_calls = 0;
  json call_breakdown = json::object();

  RngStream base() const { return RngStream{seed, 0}; }

  fs::path tables() const { return out / "tables"; }
  fs::path plotdata() const { return out / "plotdata"; }

  void write_manifest(const std::string& kind) {
    json manifest;
    manifest["schema_version"] = 1;
    manifest["experiment"] = kind;
    manifest["seed"] = seed;
    manifest["config_hash"] = checksum_hex(fnv1a64(config.dump()));
    manifest["sampler_calls"] = sampler_calls;
    if (!call_breakdown.empty()) manifest["call_counts"] = call_breakdown;

    json artifacts = json::object();
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      artifacts[fs::relative(f, out).generic_string()] =
          file_checksum(f.string());
    }
    manifest["artifacts"] = artifacts;

    std::ofstream f(out / "manifest.json");
    f << manifest.dump(2) << "\n";
  }
};

// Generates the model outputs for a batch of initial noises and returns the
// flattened y_0 rows. DDPM pairs use one step stream per pair.
std::vector<double> generate_outputs(RunContext& ctx, const ModelSpec& model,
                                     const MixtureScoreField& field,
                                     const NoiseBatch& batch,
                                     RngStream step_role, bool paired_ddpm) {
  ctx.sampler_calls += batch.n;
  if (model.sampler == "ddim") {
    return ddim_output_batch(field, model.schedule, batch, ctx.policy);
  }
  const int d = model.d;
  std::vector<double> out(static_cast<std::size_t>(batch.n) * d);
  std::vector<std::string> errors(static_cast<std::size_t>(batch.n));
  parallel_for(static_cast<std::size_t>(batch.n), ctx.policy,
               [&](std::size_t i) {
                 try {
                   const std::int64_t pair = paired_ddpm ? i / 2 : i;
                   const bool negate = paired_ddpm && (i % 2 == 1);
                   // Paired rows hold (z, -z); hand the sampler the positive
                   // member and let negate_all flip both init and step noise.
                   auto row = batch.row(negate ? static_cast<std::int64_t>(i) - 1
                                               : static_cast<std::int64_t>(i));
                   Trajectory traj = ddpm_sample(
                       field, model.schedule, row,
                       step_role.child(static_cast<std::uint64_t>(pair)),
                       negate, 1.0, false);
                   auto y0 = traj.output();
                   std::copy(y0.begin(), y0.end(), out.begin() + i * d);
                 } catch (const std::exception& e) {
                   errors[i] = e.what();
                 }
               });
  for (const auto& msg : errors) {
    if (!msg.empty()) throw NumericalError(msg);
  }
  return out;
}

double two_sided_t_pvalue(double t, double nu) {
  return inc_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

struct Moments {
  double mean = 0.0, sd = 0.0;
  std::size_t n = 0;
};

Moments moments(std::span<const double> v) {
  Moments m;
  m.n = v.size();
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  double s = 0.0;
  for (double x : v) s += (x - m.mean) * (x - m.mean);
  m.sd = m.n > 1 ? std::sqrt(s / static_cast<double>(m.n - 1)) : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// correlation experiment

void run_correlation(RunContext& ctx) {
  const std::string t = "config";
  check_keys(ctx.config, t,
             {"schema_version", "experiment", "seed", "model", "pairs"},
             {"threads", "histogram_bins"});
  ModelSpec model = parse_model(ctx.config["model"], t + ".model", true);
  const std::int64_t pairs = get_int(ctx.config, t, "pairs");
  if (pairs < 2) fail(t, "pairs must be >= 2");
  const int bins = ctx.config.contains("histogram_bins")
                       ? static_cast<int>(get_int(ctx.config, t, "histogram_bins"))
                       : 40;
  if (bins < 1) fail(t, "histogram_bins must be positive");

  const MixtureScoreField field(model.mixture, model.schedule);

  auto flatten_images = [&](const std::vector<double>& outputs,
                            std::int64_t count) {
    std::vector<std::vector<double>> images(count);
    for (std::int64_t i = 0; i < count; ++i) {
      images[i] = image_from_output(
                      {outputs.data() + i * model.d,
                       static_cast<std::size_t>(model.d)},
                      model)
                      .v;
    }
    return images;
  };

  // PN: antithetic pairs; RR: fresh independent draws.
  NoiseBatch pn_base = gaussian_batch(ctx.base().child(kRolePn), pairs, model.d);
  NoiseBatch pn = antithetic_expand(pn_base);
  auto pn_out = generate_outputs(ctx, model, field, pn,
                                 ctx.base().child(kRoleStep).child(1), true);
  auto pn_images = flatten_images(pn_out, 2 * pairs);

  NoiseBatch rr = gaussian_batch(ctx.base().child(kRoleRr), 2 * pairs, model.d);
  auto rr_out = generate_outputs(ctx, model, field, rr,
                                 ctx.base().child(kRoleStep).child(2), false);
  auto rr_images = flatten_images(rr_out, 2 * pairs);

  auto pairwise = [&](const std::vector<std::vector<double>>& images) {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> ps;
    ps.reserve(pairs);
    for (std::int64_t i = 0; i < pairs; ++i) {
      ps.emplace_back(images[2 * i], images[2 * i + 1]);
    }
    std::vector<double> standard(pairs);
    for (std::int64_t i = 0; i < pairs; ++i) {
      standard[i] = pearson_standard(ps[i].first, ps[i].second);
    }
    std::vector<double> central = pearson_centralized(ps);
    return std::make_pair(standard, central);
  };
  auto [pn_std, pn_cent] = pairwise(pn_images);
  auto [rr_std, rr_cent] = pairwise(rr_images);

  fs::create_directories(ctx.tables());
  fs::create_directories(ctx.plotdata());

  {
    CsvWriter csv((ctx.tables() / "correlation_summary.csv").string(),
                  {"pairing", "metric", "mean", "sd", "pairs"});
    auto row = [&](const char* pairing, const char* metric,
                   std::span<const double> v) {
      const Moments m = moments(v);
      csv.write_row({pairing, metric, csv_num(m.mean), csv_num(m.sd),
                     csv_num(static_cast<std::int64_t>(m.n))});
    };
    row("pn", "standard", pn_std);
    row("pn", "centralized", pn_cent);
    row("rr", "standard", rr_std);
    row("rr", "centralized", rr_cent);
  }
  {
    // Welch test on the mean correlation difference, PN vs RR.
    CsvWriter csv((ctx.tables() / "correlation_tests.csv").string(),
                  {"metric", "welch_t", "p_value"});
    auto row = [&](const char* metric, std::span<const double> a,
                   std::span<const double> b) {
      const Moments ma = moments(a), mb = moments(b);
      const double va = ma.sd * ma.sd / static_cast<double>(ma.n);
      const double vb = mb.sd * mb.sd / static_cast<double>(mb.n);
      const double tstat = (ma.mean - mb.mean) / std::sqrt(va + vb);
      const double nu = (va + vb) * (va + vb) /
                        (va * va / (static_cast<double>(ma.n) - 1) +
                         vb * vb / (static_cast<double>(mb.n) - 1));
      csv.write_row({metric, csv_num(tstat),
                     csv_num(two_sided_t_pvalue(std::abs(tstat), nu))});
    };
    row("standard", pn_std, rr_std);
    row("centralized", pn_cent, rr_cent);
  }
  {
    CsvWriter csv((ctx.plotdata() / "correlation_hist.csv").string(),
                  {"metric", "pairing", "bin_lo", "bin_hi", "count"});
    auto hist = [&](const char* metric, const char* pairing,
                    std::span<const double> v) {
      std::vector<std::int64_t> counts(bins, 0);
      for (double x : v) {
        int idx = static_cast<int>((x + 1.0) / 2.0 * bins);
        idx = std::clamp(idx, 0, bins - 1);
        ++counts[idx];
      }
      for (int b = 0; b < bins; ++b) {
        csv.write_row({metric, pairing, csv_num(-1.0 + 2.0 * b / bins),
                       csv_num(-1.0 + 2.0 * (b + 1) / bins),
                       csv_num(counts[b])});
      }
    };
    hist("standard", "pn", pn_std);
    hist("standard", "rr", rr_std);
    hist("centralized", "pn", pn_cent);
    hist("centralized", "rr", rr_cent);
  }
  ctx.write_manifest("correlation");
}

// ---------------------------------------------------------------------------
// uncertainty-quantification experiment

void run_uq(RunContext& ctx) {
  const std::string t = "config";
  check_keys(ctx.config, t,
             {"schema_version", "experiment", "seed", "model", "budget",
              "methods", "statistics"},
             {"threads", "alpha"});
  ModelSpec model = parse_model(ctx.config["model"], t + ".model", true);
  auto stats = parse_statistics(ctx.config["statistics"], t + ".statistics",
                                model);
  const double alpha =
      ctx.config.contains("alpha") ? get_num(ctx.config, t, "alpha") : 0.05;

  auto methods = ctx.config["methods"].get<std::vector<std::string>>();
  const std::set<std::string> allowed = {"mc", "amc_k2", "amc_k8", "rqmc"};
  for (const auto& m : methods) {
    if (!allowed.count(m)) fail(t + ".methods", "unknown method '" + m + "'");
  }
  if (std::find(methods.begin(), methods.end(), "mc") == methods.end()) {
    fail(t + ".methods", "'mc' baseline is required");
  }

  const json& bj = ctx.config["budget"];
  check_keys(bj, t + ".budget", {"total"}, {"rqmc"});
  const std::int64_t total = get_int(bj, t + ".budget", "total");
  if (total < 2) fail(t + ".budget", "total must be >= 2");

  std::int64_t R = 0, npts = 0;
  const bool want_rqmc =
      std::find(methods.begin(), methods.end(), "rqmc") != methods.end();
  if (want_rqmc) {
    if (!bj.contains("rqmc")) fail(t + ".budget", "rqmc split required");
    const json& qj = bj["rqmc"];
    check_keys(qj, t + ".budget.rqmc", {"replicates", "points"}, {});
    R = get_int(qj, t + ".budget.rqmc", "replicates");
    npts = get_int(qj, t + ".budget.rqmc", "points");
    if (R < 2) fail(t + ".budget.rqmc", "replicates must be >= 2");
    if (npts < 1 || (npts & (npts - 1)) != 0) {
      fail(t + ".budget.rqmc", "points must be a power of two");
    }
    if (R * npts != total) {
      fail(t + ".budget.rqmc", "replicates * points must equal total");
    }
    if (model.d > sobol_max_dimension()) {
      fail(t + ".budget.rqmc", "model dimension exceeds the Sobol' table");
    }
  }
  for (const auto& m : methods) {
    if (m == "amc_k2" && total % 2 != 0) fail(t, "total must be even for amc_k2");
    if (m == "amc_k8" && total % 8 != 0) {
      fail(t, "total must be divisible by 8 for amc_k8");
    }
  }
  if (model.sampler != "ddim") fail(t + ".model", "uq requires the ddim sampler");

  const MixtureScoreField field(model.mixture, model.schedule);

  auto stat_values = [&](const std::vector<double>& outputs,
                         std::int64_t count) {
    std::map<std::string, std::vector<double>> values;
    for (const auto& s : stats) values[s].resize(count);
    for (std::int64_t i = 0; i < count; ++i) {
      const ImageTensor img = image_from_output(
          {outputs.data() + i * model.d, static_cast<std::size_t>(model.d)},
          model);
      for (const auto& s : stats) values[s][i] = eval_statistic(s, img);
    }
    return values;
  };

  std::map<std::string, std::map<std::string, EstimatorReport>> reports;

  {  // plain Monte Carlo
    NoiseBatch b = gaussian_batch(ctx.base().child(kRoleMc), total, model.d);
    ctx.sampler_calls += b.n;
    ctx.call_breakdown["mc"] = b.n;
    auto out = ddim_output_batch(field, model.schedule, b, ctx.policy);
    auto values = stat_values(out, total);
    for (const auto& s : stats) {
      reports[s]["mc"] = mc_estimate(values[s], alpha);
    }
  }
  for (const auto& method : methods) {
    if (method == "amc_k2") {
      NoiseBatch base =
          gaussian_batch(ctx.base().child(kRoleAmc2), total / 2, model.d);
      NoiseBatch b = antithetic_expand(base);
      ctx.sampler_calls += b.n;
      ctx.call_breakdown["amc_k2"] = b.n;
      auto out = ddim_output_batch(field, model.schedule, b, ctx.policy);
      auto values = stat_values(out, total);
      for (const auto& s : stats) {
        std::vector<std::pair<double, double>> pairs(total / 2);
        for (std::int64_t i = 0; i < total / 2; ++i) {
          pairs[i] = {values[s][2 * i], values[s][2 * i + 1]};
        }
        reports[s]["amc_k2"] = amc_estimate(pairs, alpha);
      }
    } else if (method == "amc_k8") {
      NoiseBatch b =
          k_antithetic_batch(ctx.base().child(kRoleAmc8), 8, model.d, total / 8);
      ctx.sampler_calls += b.n;
      ctx.call_breakdown["amc_k8"] = b.n;
      auto out = ddim_output_batch(field, model.schedule, b, ctx.policy);
      auto values = stat_values(out, total);
      for (const auto& s : stats) {
        std::vector<std::vector<double>> blocks(total / 8,
                                                std::vector<double>(8));
        for (std::int64_t i = 0; i < total; ++i) blocks[i / 8][i % 8] = values[s][i];
        reports[s]["amc_k8"] = k_antithetic_estimate(blocks, alpha);
      }
    } else if (method == "rqmc") {
      const SobolSet raw = sobol_points(model.d, npts);
      std::map<std::string, std::vector<double>> rep_means;
      for (const auto& s : stats) rep_means[s].resize(R);
      for (std::int64_t r = 0; r < R; ++r) {
        const std::uint64_t seed_r =
            ctx.base().child(kRoleRqmc).child(static_cast<std::uint64_t>(r))
                .stream_id;
        SobolSet scrambled = randomize(raw, Randomization::owen_scramble, seed_r);
        NoiseBatch b = to_gaussian(scrambled);
        ctx.sampler_calls += b.n;
        auto out = ddim_output_batch(field, model.schedule, b, ctx.policy);
        auto values = stat_values(out, npts);
        for (const auto& s : stats) {
          double m = 0.0;
          for (double v : values[s]) m += v;
          rep_means[s][r] = m / static_cast<double>(npts);
        }
      }
      ctx.call_breakdown["rqmc"] = R * npts;
      for (const auto& s : stats) {
        reports[s]["rqmc"] = rqmc_estimate(rep_means[s], alpha);
      }
    }
  }

  fs::create_directories(ctx.tables());
  CsvWriter csv((ctx.tables() / "uq.csv").string(),
                {"statistic", "method", "estimate", "ci_lo", "ci_hi",
                 "ci_width", "efficiency"});
  json jr = json::object();
  for (const auto& s : stats) {
    const EstimatorReport& mc = reports[s]["mc"];
    for (const auto& method : methods) {
      const EstimatorReport& r = reports[s].at(method);
      const double eff = relative_efficiency(mc, r);
      csv.write_row({s, method, csv_num(r.estimate), csv_num(r.ci_lo),
                     csv_num(r.ci_hi), csv_num(r.ci_hi - r.ci_lo),
                     csv_num(eff)});
      jr[s][method] = json::parse(r.to_json());
    }
  }
  std::ofstream jf(ctx.tables() / "uq_reports.json");
  jf << jr.dump(2) << "\n";
  ctx.write_manifest("uq");
}

// ---------------------------------------------------------------------------
// RQMC budget-split experiment

void run_qmc_tradeoff(RunContext& ctx) {
  const std::string t = "config";
  check_keys(ctx.config, t,
             {"schema_version", "experiment", "seed", "model", "total",
              "splits", "statistics"},
             {"threads", "alpha"});
  ModelSpec model = parse_model(ctx.config["model"], t + ".model", true);
  auto stats = parse_statistics(ctx.config["statistics"], t + ".statistics",
                                model);
  const double alpha =
      ctx.config.contains("alpha") ? get_num(ctx.config, t, "alpha") : 0.05;
  const std::int64_t total = get_int(ctx.config, t, "total");
  if (model.d > sobol_max_dimension()) {
    fail(t + ".model", "model dimension exceeds the Sobol' table");
  }
  if (model.sampler != "ddim") fail(t + ".model", "requires the ddim sampler");

  struct Split {
    std::int64_t R, n;
  };
  std::vector<Split> splits;
  if (!ctx.config["splits"].is_array() || ctx.config["splits"].empty()) {
    fail(t + ".splits", "must be a nonempty array");
  }
  for (std::size_t i = 0; i < ctx.config["splits"].size(); ++i) {
    const json& sj = ctx.config["splits"][i];
    const std::string sctx = t + ".splits[" + std::to_string(i) + "]";
    check_keys(sj, sctx, {"replicates", "points"}, {});
    Split s{get_int(sj, sctx, "replicates"), get_int(sj, sctx, "points")};
    if (s.R < 2) fail(sctx, "replicates must be >= 2");
    if (s.n < 1 || (s.n & (s.n - 1)) != 0) {
      fail(sctx, "points must be a power of two");
    }
    if (s.R * s.n != total) fail(sctx, "replicates * points must equal total");
    splits.push_back(s);
  }

  const MixtureScoreField field(model.mixture, model.schedule);

  auto stat_of_output = [&](std::span<const double> y, const std::string& s) {
    return eval_statistic(s, image_from_output(y, model));
  };

  // MC baseline at the same total budget.
  std::map<std::string, EstimatorReport> mc_reports;
  {
    NoiseBatch b = gaussian_batch(ctx.base().child(kRoleMc), total, model.d);
    ctx.sampler_calls += b.n;
    auto out = ddim_output_batch(field, model.schedule, b, ctx.policy);
    for (const auto& s : stats) {
      std::vector<double> values(total);
      for (std::int64_t i = 0; i < total; ++i) {
        values[i] = stat_of_output(
            {out.data() + i * model.d, static_cast<std::size_t>(model.d)}, s);
      }
      mc_reports[s] = mc_estimate(values, alpha);
    }
  }

  fs::create_directories(ctx.tables());
  CsvWriter csv((ctx.tables() / "qmc_tradeoff.csv").string(),
                {"split", "statistic", "ci_width", "efficiency"});
  for (const auto& s : stats) {
    const EstimatorReport& mc = mc_reports[s];
    csv.write_row({"mc", s, csv_num(mc.ci_hi - mc.ci_lo), csv_num(1.0)});
  }
  for (std::size_t si = 0; si < splits.size(); ++si) {
    const Split& sp = splits[si];
    const SobolSet raw = sobol_points(model.d, sp.n);
    std::map<std::string, std::vector<double>> rep_means;
    for (const auto& s : stats) rep_means[s].resize(sp.R);
    for (std::int64_t r = 0; r < sp.R; ++r) {
      const std::uint64_t seed_r = ctx.base()
                                       .child(kRoleRqmc)
                                       .child(si * 1000003ull +
                                              static_cast<std::uint64_t>(r))
                                       .stream_id;
      SobolSet scrambled = randomize(raw, Randomization::owen_scramble, seed_r);
      NoiseBatch b = to_gaussian(scrambled);
      ctx.sampler_calls += b.n;
      auto out = ddim_output_batch(field, model.schedule, b, ctx.policy);
      for (const auto& s : stats) {
        double m = 0.0;
        for (std::int64_t i = 0; i < sp.n; ++i) {
          m += stat_of_output(
              {out.data() + i * model.d, static_cast<std::size_t>(model.d)}, s);
        }
        rep_means[s][r] = m / static_cast<double>(sp.n);
      }
    }
    const std::string label =
        std::to_string(sp.R) + "x" + std::to_string(sp.n);
    for (const auto& s : stats) {
      const EstimatorReport r = rqmc_estimate(rep_means[s], alpha);
      csv.write_row({label, s, csv_num(r.ci_hi - r.ci_lo),
                     csv_num(relative_efficiency(mc_reports[s], r))});
    }
  }
  ctx.write_manifest("qmc-tradeoff");
}

// ---------------------------------------------------------------------------
// symmetry experiment

void run_symmetry(RunContext& ctx) {
  const std::string t = "config";
  check_keys(ctx.config, t,
             {"schema_version", "experiment", "seed", "model", "slice",
              "temporal", "center"},
             {"threads"});
  ModelSpec model = parse_model(ctx.config["model"], t + ".model", false);
  if (model.sampler != "ddim") fail(t + ".model", "requires the ddim sampler");

  const json& sj = ctx.config["slice"];
  check_keys(sj, t + ".slice", {"t_values", "coords"},
             {"grid_size", "anchors"});
  auto t_values = sj["t_values"].get<std::vector<int>>();
  auto coords = sj["coords"].get<std::vector<int>>();
  const int grid_size =
      sj.contains("grid_size") ? static_cast<int>(get_int(sj, t, "grid_size"))
                               : 201;
  const int anchors =
      sj.contains("anchors") ? static_cast<int>(get_int(sj, t, "anchors")) : 1;
  for (int tv : t_values) {
    if (tv < 1 || tv > model.schedule.steps()) {
      fail(t + ".slice", "t value outside [1, T]");
    }
  }
  for (int c : coords) {
    if (c < 0 || c >= model.d) fail(t + ".slice", "coordinate out of range");
  }
  if (anchors < 1) fail(t + ".slice", "anchors must be >= 1");

  const json& tj = ctx.config["temporal"];
  check_keys(tj, t + ".temporal", {"pairs"},
             {"export_trajectories", "record_eps"});
  const std::int64_t pairs = get_int(tj, t + ".temporal", "pairs");
  if (pairs < 2) fail(t + ".temporal", "pairs must be >= 2");
  const std::int64_t export_count =
      tj.contains("export_trajectories")
          ? get_int(tj, t + ".temporal", "export_trajectories")
          : 0;
  if (export_count < 0 || export_count > pairs) {
    fail(t + ".temporal", "export_trajectories must lie in [0, pairs]");
  }
  const bool record_eps =
      tj.contains("record_eps") ? tj["record_eps"].get<bool>() : true;

  const json& cj = ctx.config["center"];
  check_keys(cj, t + ".center", {"probes"}, {});
  const int probes = static_cast<int>(get_int(cj, t + ".center", "probes"));
  if (probes < 1) fail(t + ".center", "probes must be >= 1");

  const MixtureScoreField field(model.mixture, model.schedule);
  fs::create_directories(ctx.tables());
  fs::create_directories(ctx.plotdata());

  {
    CsvWriter as_csv((ctx.tables() / "antisymmetry_scores.csv").string(),
                     {"t", "coord", "anchor", "as_score"});
    std::vector<double> anchor(model.d);
    for (int tv : t_values) {
      for (int c : coords) {
        for (int a = 0; a < anchors; ++a) {
          Rng rng(ctx.base().child(kRoleAnchor).child(
              static_cast<std::uint64_t>(tv) * 1000000ull +
              static_cast<std::uint64_t>(c) * 100ull +
              static_cast<std::uint64_t>(a)));
          for (double& v : anchor) v = rng.normal();
          const SliceCurve curve = slice_curve(field, tv, anchor, c, grid_size);
          as_csv.write_row(
              {csv_num(static_cast<std::int64_t>(tv)),
               csv_num(static_cast<std::int64_t>(c)),
               csv_num(static_cast<std::int64_t>(a)),
               csv_num(antisymmetry_score(curve))});
          CsvWriter curve_csv(
              (ctx.plotdata() / ("slice_t" + std::to_string(tv) + "_c" +
                                 std::to_string(c) + "_a" + std::to_string(a) +
                                 ".csv"))
                  .string(),
              {"c", "value"});
          for (std::size_t i = 0; i < curve.grid.size(); ++i) {
            curve_csv.write_row({csv_num(curve.grid[i]),
                                 csv_num(curve.values[i])});
          }
        }
      }
    }
  }

  {
    NoiseBatch base =
        gaussian_batch(ctx.base().child(kRoleTemporal), pairs, model.d);
    NoiseBatch pn = antithetic_expand(base);
    ctx.sampler_calls += pn.n;
    auto trajs = ddim_sample_batch(field, model.schedule, pn, true, ctx.policy);
    if (export_count > 0) {
      fs::create_directories(ctx.out / "trajectories");
      for (std::int64_t i = 0; i < 2 * export_count; ++i) {
        Trajectory copy = trajs[i];
        if (!record_eps) {
          copy.eps.clear();
          copy.has_eps = false;
        }
        const std::string name = "pair" + std::to_string(i / 2) +
                                 (i % 2 == 0 ? "_pos" : "_neg");
        save_trajectory(copy, (ctx.out / "trajectories" / name).string());
      }
    }
    std::vector<std::pair<Trajectory, Trajectory>> traj_pairs;
    traj_pairs.reserve(pairs);
    for (std::int64_t i = 0; i < pairs; ++i) {
      traj_pairs.emplace_back(std::move(trajs[2 * i]),
                              std::move(trajs[2 * i + 1]));
    }
    const TemporalCorrelation tc = temporal_correlation(traj_pairs);
    CsvWriter csv((ctx.plotdata() / "temporal_correlation.csv").string(),
                  {"step", "state_mean", "state_sd", "eps_mean", "eps_sd",
                   "state_cent_mean", "state_cent_sd", "eps_cent_mean",
                   "eps_cent_sd"});
    for (int s = 0; s <= model.schedule.steps(); ++s) {
      const bool has_eps = s >= 1;
      csv.write_row({csv_num(static_cast<std::int64_t>(s)),
                     csv_num(tc.state_mean[s]), csv_num(tc.state_sd[s]),
                     has_eps ? csv_num(tc.eps_mean[s]) : "",
                     has_eps ? csv_num(tc.eps_sd[s]) : "",
                     csv_num(tc.state_cent_mean[s]),
                     csv_num(tc.state_cent_sd[s]),
                     has_eps ? csv_num(tc.eps_cent_mean[s]) : "",
                     has_eps ? csv_num(tc.eps_cent_sd[s]) : ""});
    }
  }

  {
    CsvWriter csv((ctx.tables() / "symmetry_centers.csv").string(),
                  {"t", "coord", "center"});
    for (int tv : t_values) {
      for (int c : coords) {
        const double center = symmetry_center(
            field, tv, c, probes,
            ctx.base().child(kRoleCenter).child(
                static_cast<std::uint64_t>(tv) * 1000ull +
                static_cast<std::uint64_t>(c)));
        csv.write_row({csv_num(static_cast<std::int64_t>(tv)),
                       csv_num(static_cast<std::int64_t>(c)),
                       csv_num(center)});
      }
    }
  }
  ctx.write_manifest("symmetry");
}

// ---------------------------------------------------------------------------
// spectral / Fisher-information experiment

void run_ou(RunContext& ctx) {
  const std::string t = "config";
  check_keys(ctx.config, t,
             {"schema_version", "experiment", "seed", "mixture", "t_grid"},
             {"threads", "max_degree", "quadrature_order"});
  const json& mj = ctx.config["mixture"];
  check_keys(mj, t + ".mixture", {"components"}, {});
  MixtureParams mixture;
  mixture.d = 1;
  for (std::size_t k = 0; k < mj["components"].size(); ++k) {
    const json& cj = mj["components"][k];
    const std::string cctx = t + ".mixture.components[" + std::to_string(k) + "]";
    check_keys(cj, cctx, {"weight", "mean", "sigma"}, {});
    mixture.weights.push_back(get_num(cj, cctx, "weight"));
    mixture.means.push_back(get_num(cj, cctx, "mean"));
    const double sigma = get_num(cj, cctx, "sigma");
    mixture.sigma2.push_back(sigma * sigma);
  }
  try {
    mixture.validate();
  } catch (const std::invalid_argument& e) {
    fail(t + ".mixture", e.what());
  }
  // Square-integrability of p0/gamma needs component variance < 2.
  for (double s2 : mixture.sigma2) {
    if (s2 >= 2.0) {
      fail(t + ".mixture",
           "component variance must be < 2 for the density ratio to lie in "
           "L^2(gamma)");
    }
  }
  auto t_grid = ctx.config["t_grid"].get<std::vector<double>>();
  if (t_grid.empty()) fail(t, "t_grid must be nonempty");
  for (double tv : t_grid) {
    if (tv < 0.0) fail(t, "t_grid values must be nonnegative");
  }
  const int max_degree =
      ctx.config.contains("max_degree")
          ? static_cast<int>(get_int(ctx.config, t, "max_degree"))
          : 10;
  const int quad_order =
      ctx.config.contains("quadrature_order")
          ? static_cast<int>(get_int(ctx.config, t, "quadrature_order"))
          : std::max(2 * max_degree, 64);

  const MixtureMarginal p0 = ou_marginal(mixture, 0.0);
  const HermiteExpansion expansion = project_density_ratio(
      [&](double x) {
        double xv[1] = {x};
        return p0.density(std::span<const double>(xv, 1));
      },
      max_degree, quad_order);

  const double fi0 = relative_fisher_information(p0);

  fs::create_directories(ctx.tables());
  fs::create_directories(ctx.plotdata());
  CsvWriter csv((ctx.plotdata() / "decay.csv").string(),
                {"t", "density_ratio_norm", "fisher_information",
                 "fisher_bound"});
  for (double tv : t_grid) {
    const double norm = density_ratio_norm(expansion, tv);
    const double fi = relative_fisher_information(ou_marginal(mixture, tv));
    csv.write_row({csv_num(tv), csv_num(norm), csv_num(fi),
                   csv_num(std::exp(-2.0 * tv) * fi0)});
  }

  json coeffs = json::object();
  for (const auto& [alpha_idx, a] : expansion.coeffs) {
    std::string key;
    for (std::size_t i = 0; i < alpha_idx.size(); ++i) {
      if (i) key += ",";
      key += std::to_string(alpha_idx[i]);
    }
    coeffs[key] = a;
  }
  std::ofstream jf(ctx.tables() / "coefficients.json");
  jf << coeffs.dump(2) << "\n";
  ctx.write_manifest("ou");
}

// ---------------------------------------------------------------------------
// FKG / monotonicity experiment

void run_fkg(RunContext& ctx) {
  const std::string t = "config";
  check_keys(ctx.config, t,
             {"schema_version", "experiment", "seed", "chains", "ddim_check"},
             {"threads", "step_sweep"});
  const json& cj = ctx.config["chains"];
  check_keys(cj, t + ".chains", {"count", "samples"},
             {"max_depth", "weight_scale"});
  const int count = static_cast<int>(get_int(cj, t + ".chains", "count"));
  const int samples = static_cast<int>(get_int(cj, t + ".chains", "samples"));
  const int max_depth =
      cj.contains("max_depth")
          ? static_cast<int>(get_int(cj, t + ".chains", "max_depth"))
          : 5;
  const double weight_scale =
      cj.contains("weight_scale") ? get_num(cj, t + ".chains", "weight_scale")
                                  : 1.0;
  if (count < 1 || samples < 1000 || max_depth < 1) {
    fail(t + ".chains", "need count >= 1, samples >= 1000, max_depth >= 1");
  }

  const json& dj = ctx.config["ddim_check"];
  check_keys(dj, t + ".ddim_check", {"model"}, {"probes"});
  ModelSpec model = parse_model(dj["model"], t + ".ddim_check.model", false);
  const int probes =
      dj.contains("probes")
          ? static_cast<int>(get_int(dj, t + ".ddim_check", "probes"))
          : 512;
  if (probes < 1) fail(t + ".ddim_check", "probes must be >= 1");

  fs::create_directories(ctx.tables());

  int violations = 0;
  int degenerate = 0;
  {
    CsvWriter csv((ctx.tables() / "fkg_chains.csv").string(),
                  {"chain", "depth", "rho_hat", "std_error", "violates"});
    int written = 0;
    std::uint64_t attempt = 0;
    while (written < count && attempt < 50ull * count) {
      const int depth = 1 + static_cast<int>(attempt % max_depth);
      const MonotoneChain chain = build_random_chain(
          ctx.base().child(kRoleChain).child(attempt), depth, weight_scale);
      ++attempt;
      try {
        const CorrEstimate est = antithetic_corr(
            [&](double z) { return chain(z); }, samples,
            ctx.base().child(kRoleChain).child(1000000ull + attempt));
        const bool violates = est.rho > 3.0 * est.std_error;
        violations += violates;
        csv.write_row({csv_num(static_cast<std::int64_t>(written)),
                       csv_num(static_cast<std::int64_t>(depth)),
                       csv_num(est.rho), csv_num(est.std_error),
                       violates ? "1" : "0"});
        ++written;
      } catch (const std::domain_error&) {
        ++degenerate;  // constant chain: correlation undefined, redrawn
      }
    }
    if (written < count) {
      throw NumericalError("fkg: too many degenerate chains");
    }
  }

  const ChainMonotonicityReport chain_report = ddim_chain_monotonicity_check(
      model.mixture, model.schedule, probes, ctx.base().child(kRoleProbe));
  {
    CsvWriter csv((ctx.tables() / "fkg_ddim_condition.csv").string(),
                  {"t", "a", "c", "kappa", "condition_holds",
                   "min_jacobian_entry", "min_offdiagonal"});
    for (const auto& step : chain_report.steps) {
      csv.write_row({csv_num(static_cast<std::int64_t>(step.t)),
                     csv_num(step.a), csv_num(step.c), csv_num(step.kappa),
                     step.condition_holds ? "1" : "0",
                     csv_num(step.min_jacobian_entry),
                     csv_num(step.min_offdiagonal)});
    }
  }

  if (ctx.config.contains("step_sweep")) {
    auto sweep = ctx.config["step_sweep"].get<std::vector<int>>();
    CsvWriter csv((ctx.tables() / "fkg_step_sweep.csv").string(),
                  {"steps", "condition_holds_all", "min_margin"});
    for (int steps : sweep) {
      if (steps < 1) fail(t + ".step_sweep", "steps must be >= 1");
      const Schedule sched = model.schedule_spec.build(steps);
      bool all = true;
      double min_margin = std::numeric_limits<double>::infinity();
      for (int tv = 1; tv <= steps; ++tv) {
        const MonotonicityReport rep = ddim_monotonicity_check(
            model.mixture, sched, tv, probes,
            ctx.base().child(kRoleProbe).child(
                static_cast<std::uint64_t>(steps) * 10000ull +
                static_cast<std::uint64_t>(tv)));
        all &= rep.condition_holds;
        min_margin = std::min(min_margin, rep.a - rep.c * rep.kappa);
      }
      csv.write_row({csv_num(static_cast<std::int64_t>(steps)),
                     all ? "1" : "0", csv_num(min_margin)});
    }
  }

  json summary;
  summary["chain_violations"] = violations;
  summary["degenerate_chains_redrawn"] = degenerate;
  summary["condition_holds_everywhere"] =
      chain_report.condition_holds_everywhere;
  summary["min_composed_jacobian_entry"] =
      chain_report.min_composed_jacobian_entry;
  std::ofstream jf(ctx.tables() / "fkg_summary.json");
  jf << summary.dump(2) << "\n";
  ctx.write_manifest("fkg");
}

}  // namespace

void run_experiment(const std::string& kind, const RunOptions& options) {
  static const std::set<std::string> kinds = {"correlation", "uq",
                                              "qmc-tradeoff", "symmetry",
                                              "ou", "fkg"};
  if (!kinds.count(kind)) throw ConfigError("unknown experiment: " + kind);

  std::ifstream in(options.config_path);
  if (!in) throw ConfigError("cannot open config " + options.config_path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("schema_version") ||
      config["schema_version"] != json(1)) {
    throw ConfigError("config: schema_version must be 1");
  }
  if (!config.contains("experiment") || !config["experiment"].is_string()) {
    throw ConfigError("config: missing experiment kind");
  }
  if (config["experiment"].get<std::string>() != kind) {
    throw ConfigError("config: experiment '" +
                      config["experiment"].get<std::string>() +
                      "' does not match the subcommand '" + kind + "'");
  }
  if (!config.contains("seed")) throw ConfigError("config: seed is mandatory");

  RunContext ctx;
  ctx.config = config;
  if (options.seed_override) ctx.config["seed"] = *options.seed_override;
  ctx.seed = ctx.config["seed"].get<std::uint64_t>();
  ctx.out = options.out_dir;

  int threads = options.threads;
  if (threads == 0 && ctx.config.contains("threads")) {
    threads = ctx.config["threads"].get<int>();
  }
  set_thread_count(threads);

  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw ConfigError("cannot create output directory: " + ec.message());

  if (kind == "correlation") {
    run_correlation(ctx);
  } else if (kind == "uq") {
    run_uq(ctx);
  } else if (kind == "qmc-tradeoff") {
    run_qmc_tradeoff(ctx);
  } else if (kind == "symmetry") {
    run_symmetry(ctx);
  } else if (kind == "ou") {
    run_ou(ctx);
  } else {
    run_fkg(ctx);
  }
}

}  // namespace noiselab::harness
