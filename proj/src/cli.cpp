#include "mme/cli.hpp"

#include <chrono>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "mme/config.hpp"
#include "mme/errors.hpp"
#include "mme/report.hpp"

namespace mme::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     fmt::gmtime(std::chrono::system_clock::to_time_t(
                         std::chrono::system_clock::now())));
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kDomainError;
  }
}

struct PreparedRun {
  json document;  // config snapshot with overrides applied
  CampaignConfig config;
  std::string started;
};

PreparedRun prepare(const GlobalOptions& opts) {
  PreparedRun run;
  run.started = utc_now();
  if (opts.config.empty()) throw ConfigError("config", "--config is required");
  run.document = load_config_document(opts.config);
  if (!run.document.is_object()) throw ConfigError("<root>", "expected an object");
  if (opts.seed) {
    if (!run.document.contains("rng")) run.document["rng"] = json::object();
    run.document["rng"]["master_seed"] = *opts.seed;
  }
  if (opts.events) run.document["events_per_point"] = *opts.events;
  run.config = parse_config(run.document);
  if (opts.threads == 0) throw ConfigError("threads", "must be at least 1");
  run.config.threads = opts.threads;
  return run;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  f << contents;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_manifest(const fs::path& path, const std::string& command,
                    const PreparedRun& run, const GlobalOptions& opts,
                    const std::vector<fs::path>& outputs) {
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.string());
  json manifest{{"kind", "run_manifest"},
                {"tool", "mme"},
                {"tool_version", kToolVersion},
                {"command", command},
                {"master_seed", run.config.rng.master_seed},
                {"threads", opts.threads},
                {"started_utc", run.started},
                {"finished_utc", utc_now()},
                {"outputs", files},
                {"config", run.document}};
  write_file(path, dump(manifest));
}

std::string model_name(const CampaignConfig& cfg) {
  return std::holds_alternative<Relativistic>(cfg.setup.model) ? "relativistic"
                                                               : "preferred_frame";
}

}  // namespace

int cmd_rotate(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PreparedRun run = prepare(opts);
    const VerdictReport report = run_rotation_campaign(run.config);

    fs::create_directories(opts.out_dir);
    const fs::path verdict = opts.out_dir / "rotate_verdict.json";
    const fs::path points = opts.out_dir / "rotate_points.csv";
    write_file(verdict, dump(to_json(report)));
    {
      std::ostringstream csv;
      write_points_csv(csv, report.points, report.model);
      write_file(points, csv.str());
    }
    write_manifest(opts.out_dir / "rotate_manifest.json", "rotate", run, opts,
                   {verdict, points});

    out << fmt::format(
        "verdict: {} (z = {:.3f}, p_before = {:.5f}, p_after = {:.5f}, "
        "delta_phi = {:.5f} +/- {:.5f} rad)\n",
        to_string(report.decision), report.shift.z, report.shift.p_before.p_hat,
        report.shift.p_after.p_hat, report.delta_phi, report.delta_phi_error);
    if (report.sizing && !report.sizing->consistent) {
      out << "sizing: " << sizing_note(*report.sizing) << '\n';
    }
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PreparedRun run = prepare(opts);
    const std::vector<PointResult> sweep = run_sidereal_sweep(run.config);
    const std::string model = model_name(run.config);

    std::vector<Tally> tallies;
    for (const auto& p : sweep) tallies.push_back(p.tally);
    const HomogeneityTest flat = homogeneity_test(tallies);

    // Largest |p(stage 0) - p(stage 90)| over the day, when both are swept.
    json max_shift = nullptr;
    const std::size_t n_stages = run.config.stages.size();
    std::optional<std::size_t> i0, i90;
    for (std::size_t j = 0; j < n_stages; ++j) {
      if (std::abs(run.config.stages[j]) < 1e-12) i0 = j;
      if (std::abs(run.config.stages[j] - std::numbers::pi / 2) < 1e-12) i90 = j;
    }
    if (i0 && i90) {
      double best = -1.0;
      for (std::size_t k = 0; k < sweep.size(); k += n_stages) {
        const double d = std::abs(sweep[k + *i0].estimate.p_hat -
                                  sweep[k + *i90].estimate.p_hat);
        if (d > best) {
          best = d;
          max_shift = {{"t_sidereal_h", sweep[k].t_sidereal}, {"abs_p_difference", d}};
        }
      }
    }

    fs::create_directories(opts.out_dir);
    const fs::path csv_path = opts.out_dir / "sweep.csv";
    const fs::path summary_path = opts.out_dir / "sweep_summary.json";
    {
      std::ostringstream csv;
      write_points_csv(csv, sweep, model);
      write_file(csv_path, csv.str());
    }
    json summary{{"model", model},
                 {"points", sweep.size()},
                 {"homogeneity", {{"chi_square", flat.chi_square},
                                  {"dof", flat.dof},
                                  {"p_value", flat.p_value},
                                  {"flat_at_threshold",
                                   flat.p_value >= two_sided_tail(
                                                       run.config.significance_sigma)}}},
                 {"max_shift", max_shift}};
    write_file(summary_path, dump(summary));
    write_manifest(opts.out_dir / "sweep_manifest.json", "sweep", run, opts,
                   {csv_path, summary_path});

    out << fmt::format("sweep: {} points, chi2 = {:.3f} (dof {}), p = {:.3g}\n",
                       sweep.size(), flat.chi_square, flat.dof, flat.p_value);
    if (!max_shift.is_null()) {
      out << fmt::format("max shift at t = {} h\n",
                         max_shift["t_sidereal_h"].get<double>());
    }
    return static_cast<int>(kOk);
  });
}

int cmd_bell(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PreparedRun run = prepare(opts);
    const ChshResult result = run_bell_campaign(run.config);

    fs::create_directories(opts.out_dir);
    const fs::path bell_path = opts.out_dir / "bell.json";
    json j = to_json(result);
    const auto& s = *run.config.chsh;
    j["settings_rad"] = {{"alice", {s.alice[0], s.alice[1]}},
                         {"bob", {s.bob[0], s.bob[1]}}};
    j["events_per_pair"] = run.config.events_per_point;
    write_file(bell_path, dump(j));
    write_manifest(opts.out_dir / "bell_manifest.json", "bell", run, opts, {bell_path});

    out << fmt::format("S = {:.5f} +/- {:.5f} (E = {:.5f}, {:.5f}, {:.5f}, {:.5f})\n",
                       result.s_value, result.std_error, result.e11, result.e12,
                       result.e21, result.e22);
    return static_cast<int>(kOk);
  });
}

int cmd_power(double p1, double p2, double sigma, std::ostream& out,
              std::ostream& err) {
  try {
    out << required_n_per_arm(p1, p2, sigma) << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "invalid arguments: " << e.what() << '\n';
    return kConfigError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Michelson-Morley entanglement experiment simulator"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GlobalOptions opts;
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::uint64_t events = 0;
  app.add_option("--config", config, "campaign config JSON (or run manifest)");
  auto* seed_opt = app.add_option("--seed", seed, "override rng.master_seed");
  auto* events_opt = app.add_option("--events", events, "override events_per_point");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", opts.threads, "worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  auto* rotate = app.add_subcommand("rotate", "90-degree rotation trial");
  auto* sweep = app.add_subcommand("sweep", "sidereal sweep");
  auto* bell = app.add_subcommand("bell", "CHSH Bell campaign");
  auto* power = app.add_subcommand("power", "events per stage for a target significance");
  double p1 = 0.5, p2 = 0.25, sigma = 5.0;
  power->add_option("--p1", p1, "proportion before")->required();
  power->add_option("--p2", p2, "proportion after")->required();
  power->add_option("--sigma", sigma, "significance threshold")->capture_default_str();
  for (auto* sub : {rotate, sweep, bell, power}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  opts.config = config;
  opts.out_dir = out_dir;
  if (*seed_opt) opts.seed = seed;
  if (*events_opt) opts.events = events;

  if (*rotate) return cmd_rotate(opts, out, err);
  if (*sweep) return cmd_sweep(opts, out, err);
  if (*bell) return cmd_bell(opts, out, err);
  return cmd_power(p1, p2, sigma, out, err);
}

}  // namespace mme::cli
