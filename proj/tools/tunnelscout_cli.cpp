#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tunnelscout/mission.hpp"
#include "tunnelscout/scenario_io.hpp"
#include "tunnelscout/sim_world.hpp"
#include "tunnelscout/wind_bench.hpp"

namespace fs = std::filesystem;
using namespace tunnelscout;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitCollision = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("tunnelscout");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("TUNNELSCOUT_LOG_LEVEL")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps anything unrecognized to off; only honor real names.
    if (level != spdlog::level::off || std::string(env) == "off") {
      spdlog::set_level(level);
    } else {
      spdlog::warn("ignoring unknown TUNNELSCOUT_LOG_LEVEL '{}'", env);
    }
  }
}

Scenario load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_scenario(text);
  } catch (const ParseError& e) {
    std::string where = path;
    if (e.line() > 0) where += ":" + std::to_string(e.line());
    throw ParseError(where + ": " + e.what(), e.field(), e.line());
  }
}

int exit_code_for(const RunReport& r) {
  if (r.collision_count > 0) return kExitCollision;
  if (r.timed_out || !r.stopped) return kExitTimeout;
  return kExitOk;
}

int run_one(const Scenario& scenario, const fs::path& out) {
  fs::create_directories(out);
  RunResult result = run_scenario(scenario);
  write_file_atomic(out / "trajectory.csv", trajectory_csv(result.trajectory));
  write_file_atomic(out / "map.txt", export_text(result.map));
  write_file_atomic(out / "report.json", report_json(result.report, scenario));
  const RunReport& r = result.report;
  spdlog::info(
      "seed {}: final={} end_dist={:.3f} coverage={:.3f} return_err={:.3f} collisions={} "
      "tick mean/p99={:.2f}/{:.2f} ms wall={:.1f}s",
      r.seed, to_string(r.final_state), r.min_distance_to_end, r.coverage_fraction,
      r.return_to_start_error, r.collision_count, r.tick_mean_ms, r.tick_p99_ms, r.wall_clock_s);
  return exit_code_for(r);
}

struct RunOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int seeds = 1;
  int jobs = 1;
};

int cmd_run(const RunOptions& opt) {
  Scenario base = load_scenario(opt.config);
  if (opt.seed) base.rng_seed = *opt.seed;
  if (opt.seeds <= 1) return run_one(base, opt.out);

  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < opt.seeds; ++k) seeds.push_back(base.rng_seed + static_cast<std::uint64_t>(k));
  std::vector<int> codes(seeds.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::string first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      Scenario sc = base;
      sc.rng_seed = seeds[i];
      try {
        codes[i] = run_one(sc, fs::path(opt.out) / ("seed_" + std::to_string(seeds[i])));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error.empty()) first_error = e.what();
        codes[i] = kExitInvalid;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(seeds.size())));
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!first_error.empty()) throw Error(first_error);

  int code = kExitOk;
  for (int c : codes) {
    if (c == kExitCollision) return kExitCollision;
    if (c == kExitTimeout) code = kExitTimeout;
  }
  return code;
}

struct WindOptions {
  std::string mode = "hover";
  std::string level = "all";
  std::string out = "out";
  std::string calibration;
  std::uint64_t seed = 1;
  bool calibrate = false;
  int calibration_seeds = 5;
};

int cmd_windtest(const WindOptions& opt) {
  WindTestMode mode;
  if (opt.mode == "hover") {
    mode = WindTestMode::Hover;
  } else if (opt.mode == "straight") {
    mode = WindTestMode::GoStraight;
  } else {
    spdlog::error("unknown mode '{}' (expected hover or straight)", opt.mode);
    return kExitInvalid;
  }
  std::vector<WindLevel> levels;
  if (opt.level == "all") {
    levels = {WindLevel::None, WindLevel::Low, WindLevel::Middle, WindLevel::High};
  } else if (const auto lv = parse_wind_level(opt.level)) {
    levels = {*lv};
  } else {
    spdlog::error("unknown wind level '{}'", opt.level);
    return kExitInvalid;
  }

  const fs::path out(opt.out);
  fs::create_directories(out);
  const fs::path cal_path =
      opt.calibration.empty() ? out / "wind_calibration.json" : fs::path(opt.calibration);
  WindCalibration cal;
  if (opt.calibrate) {
    std::vector<std::uint64_t> seeds;
    for (int k = 1; k <= opt.calibration_seeds; ++k) seeds.push_back(static_cast<std::uint64_t>(k));
    spdlog::info("calibrating over {} seeds", seeds.size());
    cal = calibrate(DriftTargets{}, DynamicsParams{}, seeds);
    write_file_atomic(cal_path, calibration_json(cal));
    spdlog::info("gain {:.5f}, wrote {}", cal.gain, cal_path.string());
  } else {
    if (!fs::exists(cal_path)) {
      spdlog::error("calibration file {} not found; pass --calibrate", cal_path.string());
      return kExitInvalid;
    }
    cal = parse_calibration(read_file(cal_path));
  }

  if (mode == WindTestMode::Hover) {
    std::printf("%-18s %14s %14s\n", "Wind level", "max drift x", "max drift y");
  } else {
    std::printf("%-18s %14s %14s\n", "Wind level", "intrinsic y", "max drift y");
  }
  for (WindLevel level : levels) {
    WindTestConfig cfg;
    cfg.mode = mode;
    cfg.level = level;
    cfg.seed = opt.seed;
    cfg.dynamics.mass_kg = cal.mass_kg;
    cfg.noise = mode == WindTestMode::Hover ? cal.hover_noise : cal.straight_noise;
    const DriftReport r =
        mode == WindTestMode::Hover ? run_hover_test(cfg, cal.gain) : run_straight_test(cfg, cal.gain);
    const double speed =
        mode == WindTestMode::Hover ? hover_wind_speed(level) : straight_wind_speed(level);

    char label[32];
    if (level == WindLevel::None) {
      std::snprintf(label, sizeof label, "No wind");
    } else {
      std::snprintf(label, sizeof label, "%s (%.2fm/s)", std::string(to_string(level)).c_str(), speed);
    }
    if (mode == WindTestMode::Hover) {
      std::printf("%-18s %13.3fm %13.3fm\n", label, r.max_drift_x, r.max_drift_y);
    } else {
      std::printf("%-18s %13.3fm %13.3fm\n", label, r.intrinsic_drift_y, r.max_drift_y);
    }

    const std::string stem = opt.mode + "_" + std::string(to_string(level));
    write_file_atomic(out / (stem + ".json"), drift_report_json(r, cfg, cal.gain));
    write_file_atomic(out / (stem + ".csv"), trajectory_csv(r.trajectory));
  }
  std::fflush(stdout);
  return kExitOk;
}

struct ExportOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
};

int cmd_export(const ExportOptions& opt) {
  Scenario sc = load_scenario(opt.config);
  if (opt.seed) sc.rng_seed = *opt.seed;
  const fs::path out(opt.out);
  fs::create_directories(out);
  write_file_atomic(out / "scenario.json", serialize_scenario(sc));
  write_file_atomic(out / "map_truth.txt", export_text(ground_truth_map(sc, 0.0)));
  spdlog::info("wrote {}/scenario.json and {}/map_truth.txt", out.string(), out.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Tunnel exploration simulator"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Simulate a full exploration mission");
  run->add_option("config", run_opt.config, "Scenario JSON file")->required();
  run->add_option("--out", run_opt.out, "Output directory")->capture_default_str();
  run->add_option("--seed", run_opt.seed, "Override the scenario seed");
  run->add_option("--seeds", run_opt.seeds, "Number of consecutive seeds to run")
      ->check(CLI::PositiveNumber);
  run->add_option("--jobs", run_opt.jobs, "Parallel workers for multi-seed runs")
      ->check(CLI::PositiveNumber);

  WindOptions wind_opt;
  auto* wind = app.add_subcommand("windtest", "Hover or straight-leg wind drift test");
  wind->add_option("--mode", wind_opt.mode, "hover or straight")->capture_default_str();
  wind->add_option("--level", wind_opt.level, "None, Low, Middle, High or all")->capture_default_str();
  wind->add_option("--out", wind_opt.out, "Output directory")->capture_default_str();
  wind->add_option("--seed", wind_opt.seed, "Noise seed")->capture_default_str();
  wind->add_option("--calibration", wind_opt.calibration,
                   "Calibration file (default <out>/wind_calibration.json)");
  wind->add_flag("--calibrate", wind_opt.calibrate, "Fit noise and gain, then write the calibration");
  wind->add_option("--calibration-seeds", wind_opt.calibration_seeds, "Seeds averaged by --calibrate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ExportOptions export_opt;
  auto* exp = app.add_subcommand("export", "Write the normalized scenario and ground-truth map");
  exp->add_option("config", export_opt.config, "Scenario JSON file")->required();
  exp->add_option("--out", export_opt.out, "Output directory")->capture_default_str();
  exp->add_option("--seed", export_opt.seed, "Override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (*wind) return cmd_windtest(wind_opt);
    if (*exp) return cmd_export(export_opt);
  } catch (const ParseError& e) {
    spdlog::error("invalid config: {}", e.what());
    return kExitInvalid;
  } catch (const ScenarioInvalid& e) {
    spdlog::error("invalid scenario: {}", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
