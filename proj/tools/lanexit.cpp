#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "lanexit/closing_speed.hpp"
#include "lanexit/commands.hpp"
#include "lanexit/config.hpp"
#include "lanexit/error.hpp"
#include "lanexit/scenario.hpp"

namespace fs = std::filesystem;
using namespace lanexit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitParse = 3;
constexpr int kExitTimeout = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return kExitParse;
    case ErrorCode::kInternal: return 1;
    default: return kExitValidation;
  }
}

struct ModelArgs {
  std::optional<double> beta1, beta2, beta3, r_squared;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--beta1", beta1, "quadratic error coefficient");
    cmd->add_option("--beta2", beta2, "linear error coefficient");
    cmd->add_option("--beta3", beta3, "constant error offset (m)");
    cmd->add_option("--r-squared", r_squared, "fit quality of the error model, in (0,1)");
  }

  DepthErrorModel resolve(const std::string& config) const {
    DepthErrorModel base = config.empty() ? DepthErrorModel(0.002797, -0.004249, 0.007311, 0.9)
                                          : load_model(config);
    try {
      return DepthErrorModel(beta1.value_or(base.beta1()), beta2.value_or(base.beta2()),
                             beta3.value_or(base.beta3()), r_squared.value_or(base.r_squared()));
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, fmt::format("model: {}", e.what()));
    }
  }
};

// Writes to <dir>/<name> when an output directory was given, else stdout.
template <typename Fn>
void emit(const std::string& dir, const std::string& name, Fn&& write) {
  if (dir.empty()) {
    write(std::cout);
    return;
  }
  fs::create_directories(dir);
  const fs::path file = fs::path(dir) / name;
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, fmt::format("cannot write {}", file.string()));
  write(out);
}

struct SimulateJob {
  std::string config;
  fs::path output;
  int status = kExitOk;
  std::string message;
};

void run_job(SimulateJob& job, std::optional<std::uint64_t> seed) {
  try {
    ScenarioConfig cfg = load_config(job.config);
    if (seed) cfg.seed = *seed;
    const ScenarioTrace trace = run_scenario(cfg);
    write_trace(trace, cfg, job.output);
    if (trace.complete) {
      job.message = trace.neighbors.empty()
                        ? fmt::format("{}: complete in {} s, no neighbors", job.config, trace.end_time)
                        : fmt::format("{}: complete in {} s, min separation {} m", job.config,
                                      trace.end_time, trace.min_separation);
    } else {
      job.status = kExitTimeout;
      job.message = fmt::format("{}: {}", job.config, trace.deadlock_report);
    }
  } catch (const Error& e) {
    job.status = exit_code_for(e.code());
    job.message = fmt::format("{}: {}", job.config, e.what());
  } catch (const std::exception& e) {
    job.status = 1;
    job.message = fmt::format("{}: {}", job.config, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-uncertainty aware lane-exit planning and simulation"};
  app.require_subcommand(1);

  std::string output;
  std::string config;
  std::optional<std::uint64_t> seed;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output", output, "output directory (stdout when omitted)");
    cmd->add_option("--seed", seed, "random seed, overrides the config");
  };

  ModelArgs model_args;
  DepthRange range;

  auto* profile = app.add_subcommand("depth-profile", "depth error and bound band over a depth range");
  add_common(profile);
  profile->add_option("--config", config, "scenario file supplying the [model] section")
      ->check(CLI::ExistingFile);
  model_args.add_to(profile);
  profile->add_option("--from", range.from, "first depth (m)")->capture_default_str();
  profile->add_option("--to", range.to, "last depth (m)")->capture_default_str();
  profile->add_option("--step", range.step, "depth step (m)")->capture_default_str();

  std::vector<double> epsilons{0.2};
  DepthRange plan_range{10.0, 100.0, 1.0};
  auto* plan = app.add_subcommand("sampling-plan", "sampling distance versus depth per threshold");
  add_common(plan);
  plan->add_option("--config", config, "scenario file supplying the [model] section")
      ->check(CLI::ExistingFile);
  model_args.add_to(plan);
  plan->add_option("--epsilon", epsilons, "closing-speed deviation thresholds")
      ->delimiter(',')
      ->capture_default_str();
  plan->add_option("--from", plan_range.from, "first depth (m)")->capture_default_str();
  plan->add_option("--to", plan_range.to, "last depth (m)")->capture_default_str();
  plan->add_option("--step", plan_range.step, "depth step (m)")->capture_default_str();

  double epsilon = 0.2;
  std::string stream_file;
  auto* speed = app.add_subcommand("closing-speed", "closing-speed estimates from a depth stream");
  add_common(speed);
  speed->add_option("--config", config, "scenario file supplying the [model] section")
      ->check(CLI::ExistingFile);
  model_args.add_to(speed);
  speed->add_option("--epsilon", epsilon, "closing-speed deviation threshold")
      ->capture_default_str();
  speed->add_option("--stream", stream_file, "CSV with columns t_s,x_m_m")->required();

  std::vector<std::string> configs;
  int jobs = 1;
  auto* simulate = app.add_subcommand("simulate", "run scenario files and write traces");
  simulate->add_option("--config", configs, "scenario file (repeat for a sweep)")->required();
  simulate->add_option("--output", output, "output directory")->required();
  simulate->add_option("--seed", seed, "random seed, overrides the config");
  simulate->add_option("--jobs", jobs, "scenarios run concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*profile) {
      const DepthErrorModel model = model_args.resolve(config);
      range.validate();
      emit(output, "depth_profile.csv",
           [&](std::ostream& out) { write_depth_profile(model, range, out); });
      return kExitOk;
    }
    if (*plan) {
      const DepthErrorModel model = model_args.resolve(config);
      plan_range.validate();
      emit(output, "sampling_plan.csv",
           [&](std::ostream& out) { write_sampling_plan(model, epsilons, plan_range, out); });
      return kExitOk;
    }
    if (*speed) {
      const DepthErrorModel model = model_args.resolve(config);
      if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::kValidation, fmt::format("epsilon: must be > 0 (got {})", epsilon));
      }
      const DepthStream stream = load_depth_stream(stream_file);
      const auto estimates = sample_stream(SamplingPlan(epsilon, model), stream);
      emit(output, "closing_speed.csv",
           [&](std::ostream& out) { write_closing_speeds(estimates, out); });
      return kExitOk;
    }

    // simulate: one output directory per config when sweeping
    std::vector<SimulateJob> work;
    for (const std::string& c : configs) {
      SimulateJob job;
      job.config = c;
      job.output = configs.size() == 1 ? fs::path(output) : fs::path(output) / fs::path(c).stem();
      work.push_back(std::move(job));
    }
    if (configs.size() > 1) {
      std::vector<fs::path> dirs;
      for (const auto& j : work) dirs.push_back(j.output);
      std::sort(dirs.begin(), dirs.end());
      if (std::adjacent_find(dirs.begin(), dirs.end()) != dirs.end()) {
        throw Error(ErrorCode::kValidation, "config: sweep configs must have distinct file names");
      }
    }
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
      for (std::size_t i = next++; i < work.size(); i = next++) run_job(work[i], seed);
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), work.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int status = kExitOk;
    for (const auto& job : work) {
      (job.status == kExitOk ? std::cout : std::cerr) << job.message << '\n';
      status = std::max(status, job.status);
    }
    return status;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
