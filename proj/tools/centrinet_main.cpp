#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "centrinet/config.hpp"
#include "centrinet/errors.hpp"
#include "centrinet/experiment.hpp"

namespace {

using namespace centrinet;

struct CommonArgs {
  std::string config_file;
  std::string out_dir = "out";
  unsigned jobs = 0;
  bool quiet = false;
  std::map<std::string, std::string> values;
};

std::string flag_name(const std::string& key) {
  std::string flag = "--";
  for (char c : key) flag += c == '_' ? '-' : c;
  return flag;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "key = value configuration file");
  cmd->add_option("--out", args.out_dir, "artifact directory")->capture_default_str();
  cmd->add_option("--jobs", args.jobs, "concurrent runs (0 = one per core)");
  cmd->add_flag("--quiet", args.quiet, "no progress lines");
  for (const std::string& key : config_keys()) {
    cmd->add_option(flag_name(key), args.values[key], "override " + key);
  }
}

ExperimentConfig resolve(const CommonArgs& args, const CLI::App* cmd) {
  std::map<std::string, std::string> overrides;
  for (const std::string& key : config_keys()) {
    if (cmd->count(flag_name(key)) > 0) overrides[key] = args.values.at(key);
  }
  if (args.config_file.empty()) return parse_config("", overrides);
  return load_config(args.config_file, overrides);
}

RunOptions run_options(const CommonArgs& args) {
  static std::mutex progress_mutex;
  RunOptions opts;
  opts.jobs = args.jobs ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
  if (!args.quiet) {
    opts.progress = [](const std::string& line) {
      std::lock_guard lock(progress_mutex);
      std::cerr << line << '\n';
    };
  }
  return opts;
}

void print_summary(const std::filesystem::path& dir) {
  std::ifstream in(dir / kSummaryFile);
  std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-centrality anomaly detection experiments"};
  app.require_subcommand(1);

  CommonArgs gen_args, cent_args, sim_args, analyze_args, exp_args;
  CLI::App* gen = app.add_subcommand("gen-topology", "generate the connected unit-disk topology");
  CLI::App* cent = app.add_subcommand("centrality", "rank nodes of a saved topology");
  CLI::App* sim = app.add_subcommand("simulate", "write baseline and anomaly traces");
  CLI::App* analyze = app.add_subcommand("analyze", "rank by arrival time and build detection curves");
  CLI::App* exp = app.add_subcommand("experiment", "run every stage in order");
  add_common(gen, gen_args);
  add_common(cent, cent_args);
  add_common(sim, sim_args);
  add_common(analyze, analyze_args);
  add_common(exp, exp_args);
  std::string anomaly = "on";
  sim->add_option("--anomaly", anomaly, "also simulate anomaly runs")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ExperimentConfig cfg = resolve(gen_args, gen);
      stage_gen_topology(cfg, gen_args.out_dir);
    } else if (cent->parsed()) {
      const ExperimentConfig cfg = resolve(cent_args, cent);
      stage_centrality(cfg, cent_args.out_dir, run_options(cent_args));
    } else if (sim->parsed()) {
      const ExperimentConfig cfg = resolve(sim_args, sim);
      stage_simulate(cfg, sim_args.out_dir, anomaly == "on", run_options(sim_args));
    } else if (analyze->parsed()) {
      const ExperimentConfig cfg = resolve(analyze_args, analyze);
      stage_analyze(cfg, analyze_args.out_dir, run_options(analyze_args));
      print_summary(analyze_args.out_dir);
    } else if (exp->parsed()) {
      const ExperimentConfig cfg = resolve(exp_args, exp);
      run_experiment(cfg, exp_args.out_dir, run_options(exp_args));
      print_summary(exp_args.out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
