// sclsim: closed-loop power side-channel simulator.
//
//   sclsim calibrate|run|attack|sweep --config <path> [--seed N] [--out <dir>]
//          [--set key=value ...] [--threads N] [--timing]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sclsim/config.hpp"
#include "sclsim/errors.hpp"
#include "sclsim/harness.hpp"
#include "sclsim/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string mode;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> sets;
  unsigned threads = 1;
  bool timing = false;
};

sclsim::ExperimentConfig load_config(const Options& opt) {
  sclsim::KeyValues entries;
  if (!opt.config_path.empty()) entries = sclsim::read_key_value_file(opt.config_path);
  entries.emplace_back("mode", opt.mode);
  for (const auto& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw sclsim::ConfigError(s, "--set expects key=value");
    auto parsed = sclsim::parse_key_values(s);
    entries.insert(entries.end(), parsed.begin(), parsed.end());
  }
  if (opt.seed) entries.emplace_back("seed", std::to_string(*opt.seed));
  auto config = sclsim::apply_key_values(sclsim::ExperimentConfig{}, entries);
  config.threads = opt.threads;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop power side-channel leakage simulator"};
  app.require_subcommand(1, 1);
  Options opt;

  const std::pair<const char*, const char*> modes[] = {
      {"calibrate", "fixed-vs-random TVLA per sensor, countermeasures off"},
      {"run", "one closed-loop run with NICV detection and the controller"},
      {"attack", "CPA disclosure under off, adaptive and forced-on protection"},
      {"sweep", "threshold grid of the adaptive regime"},
  };
  for (const auto& [mode, about] : modes) {
    auto* sub = app.add_subcommand(mode, about);
    sub->add_option("--config", opt.config_path, "key=value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "base seed (overrides the config)");
    sub->add_option("--out", opt.out_dir, "output directory for report.json and CSVs");
    sub->add_option("--set", opt.sets, "override a config key (key=value), repeatable");
    sub->add_option("--threads", opt.threads, "worker threads for attack and sweep runs")
        ->check(CLI::Range(1u, 1024u));
    sub->add_flag("--timing", opt.timing, "include wall-clock time in the report");
    sub->callback([&opt, mode] { opt.mode = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto config = load_config(opt);
    const auto report = sclsim::run_mode(config);
    if (opt.out_dir.empty())
      std::cout << sclsim::render_report(report, opt.timing);
    else
      sclsim::write_outputs(report, opt.out_dir, opt.timing);
  } catch (const sclsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sclsim::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
