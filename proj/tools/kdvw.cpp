#include <CLI11.hpp>

#include <iostream>

#include "kdvw/config.hpp"
#include "kdvw/errors.hpp"
#include "kdvw/pipeline.hpp"

namespace {

constexpr int kOk = 0, kPartial = 1, kInvalid = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small-dispersion KdV against its Whitham asymptotics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "KdV solves, Whitham zones, comparisons and plots");
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> flags;
  auto opt = [&](const std::string& name, const std::string& help) {
    run->add_option_function<std::string>(
        "--" + name, [&flags, name](const std::string& v) { flags.emplace_back(name, v); }, help);
  };
  run->add_option("--config", config_path, "key = value file; flags given here override it");
  opt("epsilon", "comma separated list, 10^p allowed");
  opt("tmax", "final time of the KdV runs");
  opt("times", "comma separated snapshot times");
  opt("nmodes", "number of Fourier modes N");
  opt("L", "half period over pi");
  opt("dt", "time step");
  opt("nx-whitham", "Whitham grid size");
  opt("out", "output directory");
  opt("workers", "worker threads, 0 for one per core");
  opt("profile", "sech2 or table:<file>");
  run->add_flag_function("--precision,!--no-precision",
                         [&](std::int64_t n) { flags.emplace_back("precision", n > 0 ? "true" : "false"); },
                         "drive hodograph residuals to rounding level");
  run->add_flag_function("--long", [&](std::int64_t) { flags.emplace_back("long", "true"); },
                         "allow eps <= 10^-2.5");

  auto* plot = app.add_subcommand("plot", "render SVG plots from a run directory");
  std::string from;
  plot->add_option("--from", from, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (*plot) {
    try {
      for (const auto& f : kdvw::plot_directory(from)) std::cout << f.string() << '\n';
      return kOk;
    } catch (const std::exception& e) {
      std::cerr << "kdvw plot: " << e.what() << '\n';
      return kPartial;
    }
  }

  kdvw::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = kdvw::load_config(config_path);
    for (const auto& [k, v] : flags) kdvw::set_key(cfg, k, v);
    kdvw::validate(cfg);
  } catch (const kdvw::ConfigError& e) {
    std::cerr << "kdvw run: invalid configuration: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    const auto rep = kdvw::run_experiment(cfg);
    for (const auto& r : rep.runs)
      if (!r.ok) std::cerr << "kdvw run: " << r.stage << " failed: " << r.message << '\n';
    std::cout << cfg.out << "/manifest.txt (" << rep.artifacts.size() << " artifacts)\n";
    return rep.exit_code == 0 ? kOk : kPartial;
  } catch (const kdvw::ConfigError& e) {
    std::cerr << "kdvw run: invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "kdvw run: " << e.what() << '\n';
    return kPartial;
  }
}
