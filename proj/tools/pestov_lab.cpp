#include "pestov/suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Flags {
  std::string suite;
  std::string config_path;
  std::string report_path;
  std::map<std::string, std::string> settings;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pestov::DomainError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of frame-bundle identities on model manifolds"};
  app.require_subcommand(1);
  CLI::App* check = app.add_subcommand("check", "Run a check suite and write a JSON report");

  Flags flags;
  std::string positional;
  check->add_option("SUITE", positional, "pointwise | integrated | grassmannian | all");
  check->add_option("--suite", flags.suite, "Same as the positional suite argument");
  check->add_option("--config", flags.config_path, "key = value file; flags take precedence");
  check->add_option("--report", flags.report_path, "Write the JSON report here (default: stdout)");

  const std::pair<const char*, const char*> keyed[] = {
      {"manifold", "Model: torus:N, ctorus:M, sphere:N, hyperbolic:N, product:AxB"},
      {"k", "Frame length"},
      {"i", "First identity index (1-based)"},
      {"j", "Second identity index (1-based)"},
      {"fd-step", "Finite-difference step"},
      {"inner-fd-step", "Step for nested gradients (0: same as fd-step)"},
      {"ode-step", "RK4 step for geodesic and transport ODEs"},
      {"samples", "Monte Carlo samples"},
      {"seed", "Random seed"},
      {"tolerance", "Relative tolerance for pointwise identities"},
      {"pairs", "Frames per pointwise identity"},
      {"loops", "Transport loops for the invariance check"},
      {"threads", "Worker threads (0: hardware concurrency)"},
      {"convergence-steps", "Comma-separated steps for the order estimate"},
  };
  std::map<std::string, std::string> values;
  for (const auto& [key, help] : keyed) {
    check->add_option(std::string("--") + key, values[key], help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::string suite = !flags.suite.empty() ? flags.suite : positional;
  if (suite.empty()) {
    std::cerr << "error: no suite given\n" << check->help();
    return 2;
  }
  if (!pestov::is_suite_name(suite)) {
    std::cerr << "error: unknown suite '" << suite << "'\n";
    return 2;
  }

  pestov::SuiteConfig config;
  try {
    if (!flags.config_path.empty()) {
      for (const auto& [key, value] : pestov::parse_config_text(read_file(flags.config_path))) {
        if (key == "suite") continue;
        pestov::apply_setting(config, key, value);
      }
    }
    for (const auto& [key, help] : keyed) {
      const std::string opt = std::string("--") + key;
      if (check->count(opt) > 0) pestov::apply_setting(config, key, values[key]);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  pestov::Report report;
  try {
    report = pestov::run_suite(suite, config);
  } catch (const pestov::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  const std::string text = report.dump() + "\n";
  if (flags.report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(flags.report_path);
    out << text;
    if (!out) {
      std::cerr << "error: cannot write " << flags.report_path << "\n";
      return 3;
    }
  }
  const auto summary = report.to_json()["summary"];
  std::cerr << suite << ": " << summary["pass"] << " pass, " << summary["fail"] << " fail, "
            << summary["skip"] << " skip, " << summary["noise_floor"] << " noise floor, "
            << summary["unexpected"] << " unexpected\n";
  return report.ok() ? 0 : 1;
}
