#pragma once

// Check suites driven by a flat configuration: pointwise identities with
// convergence orders, integrated identities by Monte Carlo, and the
// Grassmannian checks.

#include "pestov/report.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pestov {

struct SuiteConfig {
  std::string manifold = "sphere:2";
  int k = 1;
  /// 0-based identity indices; unset means "sample" (pointwise) or "all".
  std::optional<int> i;
  std::optional<int> j;
  double fd_step = 1e-4;
  double inner_fd_step = 0.0;
  double ode_step = 1e-3;
  long samples = 10000;
  std::uint64_t seed = 1;
  /// Relative residual bound for pointwise identities.
  double tolerance = 1e-3;
  /// (frame, function) pairs per pointwise identity.
  int pairs = 20;
  std::vector<double> convergence_steps{1e-3, 5e-4, 2.5e-4};
  double order_min = 1.5;
  double order_max = 2.5;
  int loops = 100;
  int threads = 0;
  long calibration_samples = 1000;
  /// Probe frames for the Grassmannian span and wedge checks.
  int probes = 10;

  NumericalOptions numerical() const;
  Json to_json() const;
};

/// Applies `key = value` settings (keys as in the CLI flags, e.g. "fd-step").
/// Throws DomainError on unknown keys or malformed values.
void apply_setting(SuiteConfig& config, const std::string& key, const std::string& value);
/// Parses a flat key-value text file: one `key = value` per line, `#` comments.
std::map<std::string, std::string> parse_config_text(const std::string& text);

Report run_pointwise(const SuiteConfig& config);
Report run_integrated(const SuiteConfig& config);
Report run_grassmannian(const SuiteConfig& config);
/// "pointwise", "integrated", "grassmannian" or "all".
Report run_suite(const std::string& suite, const SuiteConfig& config);

bool is_suite_name(const std::string& suite);

}  // namespace pestov
