#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "warpdirac/estimate_harness.hpp"
#include "warpdirac/metric_profiles.hpp"
#include "warpdirac/mode_spectrum.hpp"
#include "warpdirac/radial_operators.hpp"
#include "warpdirac/scan.hpp"

namespace warpdirac {

enum class ModeSelection { MuList, Band, MuMax };

struct InitialDataSpec {
  double r0 = 12.0;
  double width = 1.5;
  double amplitude = 1.0;
  SpinorComponent component = SpinorComponent::Plus;
};

struct ValidationSpec {
  std::vector<int> sizes;                  // empty: N/8, N/4, N/2, N
  std::vector<double> mu{1.0, 2.0};
  std::vector<double> masses{0.0, 1.0};
  int trials = 100;
  double min_order = 1.9;
};

struct RunConfig {
  MetricProfile profile = MetricProfile::flat(3);
  int n = 3;
  double m = 0.0;

  ModeSelection selection = ModeSelection::MuMax;
  std::vector<int> two_mu_list;  // explicit list, twice the eigenvalue
  int band_j = 0;
  double mu_max = 8.0;
  bool both_signs = false;

  RadialGrid grid{40.0, 2048};
  double t_end = 8.0;
  bool t_end_causal = false;  // use the full causal window of the initial data
  int time_samples = 81;

  std::vector<ExponentTriple> triples{ExponentTriple{4.0, 4.0, 0.0}};
  std::optional<double> teo2_a;
  std::optional<double> teo2_b;
  double epsilon = 0.1;

  std::filesystem::path output_dir = "out";
  InfimumScanPolicy scan;
  InitialDataSpec initial;
  std::optional<MultiplicityTable> multiplicities;
  ValidationSpec validation;

  std::uint64_t seed = 20240611;
  int threads = 0;  // 0: available parallelism
};

// Parses and validates a YAML run configuration. Unknown keys are rejected.
// Errors carry the line and column of the offending node.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Throws a configuration error describing every violated cross-field rule.
void validate_config(const RunConfig& config);

// The selected angular eigenvalues (as modes), in a deterministic order.
std::vector<ModeIndex> selected_modes(const RunConfig& config);

}  // namespace warpdirac
