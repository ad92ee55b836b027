#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maryland/coeffs.hpp"
#include "maryland/green.hpp"
#include "maryland/newton.hpp"
#include "maryland/resonance.hpp"
#include "maryland/serialize.hpp"
#include "maryland/spectrum.hpp"

namespace maryland::cli {

/// Validation failure with a stable machine-readable code.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string code, const std::string& message) : std::runtime_error(message), code(std::move(code)) {}
  std::string code;
};

struct SpectrumSettings {
  int theta_points = 400;
  int covariance_shifts = 20;
  int diophantine_range = 50;
  double tolerance = 1e-10;
};

struct SeparationSettings {
  int N = 4;
  int R = 3;
  int omega_scale_floor = 2;
  double K2 = 2.0;
  std::vector<double> monte_carlo_deltas{1e-3};
  int monte_carlo_samples = 100;
  int monte_carlo_box_radius = 10;
};

struct ProbeSettings {
  std::vector<int> scales{6, 10};
  int sigma_samples = 2000;
  double sigma_lo = -10.0;
  double sigma_hi = 10.0;
  std::vector<IntVec> j0;
  double rate = 0.5;
  bool hilbert_schmidt = false;
};

struct ExperimentConfig {
  MarylandParams model;
  int box_radius = 15;
  ResonantSet anchors;
  SolverConfig solver;
  SpectrumSettings spectrum;
  SeparationSettings separation;
  ProbeSettings probes;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output_directory = "run";
  long long mode_cap = kDefaultModeCap;
};

/// Parse and validate. Throws ConfigError with one of the codes listed in the README.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Every field, defaults included.
Json config_json(const ExperimentConfig& c);

}  // namespace maryland::cli
