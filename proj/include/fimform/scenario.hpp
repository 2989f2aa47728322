#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fimform/alloc.hpp"
#include "fimform/flight.hpp"
#include "fimform/fov.hpp"
#include "fimform/radio.hpp"
#include "fimform/sensing.hpp"

namespace fimform {

using Triple = std::array<double, 3>;

/// Scenario values exactly as written in the file (degrees, dBm, noise
/// standard deviations). Conversion to module units happens in the
/// accessor functions, so serialization round-trips bit-for-bit.
struct Scenario {
  std::string name = "scenario";
  std::string notes;
  std::uint64_t seed = 1;

  struct Target {
    Triple position{0, 0, 0};
    Triple velocity{0, 0, 0};
    bool ground = false;
  } target;

  struct Sensors {
    double fx = 381, fy = 381, cx = 320, cy = 240;
    std::array<double, 2> camera_noise_sigma{6, 6};
    Triple lidar_noise_sigma{0.1, 0.02, 0.015};
  } sensors;

  struct Grid {
    double d_min = 10, d_max = 10, d_step = 1;
    double beta_min_deg = 0, beta_max_deg = 350, beta_step_deg = 10;
    double delta_min_deg = 10, delta_max_deg = 170, delta_step_deg = 10;
    double max_elevation_deg = 90;
    std::size_t n_max = 12;
  } grid;

  AllocWeights weights;

  ResourceModel resources;

  struct Radio {
    double rho0 = 1e-3;
    double alpha = 2;
    double tx_power_w = 0.1;
    double noise_power_dbm = -110;
  } radio;

  struct Fov {
    double gamma_deg = 50, kappa_deg = 40, d_max = 30;
    int n_dirs = 72;
    double lambda = 0.1;
    int sectors = 8;
    double eta_min_db = -10;
    std::string search = "auto";
    std::size_t exact_limit = 16;
  } fov;

  struct Flight {
    std::vector<std::string> controllers{"log"};
    std::string integrator = "euler";
    double dt = 0.01;
    double horizon = 60;
    double k1 = 4, k2 = 1.5, kp = 10;
    std::vector<double> masses;
    std::size_t leader = 0;
    std::vector<std::vector<int>> adjacency;
    ApfParams apf;
    double init_cube = 30;
    std::size_t runs = 1;
    std::size_t trace_every = 1;
  } flight;

  Vec3 target_position() const;
  Vec3 target_velocity() const;
  SensorModels sensor_models() const;
  GridSpec grid_spec() const;
  RadioParams radio_params() const;
  FovSpec fov_spec() const;
  ControlGains control_gains(std::size_t n) const;
  std::vector<Controller> flight_controllers() const;
  SimulationSettings simulation(Controller c) const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario(const std::filesystem::path& path);
/// Canonical JSON text: sorted keys, two-space indent, trailing newline.
std::string serialize_scenario(const Scenario& s);

/// Explicit pose list for eval-fim.
struct FormationDocument {
  Formation formation;
  SensorModels models;
  double eps = kDefaultLogdetEps;
};

FormationDocument parse_formation_text(const std::string& text);
FormationDocument parse_formation(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace fimform
