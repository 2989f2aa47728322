#pragma once

#include <span>

#include "fimform/geom.hpp"

namespace fimform {

struct RadioParams {
  double rho0 = 1e-3;         // gain at the 1 m reference distance
  double alpha = 2.0;         // path-loss exponent
  double tx_power = 0.1;      // W
  double noise_power = 1e-14; // W (-110 dBm)

  void validate() const;
};

struct ResourceModel {
  double bandwidth_cam = 1e6;    // Hz
  double duration_cam = 1e-6;    // s
  double bandwidth_lidar = 1.5e6;
  double duration_lidar = 2e-6;
  double cost_cam = 0.3;
  double cost_lidar = 0.8;

  void validate() const;
};

struct LinkStats {
  double avg_db = 0.0;
  double min_db = 0.0;
};

double dbm_to_watts(double dbm);
double to_db(double ratio);

/// tx_power * rho0 * distance^-alpha.
double received_power(const Vec3& tx, const Vec3& rx, const RadioParams& rp);

/// SINR of the i -> j link; every other node interferes at j.
double sinr(std::size_t i, std::size_t j, std::span<const Vec3> nodes, const RadioParams& rp);

/// Star topology: every member transmits to `receiver`. Averages are taken
/// over the dB values.
LinkStats link_stats(std::span<const Vec3> nodes, std::size_t receiver, const RadioParams& rp);
LinkStats link_stats(const Formation& f, std::size_t receiver, const RadioParams& rp);

/// Time-frequency resource block B * T.
double comm_resource(Sensor s, const ResourceModel& rm);
double sensor_cost(Sensor s, const ResourceModel& rm);

}  // namespace fimform
