#include "fimform/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fimform/error.hpp"

namespace fimform {

void RadioParams::validate() const {
  require(rho0 > 0.0, "radio.rho0 must be positive");
  require(alpha >= 1.0, "radio.alpha must be >= 1");
  require(tx_power > 0.0, "radio.tx_power must be positive");
  require(noise_power > 0.0, "radio.noise_power must be positive");
}

void ResourceModel::validate() const {
  require(bandwidth_cam > 0 && duration_cam > 0 && bandwidth_lidar > 0 && duration_lidar > 0,
          "resource bandwidths and durations must be positive");
  require(bandwidth_lidar * duration_lidar > bandwidth_cam * duration_cam,
          "lidar must consume more time-frequency resource than camera");
  require(cost_cam >= 0.0 && cost_lidar > cost_cam, "lidar cost must exceed camera cost");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

double received_power(const Vec3& tx, const Vec3& rx, const RadioParams& rp) {
  const double d = (tx - rx).norm();
  if (d == 0.0) throw DegenerateGeometry("received power undefined for coincident nodes");
  return rp.tx_power * rp.rho0 * std::pow(d, -rp.alpha);
}

double sinr(std::size_t i, std::size_t j, std::span<const Vec3> nodes, const RadioParams& rp) {
  require(i != j, "sinr needs distinct transmitter and receiver");
  require(i < nodes.size() && j < nodes.size(), "sinr node index out of range");
  double interference = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == i || k == j) continue;
    interference += received_power(nodes[k], nodes[j], rp);
  }
  return received_power(nodes[i], nodes[j], rp) / (interference + rp.noise_power);
}

LinkStats link_stats(std::span<const Vec3> nodes, std::size_t receiver, const RadioParams& rp) {
  require(nodes.size() >= 2, "link statistics need at least two nodes");
  require(receiver < nodes.size(), "receiver index out of range");
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i == receiver) continue;
    const double db = to_db(sinr(i, receiver, nodes, rp));
    sum += db;
    lo = std::min(lo, db);
  }
  return {sum / static_cast<double>(nodes.size() - 1), lo};
}

LinkStats link_stats(const Formation& f, std::size_t receiver, const RadioParams& rp) {
  std::vector<Vec3> nodes;
  nodes.reserve(f.size());
  for (const Pose& p : f.members) nodes.push_back(p.position);
  return link_stats(nodes, receiver, rp);
}

double comm_resource(Sensor s, const ResourceModel& rm) {
  return s == Sensor::Camera ? rm.bandwidth_cam * rm.duration_cam
                             : rm.bandwidth_lidar * rm.duration_lidar;
}

double sensor_cost(Sensor s, const ResourceModel& rm) {
  return s == Sensor::Camera ? rm.cost_cam : rm.cost_lidar;
}

}  // namespace fimform
