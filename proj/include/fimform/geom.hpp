#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace fimform {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

enum class Sensor : std::uint8_t { Camera, Lidar };

std::string_view to_string(Sensor s);
Sensor sensor_from_string(std::string_view name);

/// Spherical placement around a center: range, azimuth and pitch.
/// Pitch is elevation-like on [0, pi]; values above pi/2 fold the horizontal
/// direction back through the center (z = d sin(delta) stays positive).
struct SphericalPlacement {
  double d = 0.0;
  double beta = 0.0;
  double delta = 0.0;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;  // (-pi, pi]
  Sensor sensor = Sensor::Camera;

  bool operator==(const Pose&) const = default;
};

/// Ordered set of UAV poses around a target estimate. The order is the
/// selection order of the allocator; member 0 is the formation leader.
struct Formation {
  Vec3 target = Vec3::Zero();
  std::vector<Pose> members;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
};

Vec3 relative_position(const Vec3& uav, const Vec3& target);
Vec3 relative_xy(const Vec3& uav, const Vec3& target);

/// Wraps into [0, 2pi).
double wrap_2pi(double angle);
/// Wraps into (-pi, pi].
double wrap_pi(double angle);

Vec3 spherical_to_cartesian(const SphericalPlacement& p, const Vec3& center);

/// Recovers (d, beta, delta) with delta in [0, pi/2] (the principal chart).
SphericalPlacement cartesian_to_spherical(const Vec3& point, const Vec3& center);

/// Heading that points the boresight at the target. Throws
/// DegenerateGeometry when the UAV is vertically aligned with the target.
double yaw_facing_target(const Vec3& uav, const Vec3& target);

/// Index of the equal-width azimuth sector containing theta, in [0, sectors).
int sector_index(double theta, int sectors);

}  // namespace fimform
