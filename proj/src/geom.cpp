#include "fimform/geom.hpp"

#include <algorithm>
#include <cmath>

#include "fimform/error.hpp"

namespace fimform {

namespace {
constexpr double kDegenerateXY = 1e-9;
}

std::string_view to_string(Sensor s) {
  return s == Sensor::Camera ? "camera" : "lidar";
}

Sensor sensor_from_string(std::string_view name) {
  if (name == "camera" || name == "Camera") return Sensor::Camera;
  if (name == "lidar" || name == "LiDAR" || name == "Lidar") return Sensor::Lidar;
  throw ConfigError("unknown sensor '" + std::string(name) + "' (expected camera or lidar)");
}

Vec3 relative_position(const Vec3& uav, const Vec3& target) { return uav - target; }

Vec3 relative_xy(const Vec3& uav, const Vec3& target) {
  Vec3 r = uav - target;
  r.z() = 0.0;
  return r;
}

double wrap_2pi(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi.
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double wrap_pi(double angle) {
  double a = wrap_2pi(angle);
  if (a > kPi) a -= kTwoPi;
  return a;
}

Vec3 spherical_to_cartesian(const SphericalPlacement& p, const Vec3& center) {
  const double horizontal = p.d * std::cos(p.delta);
  return center + Vec3(horizontal * std::cos(p.beta), horizontal * std::sin(p.beta),
                       p.d * std::sin(p.delta));
}

SphericalPlacement cartesian_to_spherical(const Vec3& point, const Vec3& center) {
  const Vec3 r = point - center;
  SphericalPlacement out;
  out.d = r.norm();
  out.beta = wrap_2pi(std::atan2(r.y(), r.x()));
  out.delta = std::atan2(r.z(), std::hypot(r.x(), r.y()));
  return out;
}

double yaw_facing_target(const Vec3& uav, const Vec3& target) {
  const double dx = target.x() - uav.x();
  const double dy = target.y() - uav.y();
  if (std::hypot(dx, dy) < kDegenerateXY) {
    throw DegenerateGeometry("yaw undefined: UAV is vertically aligned with the target");
  }
  return wrap_pi(std::atan2(dy, dx));
}

int sector_index(double theta, int sectors) {
  require(sectors >= 1, "sector count must be >= 1");
  const double width = kTwoPi / sectors;
  const int k = static_cast<int>(std::floor(wrap_2pi(theta) / width));
  return std::clamp(k, 0, sectors - 1);
}

}  // namespace fimform
