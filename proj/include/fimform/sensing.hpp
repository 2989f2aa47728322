#pragma once

#include <Eigen/Core>

#include "fimform/geom.hpp"

namespace fimform {

using Mat23 = Eigen::Matrix<double, 2, 3>;
using Vec2 = Eigen::Vector2d;

struct CameraIntrinsics {
  double fx = 381.0;
  double fy = 381.0;
  double cx = 320.0;
  double cy = 240.0;
  /// Pixel noise covariance (diagonal), px^2.
  Vec2 noise_var = Vec2(36.0, 36.0);

  void validate() const;
};

struct LidarNoise {
  /// Diagonal covariance: range (m^2), azimuth (rad^2), pitch (rad^2).
  Vec3 noise_var = Vec3(0.01, 0.0004, 0.000225);

  void validate() const;
};

struct SensorModels {
  CameraIntrinsics camera;
  LidarNoise lidar;
};

/// Fisher information about the 3-D target position.
struct Fim {
  Mat3 m = Mat3::Zero();

  Fim& operator+=(const Fim& other) {
    m += other.m;
    return *this;
  }
  friend Fim operator+(Fim a, const Fim& b) { return a += b; }
};

struct LidarMeasurement {
  double range = 0.0;
  double azimuth = 0.0;
  double pitch = 0.0;
};

/// Noiseless pixel coordinates of the target, signs as in the pinhole model
/// with depth Z = cos(yaw)(x_i - x_t) + sin(yaw)(y_i - y_t).
Vec2 camera_project(const Pose& pose, const Vec3& target, const CameraIntrinsics& intr);

/// d(u, v)/d(target position).
Mat23 camera_jacobian(const Pose& pose, const Vec3& target, const CameraIntrinsics& intr);

LidarMeasurement lidar_measure(const Pose& pose, const Vec3& target);

/// d(range, azimuth, pitch)/d(target position).
Mat3 lidar_jacobian(const Pose& pose, const Vec3& target);

Fim uav_fim(const Pose& pose, const Vec3& target, const SensorModels& models);

/// Sum of member FIMs in member order.
Fim total_fim(const Formation& formation, const SensorModels& models);

/// log det(F + eps I) via Cholesky.
double logdet_reg(const Fim& f, double eps);

inline constexpr double kDefaultLogdetEps = 1e-6;

}  // namespace fimform
