#include "fimform/sensing.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "fimform/error.hpp"

namespace fimform {

namespace {

constexpr double kMinDepth = 1e-9;
constexpr double kMinHorizontal = 1e-9;

double camera_depth(const Pose& pose, const Vec3& target) {
  const Vec3 r = pose.position - target;
  const double z = std::cos(pose.yaw) * r.x() + std::sin(pose.yaw) * r.y();
  if (std::abs(z) < kMinDepth) {
    throw DegenerateGeometry("camera depth vanishes: target lies in the image plane");
  }
  return z;
}

template <int N>
Fim information(const Eigen::Matrix<double, N, 3>& jac, const Eigen::Matrix<double, N, 1>& var) {
  Fim f;
  f.m = jac.transpose() * var.cwiseInverse().asDiagonal() * jac;
  // Symmetrize away round-off from the triple product.
  f.m = 0.5 * (f.m + f.m.transpose()).eval();
  return f;
}

}  // namespace

void CameraIntrinsics::validate() const {
  require(fx > 0.0 && fy > 0.0, "camera focal lengths must be positive");
  require(noise_var.minCoeff() > 0.0, "camera noise variances must be positive");
}

void LidarNoise::validate() const {
  require(noise_var.minCoeff() > 0.0, "lidar noise variances must be positive");
}

Vec2 camera_project(const Pose& pose, const Vec3& target, const CameraIntrinsics& intr) {
  const double z = camera_depth(pose, target);
  const Vec3 r = pose.position - target;
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  return {-intr.fx * (c * r.y() - s * r.x()) / z + intr.cx, -intr.fy * r.z() / z + intr.cy};
}

Mat23 camera_jacobian(const Pose& pose, const Vec3& target, const CameraIntrinsics& intr) {
  const double z = camera_depth(pose, target);
  const Vec3 r = pose.position - target;
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const double z2 = z * z;
  Mat23 o;
  o << -intr.fx * r.y() / z2, intr.fx * r.x() / z2, 0.0,
       -intr.fy * c * r.z() / z2, -intr.fy * s * r.z() / z2, intr.fy / z;
  return o;
}

LidarMeasurement lidar_measure(const Pose& pose, const Vec3& target) {
  const Vec3 r = pose.position - target;
  const double d = r.norm();
  if (d == 0.0) throw DegenerateGeometry("lidar range is zero: UAV coincides with target");
  const double dxy = std::hypot(r.x(), r.y());
  return {d, std::atan2(r.y(), r.x()), std::atan2(r.z(), dxy)};
}

Mat3 lidar_jacobian(const Pose& pose, const Vec3& target) {
  const Vec3 r = pose.position - target;
  const double dxy = std::hypot(r.x(), r.y());
  if (dxy < kMinHorizontal) {
    throw DegenerateGeometry("lidar azimuth undefined: UAV is vertically aligned with target");
  }
  const double d = r.norm();
  const double d2 = d * d;
  const double cb = r.x() / dxy;
  const double sb = r.y() / dxy;
  Mat3 o;
  o << -r.x() / d, -r.y() / d, -r.z() / d,
       sb / dxy, -cb / dxy, 0.0,
       r.z() * cb / d2, r.z() * sb / d2, -dxy / d2;
  return o;
}

Fim uav_fim(const Pose& pose, const Vec3& target, const SensorModels& models) {
  if (pose.sensor == Sensor::Camera) {
    return information<2>(camera_jacobian(pose, target, models.camera), models.camera.noise_var);
  }
  return information<3>(lidar_jacobian(pose, target), models.lidar.noise_var);
}

Fim total_fim(const Formation& formation, const SensorModels& models) {
  Fim total;
  for (const Pose& p : formation.members) total += uav_fim(p, formation.target, models);
  return total;
}

double logdet_reg(const Fim& f, double eps) {
  require(eps > 0.0, "log-det regularizer must be positive");
  const Mat3 a = f.m + eps * Mat3::Identity();
  Eigen::LLT<Mat3> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Numeric, "Cholesky factorization failed in logdet_reg");
  }
  const Mat3& l = llt.matrixLLT();
  return 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)) + std::log(l(2, 2)));
}

}  // namespace fimform
