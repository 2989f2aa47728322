#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <random>

#include "fimform/error.hpp"
#include "fimform/sensing.hpp"
#include "oracles.hpp"

using namespace fimform;

namespace {

Pose at(const Vec3& p, double yaw, Sensor s = Sensor::Camera) { return Pose{p, yaw, s}; }

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST_SUITE("sensing") {

TEST_CASE("camera projection") {
  const CameraIntrinsics intr;
  CHECK(camera_project(at({-10, 0, 0}, 0), Vec3::Zero(), intr).isApprox(Vec2(320, 240)));
  const Vec2 uv = camera_project(at({-10, 0, 3.4}, 0), Vec3::Zero(), intr);
  CHECK(uv.x() == doctest::Approx(320));
  CHECK(uv.y() == doctest::Approx(240 + 129.54));
  CHECK(camera_project(at({0, -10, 0}, kPi / 2), Vec3::Zero(), intr).isApprox(Vec2(320, 240)));
  CHECK_THROWS_AS(camera_project(at({0, -10, 0}, 0), Vec3::Zero(), intr), DegenerateGeometry);
}

TEST_CASE("camera jacobian closed form") {
  const CameraIntrinsics intr;
  const Mat23 J = camera_jacobian(at({-10, 0, 0}, 0), Vec3::Zero(), intr);
  Mat23 expect;
  expect << 0, -38.1, 0, 0, 0, -38.1;
  CHECK(rel_err(J, expect) < 1e-12);
  const Mat23 Jz = camera_jacobian(at({-10, 0, 3.4}, 0), Vec3::Zero(), intr);
  CHECK(Jz(1, 2) == doctest::Approx(intr.fy / -10.0));
}

TEST_CASE("jacobians match central differences") {
  std::mt19937_64 rng(11);
  const CameraIntrinsics intr;
  for (int i = 0; i < 200; ++i) {
    const Vec3 target(1, -2, 0.5);
    const Pose c = oracle::random_pose(rng, Sensor::Camera, target, 0.3);
    const auto num_c = oracle::numeric_jacobian<2>(
        [&](const Vec3& t) { return Eigen::Vector2d(camera_project(c, t, intr)); }, target);
    CHECK(rel_err(camera_jacobian(c, target, intr), num_c) < 1e-5);

    const Pose l = oracle::random_pose(rng, Sensor::Lidar, target, 0.3);
    const auto num_l = oracle::numeric_jacobian<3>(
        [&](const Vec3& t) {
          const LidarMeasurement m = lidar_measure(l, t);
          return Vec3(m.range, m.azimuth, m.pitch);
        },
        target);
    CHECK(rel_err(lidar_jacobian(l, target), num_l) < 1e-5);
  }
}

TEST_CASE("lidar measurement") {
  CHECK(lidar_measure(at({3, 4, 0}, 0), Vec3::Zero()).range == doctest::Approx(5));
  CHECK(lidar_measure(at({1, 1, 0}, 0), Vec3::Zero()).azimuth == doctest::Approx(kPi / 4));
  CHECK(lidar_measure(at({0, 3, 4}, 0), Vec3::Zero()).pitch == doctest::Approx(std::atan(4.0 / 3)));
  CHECK_THROWS(lidar_measure(at({0, 0, 0}, 0), Vec3::Zero()));
}

TEST_CASE("lidar jacobian rows") {
  const Mat3 J = lidar_jacobian(at({7, 0, 0}, kPi), Vec3::Zero());
  CHECK(J.row(0).isApprox(Eigen::RowVector3d(-1, 0, 0)));
  const Mat3 K = lidar_jacobian(at({0, 3, 4}, -kPi / 2), Vec3::Zero());
  CHECK(K(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(K(1, 1) == doctest::Approx(0.0));
  CHECK(K(1, 2) == doctest::Approx(0.0));
  CHECK_THROWS_AS(lidar_jacobian(at({0, 0, 4}, 0), Vec3::Zero()), DegenerateGeometry);
}

TEST_CASE("per-UAV FIM") {
  SensorModels m;
  m.lidar.noise_var = Vec3(0.1, 0.02, 0.015);
  const Fim f = uav_fim(at({10, 0, 0}, kPi, Sensor::Lidar), Vec3::Zero(), m);
  CHECK(f.m(0, 0) == doctest::Approx(10.0));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    for (Sensor s : {Sensor::Camera, Sensor::Lidar}) {
      const Fim g = uav_fim(oracle::random_pose(rng, s, Vec3::Zero(), 0.2), Vec3::Zero(), SensorModels{});
      CHECK((g.m - g.m.transpose()).norm() <= 1e-12 * std::max(1.0, g.m.norm()));
      Eigen::SelfAdjointEigenSolver<Mat3> es(g.m);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, g.m.norm()));
      if (s == Sensor::Camera) {
        Eigen::FullPivLU<Mat3> lu(g.m);
        lu.setThreshold(1e-10);
        CHECK(lu.rank() <= 2);
      }
    }
  }
}

TEST_CASE("total FIM and log det") {
  const SensorModels m;
  CHECK(total_fim(Formation{}, m).m.isZero());
  Formation two;
  two.members = {at({-10, 0, 3}, 0, Sensor::Lidar), at({-10, 0, 3}, 0, Sensor::Lidar)};
  CHECK(total_fim(two, m).m.isApprox(2 * uav_fim(two.members[0], Vec3::Zero(), m).m));

  Fim zero;
  CHECK(logdet_reg(zero, 1e-6) == doctest::Approx(3 * std::log(1e-6)));
  Fim d;
  d.m = Vec3(1, 2, 3).asDiagonal();
  CHECK(logdet_reg(d, 1e-12) == doctest::Approx(std::log(6.0)));
  CHECK_THROWS(logdet_reg(d, 0.0));

  const Formation ref = oracle::reference_formation();
  const double ld = logdet_reg(total_fim(ref, m), kDefaultLogdetEps);
  CHECK(ld == doctest::Approx(16.48196).epsilon(1e-5));
  CHECK(ld == doctest::Approx(oracle::logdet_cofactor(total_fim(ref, m).m, kDefaultLogdetEps)));
}

TEST_CASE("log det is monotone under PSD additions") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 200; ++i) {
    Mat3 a, b;
    for (int k = 0; k < 9; ++k) {
      a(k / 3, k % 3) = n(rng);
      b(k / 3, k % 3) = n(rng);
    }
    Fim F, G;
    F.m = a * a.transpose();
    G.m = b.col(0) * b.col(0).transpose();
    CHECK(logdet_reg(F + G, 1e-6) >= logdet_reg(F, 1e-6) - 1e-12);
  }
}

}
