// Independent reference computations used by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fimform/fov.hpp"
#include "fimform/geom.hpp"
#include "fimform/radio.hpp"
#include "fimform/sensing.hpp"

namespace oracle {

using fimform::Formation;
using fimform::Pose;
using fimform::Sensor;
using fimform::Vec3;

struct Row {
  Sensor sensor;
  double beta_deg;
  double delta_deg;
};

// The six-UAV reference formation around a target at the origin, range 10 m.
inline const std::vector<Row>& reference_rows() {
  static const std::vector<Row> rows = {
      {Sensor::Lidar, 40, 160},  {Sensor::Lidar, 130, 20},  {Sensor::Camera, 0, 160},
      {Sensor::Camera, 100, 20}, {Sensor::Camera, 50, 160}, {Sensor::Camera, 140, 160},
  };
  return rows;
}

inline Vec3 sph(double d, double beta, double delta) {
  return d * Vec3(std::cos(delta) * std::cos(beta), std::cos(delta) * std::sin(beta),
                  std::sin(delta));
}

inline Formation reference_formation(const Vec3& target = Vec3::Zero()) {
  Formation f;
  f.target = target;
  for (const Row& r : reference_rows()) {
    Pose p;
    p.position = target + sph(10.0, fimform::deg2rad(r.beta_deg), fimform::deg2rad(r.delta_deg));
    p.yaw = std::atan2(target.y() - p.position.y(), target.x() - p.position.x());
    p.sensor = r.sensor;
    f.members.push_back(p);
  }
  return f;
}

// Central differences of a vector function of the target position.
template <int Rows>
Eigen::Matrix<double, Rows, 3> numeric_jacobian(
    const std::function<Eigen::Matrix<double, Rows, 1>(const Vec3&)>& fn, const Vec3& x,
    double h = 1e-6) {
  Eigen::Matrix<double, Rows, 3> J;
  for (int c = 0; c < 3; ++c) {
    Vec3 a = x, b = x;
    a[c] += h;
    b[c] -= h;
    J.col(c) = (fn(a) - fn(b)) / (2 * h);
  }
  return J;
}

// 3x3 log det by cofactor expansion, no factorization.
inline double logdet_cofactor(const fimform::Mat3& F, double eps) {
  const fimform::Mat3 A = F + eps * fimform::Mat3::Identity();
  const double det = A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
                     A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
                     A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
  return std::log(det);
}

// Coverage via the arccos rule, written independently of the library.
inline double gamma_bruteforce(const Formation& f, int n_dirs, double gamma, double lambda) {
  std::vector<double> phi(n_dirs, 0.0);
  std::vector<bool> cov(n_dirs, false);
  for (const Pose& p : f.members) {
    const double rx = p.position.x() - f.target.x();
    const double ry = p.position.y() - f.target.y();
    const double dxy = std::hypot(rx, ry);
    if (dxy == 0.0) continue;
    for (int k = 0; k < n_dirs; ++k) {
      const double a = 2 * fimform::kPi * k / n_dirs;
      const double c = std::clamp((std::cos(a) * rx + std::sin(a) * ry) / dxy, -1.0, 1.0);
      if (std::acos(c) <= gamma / 2 + 1e-9) {
        phi[k] += 1.0 / (1.0 + lambda * dxy);
        cov[k] = true;
      }
    }
  }
  double sum = 0.0;
  int covered = 0;
  for (int k = 0; k < n_dirs; ++k) {
    sum += phi[k];
    covered += cov[k] ? 1 : 0;
  }
  return static_cast<double>(covered) / n_dirs * sum;
}

inline Pose point_reflect(const Pose& p, const Vec3& target) {
  Pose q = p;
  q.position = 2.0 * target - p.position;
  q.yaw = std::atan2(target.y() - q.position.y(), target.x() - q.position.x());
  return q;
}

// Best coverage over every flip pattern of the sector-gated members that keeps
// the min-link SINR at or above the bound.
inline double flip_oracle(const Formation& f, const fimform::FovSpec& spec,
                          const fimform::RadioParams& rp) {
  std::vector<int> sector(f.size());
  std::vector<int> count(spec.sectors, 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3& p = f.members[i].position;
    double th = std::atan2(f.target.y() - p.y(), f.target.x() - p.x());
    if (th < 0) th += 2 * fimform::kPi;
    sector[i] = std::min(static_cast<int>(th / (2 * fimform::kPi / spec.sectors)), spec.sectors - 1);
    ++count[sector[i]];
  }
  std::vector<std::size_t> gated;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (count[sector[i]] >= 2) gated.push_back(i);
  }
  double best = gamma_bruteforce(f, spec.n_dirs, spec.gamma, spec.lambda);
  for (unsigned mask = 1; mask < (1U << gated.size()); ++mask) {
    Formation g = f;
    for (std::size_t b = 0; b < gated.size(); ++b) {
      if (mask >> b & 1U) g.members[gated[b]] = point_reflect(g.members[gated[b]], f.target);
    }
    if (fimform::min_link_sinr_db(g, rp) < spec.eta_min_db) continue;
    best = std::max(best, gamma_bruteforce(g, spec.n_dirs, spec.gamma, spec.lambda));
  }
  return best;
}

inline Pose random_pose(std::mt19937_64& rng, Sensor s, const Vec3& target,
                        double yaw_jitter = 0.0) {
  std::uniform_real_distribution<double> r(2.0, 30.0), ang(-fimform::kPi, fimform::kPi),
      el(-1.2, 1.2), jitter(-yaw_jitter, yaw_jitter);
  Pose p;
  const double d = r(rng), b = ang(rng), e = el(rng);
  p.position = target + sph(d, b, e);
  p.yaw = std::atan2(target.y() - p.position.y(), target.x() - p.position.x()) +
           (yaw_jitter > 0.0 ? jitter(rng) : 0.0);
  p.sensor = s;
  return p;
}

}  // namespace oracle
