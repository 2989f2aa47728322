#include "fimform/alloc.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fimform/error.hpp"

namespace fimform {

namespace {

constexpr double kTieTolerance = 1e-9;
constexpr double kColocated = 1e-6;
constexpr double kAngleSlack = 1e-9;

std::size_t steps_in(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double penalty(Sensor s, const AllocWeights& w, const ResourceModel& rm) {
  return w.alpha1 * comm_resource(s, rm) + w.alpha2 * sensor_cost(s, rm);
}

Fim sum_fims(std::span<const Candidate> all, std::span<const std::size_t> selected) {
  Fim f;
  for (std::size_t i : selected) f += all[i].fim;
  return f;
}

}  // namespace

void GridSpec::validate() const {
  require(d_min > 0.0 && d_min <= d_max, "grid distance range must satisfy 0 < d_min <= d_max");
  require(d_step > 0.0 && beta_step > 0.0 && delta_step > 0.0, "grid steps must be positive");
  require(beta_min <= beta_max, "grid azimuth range is empty");
  require(delta_min >= 0.0 && delta_max <= kPi + kAngleSlack && delta_min <= delta_max,
          "grid pitch range must lie in [0, pi]");
  require(max_elevation >= 0.0, "grid max elevation must be non-negative");
  require(n_max >= 1, "grid n_max must be >= 1");
}

void AllocWeights::validate() const {
  require(alpha1 >= 0.0 && alpha2 >= 0.0, "allocation weights must be non-negative");
  require(eps > 0.0, "allocation eps must be positive");
}

Candidate make_candidate(std::size_t id, const SphericalPlacement& placement, Sensor sensor,
                         const Vec3& target, const SensorModels& models) {
  Candidate c;
  c.id = id;
  c.placement = placement;
  c.pose.position = spherical_to_cartesian(placement, target);
  c.pose.yaw = yaw_facing_target(c.pose.position, target);
  c.pose.sensor = sensor;
  c.fim = uav_fim(c.pose, target, models);
  return c;
}

Grid build_grid(const GridSpec& spec, const Vec3& target, const SensorModels& models) {
  spec.validate();
  Grid grid;
  const std::size_t nd = steps_in(spec.d_min, spec.d_max, spec.d_step);
  const std::size_t nb = steps_in(spec.beta_min, spec.beta_max, spec.beta_step);
  const std::size_t np = steps_in(spec.delta_min, spec.delta_max, spec.delta_step);
  std::size_t id = 0;
  for (std::size_t a = 0; a < nd; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t p = 0; p < np; ++p) {
        SphericalPlacement sp{spec.d_min + a * spec.d_step, spec.beta_min + b * spec.beta_step,
                              spec.delta_min + p * spec.delta_step};
        sp.beta = wrap_2pi(sp.beta);
        const Vec3 rel = spherical_to_cartesian(sp, Vec3::Zero());
        const double elevation = std::atan2(std::abs(rel.z()), std::hypot(rel.x(), rel.y()));
        for (Sensor s : {Sensor::Camera, Sensor::Lidar}) {
          const std::size_t this_id = id++;
          if (elevation > spec.max_elevation + kAngleSlack) {
            ++grid.out_of_view;
            continue;
          }
          try {
            grid.candidates.push_back(make_candidate(this_id, sp, s, target, models));
          } catch (const DegenerateGeometry&) {
            ++grid.degenerate;
          }
        }
      }
    }
  }
  if (grid.candidates.empty()) throw ConfigError("candidate grid is empty");
  return grid;
}

double set_value(std::span<const Candidate> all, std::span<const std::size_t> selected,
                 double eps) {
  return logdet_reg(sum_fims(all, selected), eps);
}

double marginal_gain(const Candidate& v, const Fim& selected_fim, double eps) {
  return logdet_reg(selected_fim + v.fim, eps) - logdet_reg(selected_fim, eps);
}

double utility(const Candidate& v, const Fim& selected_fim, const AllocWeights& w,
               const ResourceModel& rm) {
  return marginal_gain(v, selected_fim, w.eps) - penalty(v.pose.sensor, w, rm);
}

double objective(std::span<const Candidate> all, std::span<const std::size_t> selected,
                 const AllocWeights& w, const ResourceModel& rm) {
  double j = set_value(all, selected, w.eps);
  for (std::size_t i : selected) j -= penalty(all[i].pose.sensor, w, rm);
  return j;
}

Allocation greedy_select(std::span<const Candidate> candidates, const Vec3& target,
                         const AllocWeights& w, const ResourceModel& rm, std::size_t n_max) {
  w.validate();
  Allocation out;
  out.formation.target = target;
  std::vector<bool> available(candidates.size(), true);
  Fim current;
  double current_value = logdet_reg(current, w.eps);

  while (out.selected.size() < n_max) {
    std::size_t best = candidates.size();
    double best_u = -std::numeric_limits<double>::infinity();
    double best_gain = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!available[i]) continue;
      const Candidate& c = candidates[i];
      const double gain = logdet_reg(current + c.fim, w.eps) - current_value;
      const double u = gain - penalty(c.pose.sensor, w, rm);
      ++out.evaluations;
      bool take = best == candidates.size() || u > best_u + kTieTolerance;
      if (!take && std::abs(u - best_u) <= kTieTolerance) {
        const Candidate& b = candidates[best];
        const double cc = sensor_cost(c.pose.sensor, rm);
        const double cb = sensor_cost(b.pose.sensor, rm);
        take = cc < cb || (cc == cb && c.id < b.id);
      }
      if (take) {
        best = i;
        best_u = u;
        best_gain = gain;
      }
    }
    if (best == candidates.size() || best_u <= w.rho) break;

    const Candidate& chosen = candidates[best];
    current += chosen.fim;
    current_value = logdet_reg(current, w.eps);
    out.selected.push_back(best);
    out.formation.members.push_back(chosen.pose);
    out.rounds.push_back({chosen.id, best_gain, best_u, current_value});
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if ((candidates[i].pose.position - chosen.pose.position).norm() < kColocated) {
        available[i] = false;
      }
    }
  }
  out.log_det = current_value;
  return out;
}

Allocation exhaustive_oracle(std::span<const Candidate> candidates, const Vec3& target,
                             std::size_t k, const AllocWeights& w, const ResourceModel& rm,
                             std::size_t max_subsets) {
  const std::size_t n = candidates.size();
  require(k <= n, "oracle subset size exceeds candidate count");
  double subsets = 1.0;
  for (std::size_t i = 0; i < k; ++i) subsets = subsets * static_cast<double>(n - i) / (i + 1);
  if (subsets > static_cast<double>(max_subsets)) {
    throw Error(ErrorKind::InvalidArgument,
                "exhaustive oracle would enumerate " + std::to_string(subsets) +
                    " subsets; use a smaller candidate set or k");
  }

  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::size_t> best_idx;
  double best = -std::numeric_limits<double>::infinity();
  Allocation out;
  while (true) {
    const double j = objective(candidates, idx, w, rm);
    ++out.evaluations;
    if (j > best) {
      best = j;
      best_idx = idx;
    }
    // Next combination in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t t = pos; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }

  out.formation.target = target;
  out.selected = best_idx;
  for (std::size_t i : best_idx) out.formation.members.push_back(candidates[i].pose);
  out.log_det = set_value(candidates, best_idx, w.eps);
  return out;
}

}  // namespace fimform
