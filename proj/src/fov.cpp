#include "fimform/fov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "fimform/error.hpp"

namespace fimform {

namespace {

constexpr double kAngleSlack = 1e-9;
constexpr double kImprovement = 1e-12;
constexpr double kLogdetDrift = 1e-6;

double member_log_det(const Formation& f, const SensorModels& models, double eps) {
  return logdet_reg(total_fim(f, models), eps);
}

Formation with_flips(const Formation& f, const std::vector<std::size_t>& members) {
  Formation out = f;
  for (std::size_t i : members) out.members[i] = flip(out.members[i], f.target);
  return out;
}

}  // namespace

void FovSpec::validate() const {
  require(gamma > 0.0 && gamma < kPi, "fov.gamma must lie in (0, 180) degrees");
  require(kappa > 0.0 && kappa < kPi, "fov.kappa must lie in (0, 180) degrees");
  require(d_max > 0.0, "fov.d_max must be positive");
  require(n_dirs >= 4, "fov.n_dirs must be >= 4");
  require(sectors >= 1, "fov.sectors must be >= 1");
  require(lambda >= 0.0, "fov.lambda must be non-negative");
}

bool target_visible(const Pose& pose, const Vec3& target, const FovSpec& spec) {
  const Vec3 to_target = target - pose.position;
  if (to_target.norm() > spec.d_max + kAngleSlack) return false;
  const double horizontal = std::hypot(to_target.x(), to_target.y());
  if (horizontal == 0.0) return false;
  const double bearing = std::atan2(to_target.y(), to_target.x());
  if (std::abs(wrap_pi(bearing - pose.yaw)) > spec.gamma / 2 + kAngleSlack) return false;
  const double elevation = std::atan2(to_target.z(), horizontal);
  return std::abs(elevation) <= spec.kappa / 2 + kAngleSlack;
}

bool direction_covered(int k, const Pose& pose, const Vec3& target, const FovSpec& spec) {
  const Vec3 rel = relative_xy(pose.position, target);
  if (rel.norm() == 0.0) return false;
  const double phi = kTwoPi * k / spec.n_dirs;
  const double bearing = std::atan2(rel.y(), rel.x());
  return std::abs(wrap_pi(phi - bearing)) <= spec.gamma / 2 + kAngleSlack;
}

CoverageReport coverage(const Formation& f, const FovSpec& spec) {
  require(!f.empty(), "coverage needs a non-empty formation");
  CoverageReport r;
  r.per_direction.assign(spec.n_dirs, 0.0);
  std::vector<bool> covered(spec.n_dirs, false);
  for (const Pose& p : f.members) {
    const double weight = 1.0 / (1.0 + spec.lambda * relative_xy(p.position, f.target).norm());
    for (int k = 0; k < spec.n_dirs; ++k) {
      if (direction_covered(k, p, f.target, spec)) {
        r.per_direction[k] += weight;
        covered[k] = true;
      }
    }
  }
  double total = 0.0;
  for (int k = 0; k < spec.n_dirs; ++k) {
    total += r.per_direction[k];
    if (!covered[k]) ++r.uncovered;
  }
  r.xi = 1.0 - static_cast<double>(r.uncovered) / spec.n_dirs;
  r.gamma_metric = r.xi * total;
  return r;
}

Pose flip(const Pose& pose, const Vec3& target) {
  Pose out = pose;
  out.position = 2.0 * target - pose.position;
  out.yaw = wrap_pi(pose.yaw + kPi);
  return out;
}

Formation ground_constrain(const Formation& f) {
  Formation out = f;
  for (Pose& p : out.members) {
    if (p.position.z() < f.target.z()) p.position.z() = 2.0 * f.target.z() - p.position.z();
  }
  return out;
}

double min_link_sinr_db(const Formation& f, const RadioParams& rp) {
  if (f.size() < 2) return std::numeric_limits<double>::infinity();
  return link_stats(f, 0, rp).min_db;
}

FormationOptimization optimize_formation(const Formation& f, const FovSpec& spec,
                                         const SensorModels& models, const RadioParams& rp,
                                         double eps) {
  spec.validate();
  require(!f.empty(), "formation optimization needs a non-empty formation");

  FormationOptimization out;
  out.formation = f;
  out.before = coverage(f, spec);
  out.log_det_before = member_log_det(f, models, eps);
  out.initial_feasible = min_link_sinr_db(f, rp) >= spec.eta_min_db;
  if (f.size() >= 2) out.sinr_before = link_stats(f, 0, rp);

  std::map<int, std::vector<std::size_t>> by_sector;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double theta = yaw_facing_target(f.members[i].position, f.target);
    const int s = sector_index(theta, spec.sectors);
    out.sector_of.push_back(s);
    by_sector[s].push_back(i);
  }
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [sector, members] : by_sector) {
    if (members.size() < 2) continue;
    groups.push_back(members);
    out.gated.insert(out.gated.end(), members.begin(), members.end());
  }
  std::sort(out.gated.begin(), out.gated.end());

  auto record = [&](const Formation& cand, std::vector<std::size_t> flipped, double gamma) {
    const double ld = member_log_det(cand, models, eps);
    if (std::abs(ld - out.log_det_before) > kLogdetDrift) {
      throw Error(ErrorKind::Numeric, "flip changed the total log det beyond tolerance");
    }
    out.steps.push_back({std::move(flipped), gamma, ld, min_link_sinr_db(cand, rp)});
  };

  double best = out.before.gamma_metric;
  out.exact = spec.search == FlipSearch::Exact ||
              (spec.search == FlipSearch::Auto && out.gated.size() <= spec.exact_limit);

  if (out.exact) {
    require(out.gated.size() < 63, "exact flip search over too many gated UAVs");
    const std::uint64_t patterns = std::uint64_t{1} << out.gated.size();
    std::vector<std::size_t> best_set;
    for (std::uint64_t mask = 1; mask < patterns; ++mask) {
      std::vector<std::size_t> set;
      for (std::size_t b = 0; b < out.gated.size(); ++b) {
        if (mask >> b & 1U) set.push_back(out.gated[b]);
      }
      const Formation cand = with_flips(f, set);
      const double g = coverage(cand, spec).gamma_metric;
      if (g > best + kImprovement && min_link_sinr_db(cand, rp) >= spec.eta_min_db) {
        best = g;
        best_set = std::move(set);
      }
    }
    if (!best_set.empty()) {
      out.formation = with_flips(f, best_set);
      out.flipped = best_set;
      record(out.formation, best_set, best);
    }
  } else {
    for (const auto& members : groups) {
      while (true) {
        std::size_t pick = f.size();
        double pick_gamma = best;
        for (std::size_t i : members) {
          Formation cand = out.formation;
          cand.members[i] = flip(cand.members[i], f.target);
          const double g = coverage(cand, spec).gamma_metric;
          if (g > pick_gamma + kImprovement && min_link_sinr_db(cand, rp) >= spec.eta_min_db) {
            pick = i;
            pick_gamma = g;
          }
        }
        if (pick == f.size()) break;
        out.formation.members[pick] = flip(out.formation.members[pick], f.target);
        best = pick_gamma;
        record(out.formation, {pick}, best);
      }
    }
    // A member flipped twice is back where it started.
    for (std::size_t i = 0; i < f.size(); ++i) {
      if ((out.formation.members[i].position - f.members[i].position).norm() > 0.0) {
        out.flipped.push_back(i);
      }
    }
  }

  out.after = coverage(out.formation, spec);
  out.log_det_after = member_log_det(out.formation, models, eps);
  if (f.size() >= 2) out.sinr_after = link_stats(out.formation, 0, rp);
  return out;
}

}  // namespace fimform
