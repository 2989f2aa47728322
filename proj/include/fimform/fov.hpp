#pragma once

#include <cstddef>
#include <vector>

#include "fimform/geom.hpp"
#include "fimform/radio.hpp"
#include "fimform/sensing.hpp"

namespace fimform {

enum class FlipSearch { Auto, Greedy, Exact };

struct FovSpec {
  double gamma = deg2rad(50.0);  // horizontal FOV
  double kappa = deg2rad(40.0);  // vertical FOV
  double d_max = 30.0;
  int n_dirs = 72;
  double lambda = 0.1;  // 1/m
  int sectors = 8;
  double eta_min_db = -10.0;
  FlipSearch search = FlipSearch::Auto;
  /// Auto mode enumerates all flip patterns up to this many gated UAVs.
  std::size_t exact_limit = 16;

  void validate() const;
};

struct CoverageReport {
  double gamma_metric = 0.0;  // xi * sum(intensity)
  double xi = 0.0;
  int uncovered = 0;
  std::vector<double> per_direction;
};

bool target_visible(const Pose& pose, const Vec3& target, const FovSpec& spec);

/// Direction k of n_dirs is covered when the UAV's horizontal bearing from the
/// target lies within gamma/2 of it.
bool direction_covered(int k, const Pose& pose, const Vec3& target, const FovSpec& spec);

CoverageReport coverage(const Formation& f, const FovSpec& spec);

/// Point reflection through the target; yaw turned by pi; sensor kept.
Pose flip(const Pose& pose, const Vec3& target);

/// Reflects members below the target plane back above it (x, y, yaw kept).
Formation ground_constrain(const Formation& f);

/// Minimum star-topology link SINR towards member 0, dB. +inf below two members.
double min_link_sinr_db(const Formation& f, const RadioParams& rp);

struct FlipStep {
  std::vector<std::size_t> flipped;  // members flipped by this step
  double gamma_metric = 0.0;
  double log_det = 0.0;
  double min_sinr_db = 0.0;
};

struct FormationOptimization {
  Formation formation;
  CoverageReport before;
  CoverageReport after;
  LinkStats sinr_before;
  LinkStats sinr_after;
  double log_det_before = 0.0;
  double log_det_after = 0.0;
  bool initial_feasible = true;
  bool exact = false;
  std::vector<int> sector_of;         // per member
  std::vector<std::size_t> gated;     // members sharing a sector
  std::vector<std::size_t> flipped;   // members flipped in the result
  std::vector<FlipStep> steps;
};

/// Sector-gated flip search maximizing coverage subject to the min-link SINR
/// bound. Every flip leaves the member's FIM unchanged, so total log det is
/// preserved; a violation beyond 1e-6 is reported as a numeric error.
FormationOptimization optimize_formation(const Formation& f, const FovSpec& spec,
                                         const SensorModels& models, const RadioParams& rp,
                                         double eps = kDefaultLogdetEps);

}  // namespace fimform
