#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fimform/geom.hpp"
#include "fimform/radio.hpp"
#include "fimform/sensing.hpp"

namespace fimform {

/// Discretized search space around the target. Angles in radians.
struct GridSpec {
  double d_min = 10.0;
  double d_max = 10.0;
  double d_step = 1.0;
  double beta_min = 0.0;
  double beta_max = deg2rad(350.0);
  double beta_step = deg2rad(10.0);
  double delta_min = deg2rad(10.0);
  double delta_max = deg2rad(170.0);
  double delta_step = deg2rad(10.0);
  /// Placements whose elevation above/below the target exceeds this are
  /// dropped (the target must stay inside the vertical FOV of a level UAV).
  double max_elevation = deg2rad(90.0);
  std::size_t n_max = 12;

  void validate() const;
};

struct AllocWeights {
  double alpha1 = 0.18;
  double alpha2 = 0.2;
  double rho = 0.17;
  double eps = kDefaultLogdetEps;

  void validate() const;
};

struct Candidate {
  std::size_t id = 0;  // position in grid enumeration order
  SphericalPlacement placement;
  Pose pose;
  Fim fim;
};

struct Grid {
  std::vector<Candidate> candidates;
  std::size_t degenerate = 0;      // vertically aligned, yaw undefined
  std::size_t out_of_view = 0;     // outside the elevation band
};

/// Distances x azimuths x pitches x {camera, lidar}, yaw facing the target.
Grid build_grid(const GridSpec& spec, const Vec3& target, const SensorModels& models);

/// Builds a candidate from an explicit placement (used by tests and oracles).
Candidate make_candidate(std::size_t id, const SphericalPlacement& placement, Sensor sensor,
                         const Vec3& target, const SensorModels& models);

/// f(U) = log det(sum of FIMs + eps I).
double set_value(std::span<const Candidate> all, std::span<const std::size_t> selected, double eps);

double marginal_gain(const Candidate& v, const Fim& selected_fim, double eps);

double utility(const Candidate& v, const Fim& selected_fim, const AllocWeights& w,
               const ResourceModel& rm);

/// Penalized objective J(U).
double objective(std::span<const Candidate> all, std::span<const std::size_t> selected,
                 const AllocWeights& w, const ResourceModel& rm);

struct GreedyRound {
  std::size_t candidate_id = 0;
  double gain = 0.0;
  double utility = 0.0;
  double value = 0.0;  // f(U_j) after the insertion
};

struct Allocation {
  Formation formation;
  std::vector<std::size_t> selected;  // indices into the candidate list, in order
  std::vector<GreedyRound> rounds;
  double log_det = 0.0;
  std::size_t evaluations = 0;  // utility evaluations performed
};

/// Greedy UAV-sensor selection. Stops when the best utility is <= rho or
/// n_max members are selected. Ties: lower sensor cost, then lower id.
Allocation greedy_select(std::span<const Candidate> candidates, const Vec3& target,
                         const AllocWeights& w, const ResourceModel& rm, std::size_t n_max);

/// Exact maximizer of J over all size-k subsets. Throws when the number of
/// subsets exceeds `max_subsets`.
Allocation exhaustive_oracle(std::span<const Candidate> candidates, const Vec3& target,
                             std::size_t k, const AllocWeights& w, const ResourceModel& rm,
                             std::size_t max_subsets = 1'000'000);

}  // namespace fimform
