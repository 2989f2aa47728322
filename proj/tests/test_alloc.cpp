#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fimform/alloc.hpp"
#include "fimform/error.hpp"
#include "oracles.hpp"

using namespace fimform;

namespace {

GridSpec paper_grid() {
  GridSpec g;
  g.max_elevation = deg2rad(20.0);
  return g;
}

std::vector<Candidate> random_candidates(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(3, 25), b(0, kTwoPi), e(0.05, 1.2), coin(0, 1);
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    const SphericalPlacement sp{d(rng), b(rng), e(rng)};
    const Sensor s = coin(rng) < 0.5 ? Sensor::Camera : Sensor::Lidar;
    out.push_back(make_candidate(i, sp, s, Vec3::Zero(), SensorModels{}));
  }
  return out;
}

}  // namespace

TEST_SUITE("alloc") {

TEST_CASE("grid cardinality and facing yaw") {
  GridSpec g;
  g.beta_min = 0;
  g.beta_max = deg2rad(10);
  g.delta_min = g.delta_max = deg2rad(20);
  const Grid grid = build_grid(g, Vec3::Zero(), SensorModels{});
  CHECK(grid.candidates.size() == 4);

  const Grid full = build_grid(GridSpec{}, Vec3(1, 2, 0), SensorModels{});
  CHECK(full.degenerate == 2 * 36);  // delta = 90 deg at every azimuth
  for (const Candidate& c : full.candidates) {
    CHECK(c.pose.yaw == doctest::Approx(yaw_facing_target(c.pose.position, Vec3(1, 2, 0))));
  }
  for (const oracle::Row& r : oracle::reference_rows()) {
    const bool found = std::any_of(full.candidates.begin(), full.candidates.end(), [&](const Candidate& c) {
      return std::abs(rad2deg(c.placement.beta) - r.beta_deg) < 1e-6 &&
             std::abs(rad2deg(c.placement.delta) - r.delta_deg) < 1e-6;
    });
    CHECK(found);
  }
}

TEST_CASE("elevation band") {
  const Grid grid = build_grid(paper_grid(), Vec3::Zero(), SensorModels{});
  CHECK(grid.candidates.size() == 36 * 4 * 2);
  GridSpec none = paper_grid();
  none.max_elevation = deg2rad(5);
  CHECK_THROWS_AS(build_grid(none, Vec3::Zero(), SensorModels{}), ConfigError);
}

TEST_CASE("marginal gain and utility") {
  const SensorModels m;
  const Candidate v = make_candidate(0, {10, 0, deg2rad(20)}, Sensor::Lidar, Vec3::Zero(), m);
  const double eps = 1e-6;
  Fim empty;
  CHECK(marginal_gain(v, empty, eps) ==
        doctest::Approx(logdet_reg(v.fim, eps) - 3 * std::log(eps)));
  const double second = marginal_gain(v, v.fim, eps);
  CHECK(second > 0.0);
  CHECK(second < marginal_gain(v, empty, eps));

  AllocWeights zero;
  zero.alpha1 = zero.alpha2 = 0;
  const ResourceModel rm;
  CHECK(utility(v, empty, zero, rm) == doctest::Approx(marginal_gain(v, empty, eps)));

  Candidate cam = v, lid = v;
  cam.pose.sensor = Sensor::Camera;
  CHECK(utility(cam, empty, AllocWeights{}, rm) > utility(lid, empty, AllocWeights{}, rm));
}

TEST_CASE("greedy on the default grid") {
  const SensorModels m;
  const Grid grid = build_grid(paper_grid(), Vec3::Zero(), m);
  const Allocation a = greedy_select(grid.candidates, Vec3::Zero(), AllocWeights{}, ResourceModel{}, 12);
  REQUIRE(a.formation.size() == 6);
  const auto lidars = std::count_if(a.formation.members.begin(), a.formation.members.end(),
                                    [](const Pose& p) { return p.sensor == Sensor::Lidar; });
  CHECK(lidars == 2);
  CHECK(a.formation.members.front().sensor == Sensor::Lidar);
  CHECK(a.log_det == doctest::Approx(16.481957).epsilon(1e-6));
  for (std::size_t j = 1; j < a.rounds.size(); ++j) {
    CHECK(a.rounds[j].gain <= a.rounds[j - 1].gain);
    CHECK(a.rounds[j].value >= a.rounds[j - 1].value);
  }
  CHECK(a.rounds[0].gain == doctest::Approx(53.189).epsilon(1e-4));
}

TEST_CASE("greedy stops on threshold and cap") {
  const Grid grid = build_grid(paper_grid(), Vec3::Zero(), SensorModels{});
  AllocWeights w;
  w.rho = std::numeric_limits<double>::infinity();
  CHECK(greedy_select(grid.candidates, Vec3::Zero(), w, ResourceModel{}, 12).selected.empty());
  CHECK(greedy_select(grid.candidates, Vec3::Zero(), AllocWeights{}, ResourceModel{}, 3).selected.size() == 3);
}

TEST_CASE("greedy is invariant under candidate permutation") {
  const Grid grid = build_grid(paper_grid(), Vec3::Zero(), SensorModels{});
  std::vector<Candidate> shuffled = grid.candidates;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const Allocation a = greedy_select(grid.candidates, Vec3::Zero(), AllocWeights{}, ResourceModel{}, 12);
  const Allocation b = greedy_select(shuffled, Vec3::Zero(), AllocWeights{}, ResourceModel{}, 12);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t j = 0; j < a.rounds.size(); ++j) {
    CHECK(a.rounds[j].candidate_id == b.rounds[j].candidate_id);
  }
}

TEST_CASE("exhaustive oracle") {
  std::mt19937_64 rng(4);
  const auto cands = random_candidates(rng, 4);
  const Allocation all = exhaustive_oracle(cands, Vec3::Zero(), 4, AllocWeights{}, ResourceModel{});
  CHECK(all.selected == std::vector<std::size_t>{0, 1, 2, 3});
  const auto big = random_candidates(rng, 60);
  CHECK_THROWS(exhaustive_oracle(big, Vec3::Zero(), 30, AllocWeights{}, ResourceModel{}));
  // Reported optimum of the paper-scale search against the greedy value.
  CHECK(16.482 >= (1 - 1 / std::exp(1.0)) * 19.884);
}

TEST_CASE("greedy within 1-1/e of the oracle") {
  std::mt19937_64 rng(21);
  AllocWeights w;
  w.alpha1 = w.alpha2 = 0;
  w.rho = -std::numeric_limits<double>::infinity();
  const ResourceModel rm;
  for (int t = 0; t < 10; ++t) {
    const auto cands = random_candidates(rng, 12);
    const std::size_t k = 3;
    const double base = 3 * std::log(w.eps);
    const Allocation g = greedy_select(cands, Vec3::Zero(), w, rm, k);
    const Allocation o = exhaustive_oracle(cands, Vec3::Zero(), k, w, rm);
    CHECK(g.log_det - base >= (1 - 1 / std::exp(1.0)) * (o.log_det - base));
    CHECK(g.log_det <= o.log_det + 1e-9);
  }
}

TEST_CASE("monotone and submodular on sampled triples") {
  std::mt19937_64 rng(8);
  const double eps = 1e-6;
  for (int t = 0; t < 50; ++t) {
    const auto cands = random_candidates(rng, 8);
    std::vector<std::size_t> T, S;
    for (std::size_t i = 0; i < 7; ++i) {
      if (rng() % 2) {
        T.push_back(i);
        if (rng() % 2) S.push_back(i);
      }
    }
    std::vector<std::size_t> Sv = S, Tv = T;
    Sv.push_back(7);
    Tv.push_back(7);
    const double fS = set_value(cands, S, eps), fT = set_value(cands, T, eps);
    CHECK(fT >= fS - 1e-9);
    CHECK(set_value(cands, Sv, eps) - fS >= set_value(cands, Tv, eps) - fT - 1e-9);
  }
}

}
