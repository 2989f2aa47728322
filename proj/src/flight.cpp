#include "fimform/flight.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fimform/error.hpp"

namespace fimform {

namespace {

void check_sizes(const SwarmState& s, const FormationPlan& plan) {
  require(s.positions.size() == s.velocities.size(), "swarm state has mismatched lengths");
  require(s.positions.size() == plan.size(), "swarm and formation plan differ in size");
}

// Pairwise and damping terms shared by the two Lyapunov controllers.
template <class EdgeTerm>
std::vector<Vec3> consensus_control(const SwarmState& s, const FormationPlan& plan,
                                    const ControlGains& g, EdgeTerm edge) {
  check_sizes(s, plan);
  const Vec3 vt = plan.target_velocity;
  std::vector<Vec3> u(s.size(), Vec3::Zero());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j || !g.linked(i, j)) continue;
      u[i] -= g.k1 * edge(formation_error(s, plan, i, j));
    }
    u[i] -= g.k2 * (s.velocities[i] - vt);
  }
  const std::size_t L = g.leader;
  u[L] -= g.kp * (s.positions[L] - plan.desired(L, s.time));
  return u;
}

double uniform01(std::mt19937_64& rng) {
  // 53 random bits; std::uniform_real_distribution is not portable bit-for-bit.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(Controller c) {
  switch (c) {
    case Controller::Log: return "log";
    case Controller::Quad: return "quad";
    case Controller::Apf: return "apf";
  }
  return "log";
}

Controller controller_from_string(std::string_view name) {
  if (name == "log") return Controller::Log;
  if (name == "quad") return Controller::Quad;
  if (name == "apf") return Controller::Apf;
  throw ConfigError("unknown controller '" + std::string(name) + "' (expected log|quad|apf)");
}

bool ControlGains::linked(std::size_t i, std::size_t j) const {
  return adjacency.empty() ? i != j : adjacency[i][j] != 0;
}

void ControlGains::validate(std::size_t n) const {
  require(n >= 1, "flight needs at least one UAV");
  require(k1 > 0.0 && k2 > 0.0 && kp > 0.0, "flight gains k1, k2, kp must be positive");
  require(leader < n, "flight leader index out of range");
  require(masses.empty() || masses.size() == n, "flight.masses must list one mass per UAV");
  for (double m : masses) require(m > 0.0, "flight masses must be positive");
  if (adjacency.empty()) return;
  require(adjacency.size() == n, "flight.adjacency must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    require(adjacency[i].size() == n, "flight.adjacency must be n x n");
    require(adjacency[i][i] == 0, "flight.adjacency must have a zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      require(adjacency[i][j] == adjacency[j][i], "flight.adjacency must be symmetric");
    }
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency[i][j] && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  require(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }),
          "flight.adjacency must describe a connected graph");
}

void ApfParams::validate() const {
  require(k_a > 0.0 && k_r >= 0.0 && d_0 > 0.0, "apf parameters must be positive");
}

FormationPlan FormationPlan::from_formation(const Formation& f, const Vec3& target_velocity) {
  FormationPlan plan;
  plan.target_start = f.target;
  plan.target_velocity = target_velocity;
  for (const Pose& p : f.members) plan.slots.push_back(p.position - f.target);
  return plan;
}

Vec3 formation_error(const SwarmState& s, const FormationPlan& plan, std::size_t i,
                     std::size_t j) {
  return s.positions[i] - s.positions[j] - plan.offset(i, j);
}

std::vector<Vec3> control_log(const SwarmState& s, const FormationPlan& plan,
                              const ControlGains& g) {
  return consensus_control(s, plan, g, [](const Vec3& e) { return Vec3(e / (1.0 + e.squaredNorm())); });
}

std::vector<Vec3> control_quad(const SwarmState& s, const FormationPlan& plan,
                               const ControlGains& g) {
  return consensus_control(s, plan, g, [](const Vec3& e) { return e; });
}

std::vector<Vec3> control_apf(const SwarmState& s, const FormationPlan& plan,
                              const ControlGains& g, const ApfParams& apf) {
  check_sizes(s, plan);
  std::vector<Vec3> u(s.size(), Vec3::Zero());
  for (std::size_t i = 0; i < s.size(); ++i) {
    u[i] = -apf.k_a * (s.positions[i] - plan.desired(i, s.time)) -
           g.k2 * (s.velocities[i] - plan.target_velocity);
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      const Vec3 r = s.positions[i] - s.positions[j];
      const double d = r.norm();
      if (d == 0.0) throw DegenerateGeometry("apf repulsion undefined for coincident UAVs");
      if (d < apf.d_0) u[i] += apf.k_r * (1.0 / d - 1.0 / apf.d_0) * r / (d * d * d);
    }
  }
  return u;
}

std::vector<Vec3> control(Controller c, const SwarmState& s, const FormationPlan& plan,
                          const ControlGains& g, const ApfParams& apf) {
  switch (c) {
    case Controller::Log: return control_log(s, plan, g);
    case Controller::Quad: return control_quad(s, plan, g);
    case Controller::Apf: return control_apf(s, plan, g, apf);
  }
  return {};
}

SwarmState step(const SwarmState& s, const std::vector<Vec3>& forces, const ControlGains& g,
                double dt) {
  require(dt > 0.0, "time step must be positive");
  require(forces.size() == s.size(), "one force per UAV required");
  SwarmState out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!forces[i].allFinite()) throw Error(ErrorKind::Numeric, "non-finite control force");
    out.velocities[i] += forces[i] / g.mass(i) * dt;
    out.positions[i] += out.velocities[i] * dt;
  }
  out.time = s.time + dt;
  return out;
}

SwarmState step_rk4(const SwarmState& s, const ForceFn& forces, const ControlGains& g,
                    double dt) {
  require(dt > 0.0, "time step must be positive");
  const std::size_t n = s.size();
  auto deriv = [&](const SwarmState& x, std::vector<Vec3>& dp, std::vector<Vec3>& dv) {
    const std::vector<Vec3> u = forces(x);
    dp = x.velocities;
    dv.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!u[i].allFinite()) throw Error(ErrorKind::Numeric, "non-finite control force");
      dv[i] = u[i] / g.mass(i);
    }
  };
  auto advance = [&](const std::vector<Vec3>& dp, const std::vector<Vec3>& dv, double h) {
    SwarmState x = s;
    for (std::size_t i = 0; i < n; ++i) {
      x.positions[i] += h * dp[i];
      x.velocities[i] += h * dv[i];
    }
    x.time = s.time + h;
    return x;
  };
  std::vector<Vec3> p1, v1, p2, v2, p3, v3, p4, v4;
  deriv(s, p1, v1);
  deriv(advance(p1, v1, dt / 2), p2, v2);
  deriv(advance(p2, v2, dt / 2), p3, v3);
  deriv(advance(p3, v3, dt), p4, v4);
  SwarmState out = s;
  for (std::size_t i = 0; i < n; ++i) {
    out.positions[i] += dt / 6 * (p1[i] + 2 * p2[i] + 2 * p3[i] + p4[i]);
    out.velocities[i] += dt / 6 * (v1[i] + 2 * v2[i] + 2 * v3[i] + v4[i]);
  }
  out.time = s.time + dt;
  return out;
}

double lyapunov_value(Controller c, const SwarmState& s, const FormationPlan& plan,
                      const ControlGains& g, const ApfParams& apf) {
  check_sizes(s, plan);
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    v += 0.5 * g.mass(i) * (s.velocities[i] - plan.target_velocity).squaredNorm();
  }
  if (c == Controller::Apf) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      v += 0.5 * apf.k_a * (s.positions[i] - plan.desired(i, s.time)).squaredNorm();
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const double d = (s.positions[i] - s.positions[j]).norm();
        if (d < apf.d_0) {
          v += apf.k_r * (0.5 / (d * d) - 1.0 / (apf.d_0 * d) + 0.5 / (apf.d_0 * apf.d_0));
        }
      }
    }
    return v;
  }
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j || !g.linked(i, j)) continue;
      const double e2 = formation_error(s, plan, i, j).squaredNorm();
      pairs += c == Controller::Log ? std::log1p(e2) : e2;
    }
  }
  const std::size_t L = g.leader;
  v += g.k1 / 4.0 * pairs;
  v += g.kp / 2.0 * (s.positions[L] - plan.desired(L, s.time)).squaredNorm();
  return v;
}

Trajectory simulate(const SwarmState& initial, const FormationPlan& plan,
                    const ControlGains& g, const ApfParams& apf, const SimulationSettings& cfg) {
  check_sizes(initial, plan);
  g.validate(initial.size());
  apf.validate();
  require(cfg.dt > 0.0, "flight.dt must be positive");
  require(cfg.horizon > 0.0, "flight.horizon must be positive");
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  require(n_steps >= 1, "flight.horizon shorter than one step");

  auto forces = [&](const SwarmState& x) { return control(cfg.controller, x, plan, g, apf); };
  Trajectory traj;
  traj.states.reserve(n_steps + 1);
  traj.controls.reserve(n_steps + 1);
  traj.lyapunov.reserve(n_steps + 1);
  SwarmState s = initial;
  for (std::size_t k = 0;; ++k) {
    // Time is re-derived from the step count so long runs do not accumulate drift.
    s.time = initial.time + static_cast<double>(k) * cfg.dt;
    std::vector<Vec3> u = forces(s);
    traj.lyapunov.push_back(lyapunov_value(cfg.controller, s, plan, g, apf));
    traj.states.push_back(s);
    if (k == n_steps) {
      traj.controls.push_back(std::move(u));
      break;
    }
    s = cfg.integrator == Integrator::Rk4 ? step_rk4(s, forces, g, cfg.dt) : step(s, u, g, cfg.dt);
    traj.controls.push_back(std::move(u));
  }
  return traj;
}

FlightMetrics metrics(const Trajectory& traj, const FormationPlan& plan) {
  require(!traj.states.empty(), "metrics need a non-empty trajectory");
  FlightMetrics m;
  const std::size_t n = traj.states.front().size();
  require(n == plan.size(), "trajectory and formation plan differ in size");
  const std::size_t samples = traj.states.size();

  double distance = 0.0;
  double vel_sum = 0.0;
  std::size_t vel_count = 0;
  for (std::size_t k = 1; k < samples; ++k) {
    const SwarmState& prev = traj.states[k - 1];
    const SwarmState& cur = traj.states[k];
    for (std::size_t i = 0; i < n; ++i) {
      distance += (cur.positions[i] - prev.positions[i]).norm();
      const double ve = (cur.velocities[i] - plan.target_velocity).norm();
      vel_sum += ve;
      m.max_vel_err = std::max(m.max_vel_err, ve);
      ++vel_count;
    }
  }
  m.avg_distance = distance / static_cast<double>(n);
  m.avg_vel_err = vel_count ? vel_sum / static_cast<double>(vel_count) : 0.0;

  const SwarmState& last = traj.states.back();
  double final_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    final_err += (last.positions[i] - plan.desired(i, last.time)).norm();
  }
  m.avg_final_pos_err = final_err / static_cast<double>(n);

  for (std::size_t k = 1; k < traj.lyapunov.size(); ++k) {
    m.max_lyapunov_increase =
        std::max(m.max_lyapunov_increase, traj.lyapunov[k] - traj.lyapunov[k - 1]);
  }
  return m;
}

SwarmState random_initial_state(std::size_t n, const Vec3& center, double edge,
                                std::uint64_t seed) {
  require(edge > 0.0, "initial cube edge must be positive");
  std::mt19937_64 rng(seed);
  SwarmState s;
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = center[a] + (uniform01(rng) - 0.5) * edge;
    s.positions.push_back(p);
    s.velocities.push_back(Vec3::Zero());
  }
  return s;
}

}  // namespace fimform
