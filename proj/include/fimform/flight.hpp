#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "fimform/geom.hpp"

namespace fimform {

enum class Controller { Log, Quad, Apf };
enum class Integrator { SemiImplicitEuler, Rk4 };

std::string_view to_string(Controller c);
Controller controller_from_string(std::string_view name);

struct SwarmState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  double time = 0.0;

  std::size_t size() const { return positions.size(); }
};

struct ControlGains {
  double k1 = 4.0;
  double k2 = 1.5;
  double kp = 10.0;
  std::vector<double> masses;  // empty: unit masses
  std::size_t leader = 0;
  /// Symmetric 0/1 adjacency; empty means the complete graph.
  std::vector<std::vector<int>> adjacency;

  double mass(std::size_t i) const { return masses.empty() ? 1.0 : masses[i]; }
  bool linked(std::size_t i, std::size_t j) const;
  void validate(std::size_t n) const;
};

struct ApfParams {
  double k_a = 10.0;
  double k_r = 5.0;
  double d_0 = 2.0;

  void validate() const;
};

/// Desired slots relative to a constant-velocity target.
struct FormationPlan {
  std::vector<Vec3> slots;
  Vec3 target_start = Vec3::Zero();
  Vec3 target_velocity = Vec3::Zero();

  static FormationPlan from_formation(const Formation& f, const Vec3& target_velocity);

  std::size_t size() const { return slots.size(); }
  Vec3 target_at(double t) const { return target_start + t * target_velocity; }
  Vec3 desired(std::size_t i, double t) const { return target_at(t) + slots[i]; }
  /// d_ij: desired displacement of member i from member j.
  Vec3 offset(std::size_t i, std::size_t j) const { return slots[i] - slots[j]; }
};

Vec3 formation_error(const SwarmState& s, const FormationPlan& plan, std::size_t i,
                     std::size_t j);

std::vector<Vec3> control_log(const SwarmState& s, const FormationPlan& plan,
                              const ControlGains& g);
std::vector<Vec3> control_quad(const SwarmState& s, const FormationPlan& plan,
                               const ControlGains& g);
std::vector<Vec3> control_apf(const SwarmState& s, const FormationPlan& plan,
                              const ControlGains& g, const ApfParams& apf);

std::vector<Vec3> control(Controller c, const SwarmState& s, const FormationPlan& plan,
                          const ControlGains& g, const ApfParams& apf);

/// Semi-implicit Euler: v += u/m dt, then p += v dt.
SwarmState step(const SwarmState& s, const std::vector<Vec3>& forces, const ControlGains& g,
                double dt);

using ForceFn = std::function<std::vector<Vec3>(const SwarmState&)>;
SwarmState step_rk4(const SwarmState& s, const ForceFn& forces, const ControlGains& g,
                    double dt);

/// Energy-like function of the closed loop for each controller. For Log it is
/// (k1/4) sum over ordered linked pairs of ln(1+|e|^2) + sum m/2 |v - v_t|^2
/// + (kp/2)|P_L - P_L^des|^2.
double lyapunov_value(Controller c, const SwarmState& s, const FormationPlan& plan,
                      const ControlGains& g, const ApfParams& apf = {});

struct Trajectory {
  std::vector<SwarmState> states;
  std::vector<std::vector<Vec3>> controls;
  std::vector<double> lyapunov;
};

struct SimulationSettings {
  Controller controller = Controller::Log;
  Integrator integrator = Integrator::SemiImplicitEuler;
  double dt = 0.01;
  double horizon = 60.0;
};

Trajectory simulate(const SwarmState& initial, const FormationPlan& plan,
                    const ControlGains& g, const ApfParams& apf, const SimulationSettings& cfg);

struct FlightMetrics {
  double avg_distance = 0.0;
  double avg_vel_err = 0.0;
  double max_vel_err = 0.0;
  double avg_final_pos_err = 0.0;
  double max_lyapunov_increase = 0.0;
};

FlightMetrics metrics(const Trajectory& traj, const FormationPlan& plan);

/// Positions uniform in a cube of the given edge around center, zero velocity.
SwarmState random_initial_state(std::size_t n, const Vec3& center, double edge,
                                std::uint64_t seed);

}  // namespace fimform
