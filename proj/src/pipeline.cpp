#include "fimform/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include "fimform/alloc.hpp"
#include "fimform/error.hpp"
#include "fimform/fov.hpp"
#include "json.hpp"

namespace fimform {

using nlohmann::json;

namespace {

constexpr int kReportVersion = 1;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string sensor_label(Sensor s) { return s == Sensor::Camera ? "Camera" : "LiDAR"; }

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json link_json(const Formation& f, const RadioParams& rp) {
  if (f.size() < 2) return {{"Avg. SINR", nullptr}, {"Min. SINR", nullptr}};
  const LinkStats s = link_stats(f, 0, rp);
  return {{"Avg. SINR", s.avg_db}, {"Min. SINR", s.min_db}};
}

json members_json(const Formation& f) {
  json rows = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Pose& p = f.members[i];
    const Vec3 rel = p.position - f.target;
    rows.push_back({{"UAV ID", i + 1},
                    {"Sensor", sensor_label(p.sensor)},
                    {"Position (m)", vec_json(p.position)},
                    {"Relative Position (m)", vec_json(rel)},
                    {"Yaw (deg)", rad2deg(p.yaw)}});
  }
  return rows;
}

json coverage_json(const Formation& f, const CoverageReport& c, double log_det,
                   const RadioParams& rp) {
  json j = link_json(f, rp);
  j["Gamma"] = c.gamma_metric;
  j["xi"] = c.xi;
  j["uncovered"] = c.uncovered;
  j["log_det_F"] = log_det;
  j["members"] = members_json(f);
  return j;
}

template <class Fn>
auto in_stage(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(to_string(stage)) + ": " + e.what());
  }
}

struct AllocStage {
  Allocation allocation;
  Grid grid;
};

AllocStage run_allocate(const Scenario& s, json& report, RunOutput& out) {
  const SensorModels models = s.sensor_models();
  const Vec3 target = s.target_position();
  AllocStage st;
  st.grid = build_grid(s.grid_spec(), target, models);
  st.allocation = greedy_select(st.grid.candidates, target, s.weights, s.resources, s.grid.n_max);
  const Allocation& a = st.allocation;

  json rounds = json::array();
  std::string csv = "round,candidate_id,sensor,beta_deg,delta_deg,d,gain,utility,log_det_F\n";
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    const GreedyRound& g = a.rounds[r];
    const Candidate& c = st.grid.candidates[a.selected[r]];
    rounds.push_back({{"UAV ID", r + 1},
                      {"candidate_id", g.candidate_id},
                      {"Sensor", sensor_label(c.pose.sensor)},
                      {"d (m)", c.placement.d},
                      {"beta (deg)", rad2deg(c.placement.beta)},
                      {"delta (deg)", rad2deg(c.placement.delta)},
                      {"gain", g.gain},
                      {"utility", g.utility},
                      {"log_det_F", g.value}});
    csv += std::to_string(r + 1) + "," + std::to_string(g.candidate_id) + "," +
           std::string(to_string(c.pose.sensor)) + "," + num(rad2deg(c.placement.beta)) + "," +
           num(rad2deg(c.placement.delta)) + "," + num(c.placement.d) + "," + num(g.gain) + "," +
           num(g.utility) + "," + num(g.value) + "\n";
  }
  const auto lidars = std::count_if(a.formation.members.begin(), a.formation.members.end(),
                                    [](const Pose& p) { return p.sensor == Sensor::Lidar; });
  report["allocation"] = {{"candidates", st.grid.candidates.size()},
                          {"excluded_degenerate", st.grid.degenerate},
                          {"excluded_out_of_view", st.grid.out_of_view},
                          {"utility_evaluations", a.evaluations},
                          {"num_uav", a.formation.size()},
                          {"num_lidar", lidars},
                          {"num_camera", a.formation.size() - static_cast<std::size_t>(lidars)},
                          {"log_det_F", a.log_det},
                          {"rounds", rounds},
                          {"members", members_json(a.formation)}};
  out.files.push_back({"allocation_rounds.csv", csv});
  return st;
}

Formation run_formation(const Scenario& s, const Formation& initial, json& report) {
  const SensorModels models = s.sensor_models();
  const RadioParams rp = s.radio_params();
  const FovSpec fov = s.fov_spec();
  if (initial.empty()) {
    throw Error(ErrorKind::DegenerateGeometry,
                "allocation selected no UAV (every utility was at or below rho)");
  }
  const FormationOptimization o = optimize_formation(initial, fov, models, rp, s.weights.eps);

  json steps = json::array();
  for (const FlipStep& st : o.steps) {
    json ids = json::array();
    for (std::size_t i : st.flipped) ids.push_back(i + 1);
    steps.push_back({{"flipped UAV ID", ids},
                     {"Gamma", st.gamma_metric},
                     {"log_det_F", st.log_det},
                     {"Min. SINR", st.min_sinr_db}});
  }
  json flipped = json::array();
  for (std::size_t i : o.flipped) flipped.push_back(i + 1);
  json j = {{"search", o.exact ? "exact" : "greedy"},
            {"sectors", o.sector_of},
            {"sinr_feasible_initially", o.initial_feasible},
            {"eta_min_db", fov.eta_min_db},
            {"flipped UAV ID", flipped},
            {"steps", steps},
            {"before", coverage_json(initial, o.before, o.log_det_before, rp)},
            {"after", coverage_json(o.formation, o.after, o.log_det_after, rp)}};

  Formation result = o.formation;
  if (s.target.ground) {
    result = ground_constrain(o.formation);
    const double ld = logdet_reg(total_fim(result, models), s.weights.eps);
    j["ground"] = coverage_json(result, coverage(result, fov), ld, rp);
  }
  report["formation"] = j;
  return result;
}

std::string trace_csv(const Trajectory& t, std::size_t every) {
  const std::size_t n = t.states.front().size();
  std::string csv = "t";
  for (std::size_t i = 1; i <= n; ++i) {
    for (const char* f : {"px", "py", "pz", "vx", "vy", "vz", "ux", "uy", "uz"}) {
      csv += "," + std::string(f) + std::to_string(i);
    }
  }
  csv += ",V\n";
  for (std::size_t k = 0; k < t.states.size(); k += every) {
    const SwarmState& s = t.states[k];
    csv += num(s.time);
    for (std::size_t i = 0; i < n; ++i) {
      for (const Vec3* v : {&s.positions[i], &s.velocities[i], &t.controls[k][i]}) {
        for (int a = 0; a < 3; ++a) csv += "," + num((*v)[a]);
      }
    }
    csv += "," + num(t.lyapunov[k]) + "\n";
  }
  return csv;
}

void run_fly(const Scenario& s, const Formation& f, std::uint64_t seed,
             const std::vector<Controller>& controllers, json& report, RunOutput& out) {
  const FormationPlan plan = FormationPlan::from_formation(f, s.target_velocity());
  const ControlGains gains = s.control_gains(f.size());
  json per = json::object();
  for (Controller c : controllers) {
    FlightMetrics mean;
    for (std::size_t r = 0; r < s.flight.runs; ++r) {
      const SwarmState s0 = random_initial_state(f.size(), plan.target_start, s.flight.init_cube, seed + r);
      const Trajectory t = simulate(s0, plan, gains, s.flight.apf, s.simulation(c));
      const FlightMetrics m = metrics(t, plan);
      mean.avg_distance += m.avg_distance;
      mean.avg_vel_err += m.avg_vel_err;
      mean.max_vel_err += m.max_vel_err;
      mean.avg_final_pos_err += m.avg_final_pos_err;
      mean.max_lyapunov_increase = std::max(mean.max_lyapunov_increase, m.max_lyapunov_increase);
      if (r == 0) {
        out.files.push_back({"flight_" + std::string(to_string(c)) + ".csv",
                             trace_csv(t, s.flight.trace_every)});
      }
    }
    const double runs = static_cast<double>(s.flight.runs);
    per[std::string(to_string(c))] = {{"Avg. Distance (m)", mean.avg_distance / runs},
                                      {"Avg. Velocity Err.", mean.avg_vel_err / runs},
                                      {"Max. Velocity Err.", mean.max_vel_err / runs},
                                      {"Avg. Final Pos. Err. (m)", mean.avg_final_pos_err / runs},
                                      {"Max. Lyapunov Increase", mean.max_lyapunov_increase},
                                      {"runs", s.flight.runs}};
  }
  report["flight"] = {{"target_velocity", vec_json(plan.target_velocity)},
                      {"dt", s.flight.dt},
                      {"horizon", s.flight.horizon},
                      {"init_cube", s.flight.init_cube},
                      {"first_seed", seed},
                      {"leader UAV ID", s.flight.leader + 1},
                      {"controllers", per}};
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Allocate: return "allocate";
    case Stage::Formation: return "formation";
    case Stage::Fly: return "fly";
  }
  return "fly";
}

Stage stage_from_string(std::string_view name) {
  if (name == "allocate") return Stage::Allocate;
  if (name == "formation") return Stage::Formation;
  if (name == "fly") return Stage::Fly;
  throw ConfigError("unknown stage '" + std::string(name) + "' (expected allocate|formation|fly)");
}

RunOutput run_pipeline(const Scenario& s, const RunOptions& opts) {
  s.validate();
  const std::uint64_t seed = opts.seed_override.value_or(s.seed);
  RunOutput out;
  out.files.push_back({"report.json", ""});
  json report;
  report["format_version"] = kReportVersion;
  report["scenario"] = s.name;
  report["seed"] = seed;
  report["stage"] = std::string(to_string(opts.stage));

  const AllocStage alloc = in_stage(Stage::Allocate, [&] { return run_allocate(s, report, out); });
  if (opts.stage >= Stage::Formation) {
    const Formation f =
        in_stage(Stage::Formation, [&] { return run_formation(s, alloc.allocation.formation, report); });
    if (opts.stage >= Stage::Fly) {
      const std::vector<Controller> controllers =
          opts.controller ? std::vector<Controller>{*opts.controller} : s.flight_controllers();
      in_stage(Stage::Fly, [&] {
        run_fly(s, f, seed, controllers, report, out);
        return 0;
      });
    }
  }
  out.files.front().content = report.dump(2) + "\n";
  return out;
}

FimEvaluation eval_fim(const FormationDocument& doc) {
  FimEvaluation ev;
  const Fim F = total_fim(doc.formation, doc.models);
  ev.log_det = logdet_reg(F, doc.eps);

  // The same poses with the noise entries read as variances instead of
  // standard deviations, reported for auditing the convention.
  SensorModels alt = doc.models;
  alt.camera.noise_var = doc.models.camera.noise_var.cwiseSqrt();
  alt.lidar.noise_var = doc.models.lidar.noise_var.cwiseSqrt();
  const double alt_ld = logdet_reg(total_fim(doc.formation, alt), doc.eps);

  json fim = json::array();
  for (int r = 0; r < 3; ++r) fim.push_back({F.m(r, 0), F.m(r, 1), F.m(r, 2)});
  json j = {{"num_uav", doc.formation.size()},
            {"eps", doc.eps},
            {"log_det_F", ev.log_det},
            {"F", fim},
            {"members", members_json(doc.formation)},
            {"noise_convention",
             {{"used", "noise entries are standard deviations"},
              {"log_det_F_if_entries_were_variances", alt_ld}}}};
  ev.report = j.dump(2) + "\n";
  return ev;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw ConfigError("cannot write '" + tmp.string() + "'");
    o.write(content.data(), static_cast<std::streamsize>(content.size()));
    o.flush();
    if (!o) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place at '" + path.string() + "'");
  }
}

void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
  for (const OutputFile& f : out.files) write_atomic(dir / f.name, f.content);
}

}  // namespace fimform
