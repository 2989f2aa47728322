#include "fimform/scenario.hpp"

#include <concepts>
#include <fstream>
#include <set>
#include <sstream>

#include "fimform/error.hpp"
#include "json.hpp"

namespace fimform {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check(bool cond, const std::string& path, const std::string& what) {
  if (!cond) fail(path, what);
}

void read(const json& j, const std::string& path, double& out) {
  if (!j.is_number()) fail(path, "expected a number");
  out = j.get<double>();
}

void read(const json& j, const std::string& path, bool& out) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  out = j.get<bool>();
}

void read(const json& j, const std::string& path, std::string& out) {
  if (!j.is_string()) fail(path, "expected a string");
  out = j.get<std::string>();
}

void read(const json& j, const std::string& path, int& out) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  out = j.get<int>();
}

template <std::unsigned_integral T>
void read(const json& j, const std::string& path, T& out) {
  if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  out = j.get<T>();
}

void read(const json& j, const std::string&, json& out) { out = j; }

template <class T, std::size_t N>
void read(const json& j, const std::string& path, std::array<T, N>& out) {
  if (!j.is_array() || j.size() != N) fail(path, "expected an array of " + std::to_string(N));
  for (std::size_t i = 0; i < N; ++i) read(j[i], path + "[" + std::to_string(i) + "]", out[i]);
}

template <class T>
void read(const json& j, const std::string& path, std::vector<T>& out) {
  if (!j.is_array()) fail(path, "expected an array");
  out.assign(j.size(), T{});
  for (std::size_t i = 0; i < j.size(); ++i) read(j[i], path + "[" + std::to_string(i) + "]", out[i]);
}

// Object reader that rejects keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  void opt(const char* key, T& out) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) read(*it, at(key), out);
  }

  template <class T>
  void req(const char* key, T& out) {
    if (!j_.contains(key)) fail(at(key), "required field is missing");
    opt(key, out);
  }

  template <class Fn>
  void child(const char* key, Fn&& fn) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) {
      Obj sub(*it, at(key));
      fn(sub);
      sub.done();
    }
  }

  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(at(key), "unknown field");
    }
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann counts bytes from 1; report a 0-based offset.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError(what + ": malformed JSON at byte " + std::to_string(offset) + ": " +
                      e.what());
  }
}

Vec3 vec(const Triple& t) { return Vec3(t[0], t[1], t[2]); }

void read_sensors(Obj& o, Scenario::Sensors& s) {
  o.child("camera", [&](Obj& c) {
    c.opt("fx", s.fx);
    c.opt("fy", s.fy);
    c.opt("cx", s.cx);
    c.opt("cy", s.cy);
    c.opt("noise_sigma", s.camera_noise_sigma);
  });
  o.child("lidar", [&](Obj& l) { l.opt("noise_sigma", s.lidar_noise_sigma); });
}

SensorModels models_from(const Scenario::Sensors& s) {
  SensorModels m;
  m.camera.fx = s.fx;
  m.camera.fy = s.fy;
  m.camera.cx = s.cx;
  m.camera.cy = s.cy;
  // Noise is given as standard deviations; the models take variances.
  m.camera.noise_var = Vec2(s.camera_noise_sigma[0], s.camera_noise_sigma[1]).array().square();
  m.lidar.noise_var = vec(s.lidar_noise_sigma).array().square();
  return m;
}

void validate_sensors(const Scenario::Sensors& s, const std::string& path) {
  check(s.fx > 0 && s.fy > 0, path + ".camera", "fx and fy must be positive");
  for (double v : s.camera_noise_sigma) check(v > 0, path + ".camera.noise_sigma", "entries must be positive");
  for (double v : s.lidar_noise_sigma) check(v > 0, path + ".lidar.noise_sigma", "entries must be positive");
}

json sensors_json(const Scenario::Sensors& s) {
  return {{"camera",
           {{"fx", s.fx}, {"fy", s.fy}, {"cx", s.cx}, {"cy", s.cy},
            {"noise_sigma", s.camera_noise_sigma}}},
          {"lidar", {{"noise_sigma", s.lidar_noise_sigma}}}};
}

}  // namespace

Vec3 Scenario::target_position() const { return vec(target.position); }
Vec3 Scenario::target_velocity() const { return vec(target.velocity); }
SensorModels Scenario::sensor_models() const { return models_from(sensors); }

GridSpec Scenario::grid_spec() const {
  GridSpec g;
  g.d_min = grid.d_min;
  g.d_max = grid.d_max;
  g.d_step = grid.d_step;
  g.beta_min = deg2rad(grid.beta_min_deg);
  g.beta_max = deg2rad(grid.beta_max_deg);
  g.beta_step = deg2rad(grid.beta_step_deg);
  g.delta_min = deg2rad(grid.delta_min_deg);
  g.delta_max = deg2rad(grid.delta_max_deg);
  g.delta_step = deg2rad(grid.delta_step_deg);
  g.max_elevation = deg2rad(grid.max_elevation_deg);
  g.n_max = grid.n_max;
  return g;
}

RadioParams Scenario::radio_params() const {
  RadioParams r;
  r.rho0 = radio.rho0;
  r.alpha = radio.alpha;
  r.tx_power = radio.tx_power_w;
  r.noise_power = dbm_to_watts(radio.noise_power_dbm);
  return r;
}

FovSpec Scenario::fov_spec() const {
  FovSpec f;
  f.gamma = deg2rad(fov.gamma_deg);
  f.kappa = deg2rad(fov.kappa_deg);
  f.d_max = fov.d_max;
  f.n_dirs = fov.n_dirs;
  f.lambda = fov.lambda;
  f.sectors = fov.sectors;
  f.eta_min_db = fov.eta_min_db;
  f.search = fov.search == "greedy" ? FlipSearch::Greedy
             : fov.search == "exact" ? FlipSearch::Exact
                                     : FlipSearch::Auto;
  f.exact_limit = fov.exact_limit;
  return f;
}

ControlGains Scenario::control_gains(std::size_t n) const {
  ControlGains g;
  g.k1 = flight.k1;
  g.k2 = flight.k2;
  g.kp = flight.kp;
  g.masses = flight.masses;
  g.leader = flight.leader;
  g.adjacency = flight.adjacency;
  g.validate(n);
  return g;
}

std::vector<Controller> Scenario::flight_controllers() const {
  std::vector<Controller> out;
  for (const std::string& c : flight.controllers) out.push_back(controller_from_string(c));
  return out;
}

SimulationSettings Scenario::simulation(Controller c) const {
  SimulationSettings s;
  s.controller = c;
  s.integrator = flight.integrator == "rk4" ? Integrator::Rk4 : Integrator::SemiImplicitEuler;
  s.dt = flight.dt;
  s.horizon = flight.horizon;
  return s;
}

void Scenario::validate() const {
  validate_sensors(sensors, "sensors");

  check(grid.d_min > 0 && grid.d_min <= grid.d_max, "grid.d_min", "must satisfy 0 < d_min <= d_max");
  check(grid.d_step > 0, "grid.d_step", "must be positive");
  check(grid.beta_step_deg > 0, "grid.beta_step_deg", "must be positive");
  check(grid.delta_step_deg > 0, "grid.delta_step_deg", "must be positive");
  check(grid.beta_min_deg <= grid.beta_max_deg, "grid.beta_max_deg", "must be >= beta_min_deg");
  check(grid.delta_min_deg >= 0 && grid.delta_max_deg <= 180 && grid.delta_min_deg <= grid.delta_max_deg,
        "grid.delta_min_deg", "pitch range must lie in [0, 180]");
  check(grid.max_elevation_deg >= 0, "grid.max_elevation_deg", "must be non-negative");
  check(grid.n_max >= 1, "grid.n_max", "must be >= 1");

  check(weights.alpha1 >= 0, "weights.alpha1", "must be non-negative");
  check(weights.alpha2 >= 0, "weights.alpha2", "must be non-negative");
  check(weights.eps > 0, "weights.eps", "must be positive");

  const ResourceModel& r = resources;
  check(r.bandwidth_cam > 0 && r.duration_cam > 0 && r.bandwidth_lidar > 0 && r.duration_lidar > 0,
        "resources", "bandwidths and durations must be positive");
  check(r.bandwidth_lidar * r.duration_lidar > r.bandwidth_cam * r.duration_cam, "resources",
        "lidar must use more time-frequency resource than camera");
  check(r.cost_cam >= 0 && r.cost_lidar > r.cost_cam, "resources.cost_lidar",
        "must exceed cost_cam (and cost_cam must be non-negative)");

  check(radio.rho0 > 0, "radio.rho0", "must be positive");
  check(radio.alpha >= 1, "radio.alpha", "must be >= 1");
  check(radio.tx_power_w > 0, "radio.tx_power_w", "must be positive");

  check(fov.gamma_deg > 0 && fov.gamma_deg < 180, "fov.gamma_deg", "must lie in (0, 180)");
  check(fov.kappa_deg > 0 && fov.kappa_deg < 180, "fov.kappa_deg", "must lie in (0, 180)");
  check(fov.d_max > 0, "fov.d_max", "must be positive");
  check(fov.n_dirs >= 4, "fov.n_dirs", "must be >= 4");
  check(fov.lambda >= 0, "fov.lambda", "must be non-negative");
  check(fov.sectors >= 1, "fov.sectors", "must be >= 1");
  check(fov.search == "auto" || fov.search == "greedy" || fov.search == "exact", "fov.search",
        "must be auto, greedy or exact");

  check(!flight.controllers.empty(), "flight.controllers", "must list at least one controller");
  for (std::size_t i = 0; i < flight.controllers.size(); ++i) {
    const std::string& c = flight.controllers[i];
    check(c == "log" || c == "quad" || c == "apf", "flight.controllers[" + std::to_string(i) + "]",
          "must be log, quad or apf");
  }
  check(flight.integrator == "euler" || flight.integrator == "rk4", "flight.integrator",
        "must be euler or rk4");
  check(flight.dt > 0, "flight.dt", "must be positive");
  check(flight.horizon >= flight.dt, "flight.horizon", "must be at least one time step");
  check(flight.k1 > 0 && flight.k2 > 0 && flight.kp > 0, "flight", "k1, k2 and kp must be positive");
  for (double m : flight.masses) check(m > 0, "flight.masses", "entries must be positive");
  check(flight.apf.k_a > 0 && flight.apf.k_r >= 0 && flight.apf.d_0 > 0, "flight.apf",
        "k_a and d_0 must be positive, k_r non-negative");
  check(flight.init_cube > 0, "flight.init_cube", "must be positive");
  check(flight.runs >= 1, "flight.runs", "must be >= 1");
  check(flight.trace_every >= 1, "flight.trace_every", "must be >= 1");
}

Scenario parse_scenario_text(const std::string& text) {
  const json j = parse_json(text, "scenario");
  Scenario s;
  Obj root(j, "");
  std::string schema;
  root.opt("$schema", schema);
  root.opt("name", s.name);
  root.opt("notes", s.notes);
  root.req("seed", s.seed);
  root.child("target", [&](Obj& o) {
    o.req("position", s.target.position);
    o.opt("velocity", s.target.velocity);
    o.opt("ground", s.target.ground);
  });
  root.child("sensors", [&](Obj& o) { read_sensors(o, s.sensors); });
  root.child("grid", [&](Obj& o) {
    o.opt("d_min", s.grid.d_min);
    o.opt("d_max", s.grid.d_max);
    o.opt("d_step", s.grid.d_step);
    o.opt("beta_min_deg", s.grid.beta_min_deg);
    o.opt("beta_max_deg", s.grid.beta_max_deg);
    o.opt("beta_step_deg", s.grid.beta_step_deg);
    o.opt("delta_min_deg", s.grid.delta_min_deg);
    o.opt("delta_max_deg", s.grid.delta_max_deg);
    o.opt("delta_step_deg", s.grid.delta_step_deg);
    o.opt("max_elevation_deg", s.grid.max_elevation_deg);
    o.opt("n_max", s.grid.n_max);
  });
  root.child("weights", [&](Obj& o) {
    o.opt("alpha1", s.weights.alpha1);
    o.opt("alpha2", s.weights.alpha2);
    o.opt("rho", s.weights.rho);
    o.opt("eps", s.weights.eps);
  });
  root.child("resources", [&](Obj& o) {
    o.opt("bandwidth_cam_hz", s.resources.bandwidth_cam);
    o.opt("duration_cam_s", s.resources.duration_cam);
    o.opt("bandwidth_lidar_hz", s.resources.bandwidth_lidar);
    o.opt("duration_lidar_s", s.resources.duration_lidar);
    o.opt("cost_cam", s.resources.cost_cam);
    o.opt("cost_lidar", s.resources.cost_lidar);
  });
  root.child("radio", [&](Obj& o) {
    o.opt("rho0", s.radio.rho0);
    o.opt("alpha", s.radio.alpha);
    o.opt("tx_power_w", s.radio.tx_power_w);
    o.opt("noise_power_dbm", s.radio.noise_power_dbm);
  });
  root.child("fov", [&](Obj& o) {
    o.opt("gamma_deg", s.fov.gamma_deg);
    o.opt("kappa_deg", s.fov.kappa_deg);
    o.opt("d_max", s.fov.d_max);
    o.opt("n_dirs", s.fov.n_dirs);
    o.opt("lambda", s.fov.lambda);
    o.opt("sectors", s.fov.sectors);
    o.opt("eta_min_db", s.fov.eta_min_db);
    o.opt("search", s.fov.search);
    o.opt("exact_limit", s.fov.exact_limit);
  });
  root.child("flight", [&](Obj& o) {
    o.opt("controllers", s.flight.controllers);
    o.opt("integrator", s.flight.integrator);
    o.opt("dt", s.flight.dt);
    o.opt("horizon", s.flight.horizon);
    o.opt("k1", s.flight.k1);
    o.opt("k2", s.flight.k2);
    o.opt("kp", s.flight.kp);
    o.opt("masses", s.flight.masses);
    o.opt("leader", s.flight.leader);
    o.opt("adjacency", s.flight.adjacency);
    o.child("apf", [&](Obj& a) {
      a.opt("k_a", s.flight.apf.k_a);
      a.opt("k_r", s.flight.apf.k_r);
      a.opt("d_0", s.flight.apf.d_0);
    });
    o.opt("init_cube", s.flight.init_cube);
    o.opt("runs", s.flight.runs);
    o.opt("trace_every", s.flight.trace_every);
  });
  root.done();
  s.validate();
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario parse_scenario(const std::filesystem::path& path) {
  return parse_scenario_text(read_file(path));
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["notes"] = s.notes;
  j["seed"] = s.seed;
  j["target"] = {{"position", s.target.position}, {"velocity", s.target.velocity}, {"ground", s.target.ground}};
  j["sensors"] = sensors_json(s.sensors);
  const auto& g = s.grid;
  j["grid"] = {{"d_min", g.d_min},
               {"d_max", g.d_max},
               {"d_step", g.d_step},
               {"beta_min_deg", g.beta_min_deg},
               {"beta_max_deg", g.beta_max_deg},
               {"beta_step_deg", g.beta_step_deg},
               {"delta_min_deg", g.delta_min_deg},
               {"delta_max_deg", g.delta_max_deg},
               {"delta_step_deg", g.delta_step_deg},
               {"max_elevation_deg", g.max_elevation_deg},
               {"n_max", g.n_max}};
  j["weights"] = {{"alpha1", s.weights.alpha1}, {"alpha2", s.weights.alpha2}, {"rho", s.weights.rho},
                  {"eps", s.weights.eps}};
  const auto& r = s.resources;
  j["resources"] = {{"bandwidth_cam_hz", r.bandwidth_cam},     {"duration_cam_s", r.duration_cam},
                    {"bandwidth_lidar_hz", r.bandwidth_lidar}, {"duration_lidar_s", r.duration_lidar},
                    {"cost_cam", r.cost_cam},                  {"cost_lidar", r.cost_lidar}};
  j["radio"] = {{"rho0", s.radio.rho0}, {"alpha", s.radio.alpha}, {"tx_power_w", s.radio.tx_power_w},
                {"noise_power_dbm", s.radio.noise_power_dbm}};
  const auto& f = s.fov;
  j["fov"] = {{"gamma_deg", f.gamma_deg}, {"kappa_deg", f.kappa_deg}, {"d_max", f.d_max},
              {"n_dirs", f.n_dirs},      {"lambda", f.lambda},      {"sectors", f.sectors},
              {"eta_min_db", f.eta_min_db}, {"search", f.search},   {"exact_limit", f.exact_limit}};
  const auto& fl = s.flight;
  j["flight"] = {{"controllers", fl.controllers},
                 {"integrator", fl.integrator},
                 {"dt", fl.dt},
                 {"horizon", fl.horizon},
                 {"k1", fl.k1},
                 {"k2", fl.k2},
                 {"kp", fl.kp},
                 {"masses", fl.masses},
                 {"leader", fl.leader},
                 {"adjacency", fl.adjacency},
                 {"apf", {{"k_a", fl.apf.k_a}, {"k_r", fl.apf.k_r}, {"d_0", fl.apf.d_0}}},
                 {"init_cube", fl.init_cube},
                 {"runs", fl.runs},
                 {"trace_every", fl.trace_every}};
  return j.dump(2) + "\n";
}

FormationDocument parse_formation_text(const std::string& text) {
  const json j = parse_json(text, "formation");
  FormationDocument doc;
  Scenario::Sensors sensors;
  Triple target{0, 0, 0};
  std::vector<json> members;
  Obj root(j, "");
  std::string ignored;
  root.opt("$schema", ignored);
  root.opt("notes", ignored);
  root.opt("target", target);
  root.opt("eps", doc.eps);
  root.child("sensors", [&](Obj& o) { read_sensors(o, sensors); });
  root.req("members", members);
  root.done();
  check(doc.eps > 0, "eps", "must be positive");
  validate_sensors(sensors, "sensors");

  doc.models = models_from(sensors);
  doc.formation.target = vec(target);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::string path = "members[" + std::to_string(i) + "]";
    Obj m(members[i], path);
    Triple pos{};
    std::string sensor;
    double yaw_deg = 0;
    m.req("position", pos);
    m.req("sensor", sensor);
    const bool has_yaw = members[i].contains("yaw_deg");
    m.opt("yaw_deg", yaw_deg);
    m.done();
    Pose p;
    p.position = vec(pos);
    try {
      p.sensor = sensor_from_string(sensor);
    } catch (const ConfigError& e) {
      fail(path + ".sensor", e.what());
    }
    p.yaw = has_yaw ? wrap_pi(deg2rad(yaw_deg)) : yaw_facing_target(p.position, doc.formation.target);
    doc.formation.members.push_back(p);
  }
  return doc;
}

FormationDocument parse_formation(const std::filesystem::path& path) {
  return parse_formation_text(read_file(path));
}

}  // namespace fimform
