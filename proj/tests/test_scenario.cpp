#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "fimform/error.hpp"
#include "fimform/pipeline.hpp"
#include "fimform/scenario.hpp"
#include "json.hpp"

using namespace fimform;

namespace {

const std::string kScenarios = FIMFORM_SCENARIO_DIR;

std::string config_error(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("bundled default scenario carries the published parameters") {
  const Scenario s = parse_scenario(kScenarios + "/paper_default.json");
  const SensorModels m = s.sensor_models();
  CHECK(m.camera.fx == 381.0);
  CHECK(m.camera.noise_var.x() == doctest::Approx(36.0));
  CHECK(m.lidar.noise_var.x() == doctest::Approx(0.01));
  CHECK(m.lidar.noise_var.y() == doctest::Approx(0.0004));
  CHECK(m.lidar.noise_var.z() == doctest::Approx(0.000225));
  const FovSpec f = s.fov_spec();
  CHECK(f.gamma == doctest::Approx(deg2rad(50)));
  CHECK(f.kappa == doctest::Approx(deg2rad(40)));
  CHECK(s.radio_params().alpha == 2.0);
  CHECK(s.radio_params().noise_power == doctest::Approx(1e-14));
  CHECK(s.weights.alpha1 == 0.18);
  CHECK(s.weights.alpha2 == 0.2);
  CHECK(s.weights.rho == 0.17);
  CHECK(s.flight.k1 == 4.0);
  CHECK(s.flight.k2 == 1.5);
  CHECK(s.flight.kp == 10.0);
  for (const char* name : {"paper_ground.json", "flight_benchmark.json"}) {
    CHECK_NOTHROW(parse_scenario(kScenarios + "/" + name));
  }
}

TEST_CASE("diagnostics name the field") {
  CHECK(config_error("").find("byte 0") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "fov": {"gamma_deg": 200}})").find("fov.gamma") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "grid": {"n_max": -2}})").find("grid.n_max") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "extra": 1})").find("extra: unknown field") != std::string::npos);
  CHECK(config_error(R"({"target": {"position": [0, 0, 0]}})").find("seed") != std::string::npos);
  CHECK(config_error(R"({"seed": 1, "target": {"position": [0, 0]}})").find("target.position") !=
        std::string::npos);
  CHECK(config_error(R"({"seed": 1, "flight": {"controllers": ["pid"]}})").find("flight.controllers[0]") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_scenario(kScenarios + "/does_not_exist.json"), ConfigError);
}

TEST_CASE("serialization is canonical and stable") {
  const Scenario s = parse_scenario(kScenarios + "/flight_benchmark.json");
  const std::string once = serialize_scenario(s);
  const std::string twice = serialize_scenario(parse_scenario_text(once));
  CHECK(once == twice);
  CHECK(serialize_scenario(parse_scenario_text(R"({"seed": 3})")) ==
        serialize_scenario(parse_scenario_text(serialize_scenario(parse_scenario_text(R"({"seed": 3})")))));
}

TEST_CASE("formation documents") {
  const FormationDocument doc = parse_formation(kScenarios + "/reference_formation.json");
  CHECK(doc.formation.size() == 6);
  CHECK(eval_fim(doc).log_det == doctest::Approx(16.48196).epsilon(1e-5));

  FormationDocument empty = doc;
  empty.formation.members.clear();
  CHECK(eval_fim(empty).log_det == doctest::Approx(3 * std::log(1e-6)));

  // Doubling every member: det(2F + eps I) <= 8 det(F + eps I) for eps > 0.
  FormationDocument twice = doc;
  twice.formation.members.insert(twice.formation.members.end(), doc.formation.members.begin(),
                                 doc.formation.members.end());
  const double a = eval_fim(doc).log_det, b = eval_fim(twice).log_det;
  CHECK(b > a);
  CHECK(b <= a + 3 * std::log(2.0) + 1e-9);

  const auto report = nlohmann::json::parse(eval_fim(doc).report);
  CHECK(report["noise_convention"]["log_det_F_if_entries_were_variances"].get<double>() > 19.0);

  CHECK_THROWS_AS(parse_formation_text(R"({"members": [{"sensor": "sonar", "position": [1, 0, 0]}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_formation_text(R"({"members": [{"sensor": "lidar", "position": [0, 0, 3]}]})"),
                  DegenerateGeometry);
}

TEST_CASE("pipeline report and stage gating") {
  const Scenario s = parse_scenario(kScenarios + "/paper_default.json");
  RunOptions opts;
  opts.stage = Stage::Allocate;
  const RunOutput partial = run_pipeline(s, opts);
  const auto p = nlohmann::json::parse(partial.report());
  CHECK(p["allocation"]["num_uav"] == 6);
  CHECK_FALSE(p.contains("formation"));
  CHECK(partial.files.size() == 2);

  opts.stage = Stage::Fly;
  opts.controller = Controller::Quad;
  opts.seed_override = 11;
  const RunOutput full = run_pipeline(s, opts);
  const auto j = nlohmann::json::parse(full.report());
  CHECK(j["seed"] == 11);
  CHECK(j["formation"]["after"]["Gamma"].get<double>() > j["formation"]["before"]["Gamma"].get<double>());
  CHECK(j["flight"]["controllers"].contains("quad"));
  CHECK(full.report() == run_pipeline(s, opts).report());

  Scenario broken = s;
  broken.weights.rho = 1e9;
  try {
    run_pipeline(broken, RunOptions{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("formation: ", 0) == 0);
    CHECK(e.kind() == ErrorKind::DegenerateGeometry);
  }
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "fimform_atomic_test";
  std::filesystem::remove_all(dir);
  write_outputs(RunOutput{{{"a.txt", "one"}}}, dir);
  write_outputs(RunOutput{{{"a.txt", "two"}}}, dir);
  CHECK(read_file(dir / "a.txt") == "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  std::filesystem::remove_all(dir);
}

}
