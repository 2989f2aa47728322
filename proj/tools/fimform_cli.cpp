// Command-line front end. Uses only the C interface in fimform.h.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fimform.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

int exit_code(ff_status st) {
  switch (st) {
    case FF_OK: return kExitOk;
    case FF_ERR_DEGENERATE:
    case FF_ERR_NUMERIC:
    case FF_ERR_INTERNAL: return kExitNumeric;
    default: return kExitConfig;
  }
}

int report_failure(ff_status st) {
  std::cerr << "fimform: " << ff_status_name(st) << ": " << ff_last_error() << "\n";
  return exit_code(st);
}

struct RunArgs {
  std::string scenario;
  std::string out_dir = "out";
  std::string stage;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> controller;
};

int run(const RunArgs& args, ff_stage stage) {
  ff_scenario* sc = nullptr;
  ff_status st = ff_scenario_load(args.scenario.c_str(), &sc);
  if (st != FF_OK) return report_failure(st);
  if (args.seed) ff_scenario_set_seed(sc, *args.seed);
  if (args.controller) st = ff_scenario_set_controller(sc, args.controller->c_str());

  ff_report* rep = nullptr;
  if (st == FF_OK) st = ff_run(sc, stage, &rep);
  if (st == FF_OK) st = ff_report_write(rep, args.out_dir.c_str());
  if (st == FF_OK) {
    size_t n = 0;
    ff_report_file_count(rep, &n);
    for (size_t i = 0; i < n; ++i) {
      const char* name = nullptr;
      ff_report_file_name(rep, i, &name);
      std::cout << args.out_dir << "/" << name << "\n";
    }
  }
  const int code = st == FF_OK ? kExitOk : report_failure(st);
  ff_report_free(rep);
  ff_scenario_free(sc);
  return code;
}

int eval_fim(const std::string& path, const std::string& out_dir) {
  double log_det = 0.0;
  char* report = nullptr;
  const ff_status st = ff_eval_fim(path.c_str(), &log_det, &report);
  if (st != FF_OK) return report_failure(st);
  std::printf("%.10f\n", log_det);
  ff_status wst = FF_OK;
  if (!out_dir.empty()) wst = ff_write_text(out_dir.c_str(), "fim_report.json", report);
  ff_string_free(report);
  return wst == FF_OK ? kExitOk : report_failure(wst);
}

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", args.out_dir, "Directory for report.json and CSV traces")
      ->capture_default_str();
  cmd->add_option("--seed-override", args.seed, "Replace the scenario seed");
  cmd->add_option("--controller", args.controller, "Flight controller (replaces the scenario list)")
      ->check(CLI::IsMember({"log", "quad", "apf"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV formation design: sensor allocation, FOV formation optimization, flight simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ff_version());

  RunArgs args;
  auto* allocate = app.add_subcommand("allocate", "Greedy UAV/sensor allocation");
  auto* formation = app.add_subcommand("formation", "Allocation, then sector-gated flip optimization");
  auto* fly = app.add_subcommand("fly", "Full pipeline ending in the flight simulation");
  auto* pipeline = app.add_subcommand("pipeline", "Run the pipeline up to --stage");
  for (auto* cmd : {allocate, formation, fly, pipeline}) add_run_options(cmd, args);
  args.stage = "fly";
  pipeline->add_option("--stage", args.stage, "Last stage to run")
      ->check(CLI::IsMember({"allocate", "formation", "fly"}))
      ->capture_default_str();

  std::string formation_path, fim_out;
  auto* evalfim = app.add_subcommand("eval-fim", "Log det of the total FIM for an explicit pose list");
  evalfim->add_option("--formation", formation_path, "Formation JSON file")->required();
  evalfim->add_option("--out-dir", fim_out, "Also write fim_report.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*allocate) return run(args, FF_STAGE_ALLOCATE);
  if (*formation) return run(args, FF_STAGE_FORMATION);
  if (*fly) return run(args, FF_STAGE_FLY);
  if (*pipeline) {
    const ff_stage stage = args.stage == "allocate"    ? FF_STAGE_ALLOCATE
                           : args.stage == "formation" ? FF_STAGE_FORMATION
                                                       : FF_STAGE_FLY;
    return run(args, stage);
  }
  return eval_fim(formation_path, fim_out);
}
