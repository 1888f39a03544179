// radalloc command-line front end.
//
//   radalloc allocate      --scenario mono.json   [--format table|csv] [--out dir]
//   radalloc allocate-prob --scenario prob.json   [--format table|csv] [--out dir]
//   radalloc plan-fleet    --scenario fleet.json  [--format table|csv|svg] [--out dir] [--rule3 per-sensor|global]
//   radalloc calibrate     --duration-ms t --probability p --distance-km d   (or --scenario fleet.json)
//   radalloc report        --scenario any.json    --out dir   (writes every format the mode supports)
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "radalloc/report.hpp"
#include "radalloc/scenario.hpp"

namespace {

using namespace radalloc;

struct CommonArgs {
  std::string scenario;
  std::string out;
  std::string format = "table";
  std::string rule3;
};

ScenarioFile load(const CommonArgs& args, std::optional<ScenarioMode> expected) {
  ScenarioFile sc = parse_scenario(args.scenario);
  if (expected && sc.mode != *expected)
    throw ScenarioError("mode", "scenario is " + to_string(sc.mode) + ", this command expects " + to_string(*expected));
  if (!args.rule3.empty()) {
    if (sc.mode != ScenarioMode::Fleet) throw std::invalid_argument("--rule3 only applies to fleet scenarios");
    sc.fleet->options.rule3 = parse_rule3(args.rule3);
  }
  return sc;
}

void output(const RunReport& report, const CommonArgs& args) {
  const OutputFormat fmt = parse_format(args.format);
  if (!args.out.empty()) {
    for (const auto& p : emit(report, fmt, args.out)) std::cout << "wrote " << p.string() << '\n';
    return;
  }
  switch (fmt) {
    case OutputFormat::Table: std::cout << format_table(report); break;
    case OutputFormat::Csv: std::cout << format_csv(report); break;
    case OutputFormat::Svg:
      if (!report.fleet) throw std::invalid_argument("svg output is only available for fleet scenarios");
      std::cout << format_svg(*report.fleet);
      break;
  }
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_rule3) {
  cmd->add_option("--scenario", args.scenario, "JSON scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory (default: print to stdout)");
  cmd->add_option("--format", args.format, "table, csv or svg")->check(CLI::IsMember({"table", "csv", "svg"}));
  if (with_rule3)
    cmd->add_option("--rule3", args.rule3, "re-pointing rule variant")->check(CLI::IsMember({"per-sensor", "global"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time allocation for radar detection: single radar and sensor fleets"};
  app.require_subcommand(1);

  CommonArgs alloc_args, prob_args, fleet_args, report_args;
  auto* allocate_cmd = app.add_subcommand("allocate", "water-fill T over point targets of one radar");
  add_common(allocate_cmd, alloc_args, false);
  auto* prob_cmd = app.add_subcommand("allocate-prob", "allocate T over directions from Gaussian priors");
  add_common(prob_cmd, prob_args, false);
  auto* fleet_cmd = app.add_subcommand("plan-fleet", "initial sensor assignment and timeline for a fleet");
  add_common(fleet_cmd, fleet_args, true);

  auto* report_cmd = app.add_subcommand("report", "run any scenario and write every supported format");
  report_cmd->add_option("--scenario", report_args.scenario, "JSON scenario file")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", report_args.out, "output directory")->required();
  report_cmd->add_option("--rule3", report_args.rule3, "re-pointing rule variant (fleet)")
      ->check(CLI::IsMember({"per-sensor", "global"}));

  double duration_ms = 0.0, probability = 0.0, distance_km = 0.0;
  std::string calib_scenario;
  auto* calib_cmd = app.add_subcommand("calibrate", "solve tau = K d^4 for K from one observation");
  auto* dur_opt = calib_cmd->add_option("--duration-ms", duration_ms, "observation time");
  auto* prob_opt = calib_cmd->add_option("--probability", probability, "detection probability reached");
  auto* dist_opt = calib_cmd->add_option("--distance-km", distance_km, "sensor-target distance");
  auto* scen_opt = calib_cmd->add_option("--scenario", calib_scenario, "take the anchor from a scenario's calibration block")
                       ->check(CLI::ExistingFile);
  dur_opt->needs(prob_opt)->needs(dist_opt)->excludes(scen_opt);
  prob_opt->needs(dur_opt);
  dist_opt->needs(dur_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (allocate_cmd->parsed()) {
      output(run(load(alloc_args, ScenarioMode::MonoDeterministic)), alloc_args);
    } else if (prob_cmd->parsed()) {
      output(run(load(prob_args, ScenarioMode::MonoProbabilistic)), prob_args);
    } else if (fleet_cmd->parsed()) {
      output(run(load(fleet_args, ScenarioMode::Fleet)), fleet_args);
    } else if (report_cmd->parsed()) {
      const RunReport rep = run(load(report_args, std::nullopt));
      std::vector<OutputFormat> formats{OutputFormat::Table, OutputFormat::Csv};
      if (rep.fleet) formats.push_back(OutputFormat::Svg);
      for (auto f : formats)
        for (const auto& p : emit(rep, f, report_args.out)) std::cout << "wrote " << p.string() << '\n';
    } else if (calib_cmd->parsed()) {
      CalibrationAnchor anchor;
      if (!calib_scenario.empty()) {
        const ScenarioFile sc = parse_scenario(calib_scenario);
        if (!sc.calibration) throw ScenarioError("calibration", "scenario has no calibration block");
        anchor = *sc.calibration;
      } else if (*dur_opt) {
        anchor = {duration_ms, probability, distance_km};
      } else {
        throw std::invalid_argument("calibrate needs --duration-ms/--probability/--distance-km or --scenario");
      }
      std::printf("scale_ms_per_km4 = %.10g\n", anchor.scale());
    }
  } catch (const ScenarioError& e) {
    std::cerr << "radalloc: scenario error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "radalloc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
