// specnego: command-line front end for the spectrum-negotiation simulator.
//
//   specnego run <scenario.json> [--out DIR] [--seed N]
//   specnego experiment <exp_i|exp_ii|exp_iii|exp_iv|all> [--out DIR] [--seed N]
//                       [--su-sweep 5,10,15] [--no-plots]
//   specnego topsis <matrix.csv>
//   specnego validate <scenario.json>

#include <CLI11.hpp>

#include <iostream>

#include "specnego/error.hpp"
#include "specnego/experiments.hpp"
#include "specnego/io.hpp"
#include "specnego/kernel.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kParse = 2, kInvalid = 3, kRuntime = 4 };

using namespace specnego;

int cmd_run(const std::string& path, const std::string& out, const std::optional<std::uint64_t>& seed) {
  Scenario s = io::parse_scenario(io::read_file(path));
  if (seed) s.seed = *seed;
  const auto report = sim::run(s, sim::options_from_env());
  for (const auto& p : io::export_report(report, out)) std::cout << "wrote " << p.string() << "\n";
  std::cout << "total_messages " << report.total_messages << "\n"
            << "run_response " << io::format_number(report.run_response) << "\n";
  return kOk;
}

int cmd_experiment(const std::string& which, const std::string& out,
                   const std::optional<std::uint64_t>& seed, const std::vector<int>& sweep,
                   bool plots) {
  std::vector<experiments::ExperimentId> ids;
  if (which == "all") {
    ids = {experiments::ExperimentId::CsuCapacity, experiments::ExperimentId::CsuCount,
           experiments::ExperimentId::MessagesVsCsu, experiments::ExperimentId::Topologies};
  } else if (auto id = experiments::parse_experiment(which)) {
    ids = {*id};
  } else {
    std::cerr << "unknown experiment '" << which << "'\n";
    return kUsage;
  }
  std::filesystem::create_directories(out);
  for (auto id : ids) {
    auto spec = experiments::default_spec(id);
    if (seed) spec.seed = *seed;
    if (!sweep.empty()) spec.su_sweep = sweep;
    spec.run_options = sim::options_from_env();
    const auto table = experiments::run_experiment(spec);
    const std::string stem = std::string(experiments::to_string(id));
    const auto csv = std::filesystem::path(out) / (stem + ".csv");
    io::write_file(csv, io::metrics_table_csv(table));
    std::cout << "wrote " << csv.string() << "\n";
    if (plots) {
      const auto svg = std::filesystem::path(out) / (stem + ".svg");
      io::emit_plot(table, io::default_plot(id), svg);
      std::cout << "wrote " << svg.string() << "\n";
    }
  }
  return kOk;
}

int cmd_topsis(const std::string& path) {
  const auto dm = io::parse_decision_csv(io::read_file(path));
  std::cout << io::format_topsis_csv(dm, mcdm::topsis(dm));
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto s = io::parse_scenario_unchecked(io::read_file(path));
  const auto v = validate(s);
  for (const auto& x : v) std::cout << x.path << ": " << x.message << "\n";
  if (!v.empty()) return kInvalid;
  std::cout << "ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalition-based spectrum negotiation simulator"};
  app.require_subcommand(1);

  std::string out = "./out";
  std::optional<std::uint64_t> seed;
  std::string scenario_path, matrix_path, experiment_id;
  std::vector<int> sweep;
  bool no_plots = false;

  auto* run = app.add_subcommand("run", "Run one scenario and export its report");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out, "Output directory");
  run->add_option("--seed", seed, "Override the scenario seed");

  auto* exp = app.add_subcommand("experiment", "Run a built-in study (exp_i..exp_iv or all)");
  exp->add_option("id", experiment_id, "Experiment id")->required();
  exp->add_option("--out", out, "Output directory");
  exp->add_option("--seed", seed, "Generator seed");
  exp->add_option("--su-sweep", sweep, "SU counts for exp_iv")->delimiter(',');
  exp->add_flag("--no-plots", no_plots, "Skip SVG charts");

  auto* top = app.add_subcommand("topsis", "Rank alternatives of a decision-matrix CSV");
  top->add_option("matrix", matrix_path, "Decision matrix CSV")->required();

  auto* val = app.add_subcommand("validate", "Check a scenario file");
  val->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(scenario_path, out, seed);
    if (*exp) return cmd_experiment(experiment_id, out, seed, sweep, !no_plots);
    if (*top) return cmd_topsis(matrix_path);
    if (*val) return cmd_validate(scenario_path);
  } catch (const io::ValidationError& e) {
    for (const auto& v : e.violations()) std::cerr << v.path << ": " << v.message << "\n";
    return kInvalid;
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
