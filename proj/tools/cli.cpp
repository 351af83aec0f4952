/*
 * Copyright (c) 2026, The owntrans Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "owntrans/explorer.hpp"
#include "owntrans/model.hpp"
#include "owntrans/report.hpp"
#include "owntrans/scenario.hpp"

namespace owntrans::cli {

namespace {

struct VerifyArgs {
  std::string scenario;
  std::optional<int> max_depth;
  std::optional<int> max_sessions;
  std::vector<std::string> properties;
  std::string format = "text";
  std::string out;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int Verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  Scenario scenario = LoadScenario(args.scenario);
  if (args.max_depth) scenario.bounds.max_depth = *args.max_depth;
  if (args.max_sessions) {
    // Keep the first N sessions.
    scenario.bounds.max_sessions = *args.max_sessions;
    if (*args.max_sessions >= 0 &&
        scenario.sessions.size() > static_cast<std::size_t>(*args.max_sessions)) {
      scenario.sessions.resize(static_cast<std::size_t>(*args.max_sessions));
    }
  }
  if (!args.properties.empty()) scenario.properties = args.properties;
  ValidateScenario(scenario);

  const System sys = System::FromScenario(scenario);
  ExploreOptions options;
  options.max_depth = scenario.bounds.max_depth;
  for (const auto& name : scenario.properties) options.properties.push_back(FindProperty(name)->id);
  const ReportDocument report = MakeReport(scenario, Explore(sys, options));

  const std::string text =
      args.format == "json" ? ReportToJson(report) + "\n" : ReportToText(report);
  if (args.out.empty()) {
    out << text;
  } else {
    std::ofstream f(args.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << args.out << "'\n";
      return kUsageError;
    }
    f << text;
  }
  return ExitCodeFor(report.verdicts);
}

int RunHonest(const std::string& path, const std::string& format, std::ostream& out,
              std::ostream& err) {
  const System sys = System::FromScenario(LoadScenario(path));
  try {
    const HonestRun run = SimulateHonest(sys);
    out << (format == "json" ? HonestRunToJson(sys, run) + "\n" : HonestRunToText(sys, run));
    return 0;
  } catch (const StuckError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int ReplayCmd(const std::string& cex_path, const std::string& scenario_path,
              std::ostream& out, std::ostream& err) {
  const System sys = System::FromScenario(LoadScenario(scenario_path));
  const Counterexample cex = CounterexampleFromJson(ReadFile(cex_path));
  GlobalState reached;
  try {
    reached = Replay(sys, cex.path);
  } catch (const ReplayError& e) {
    err << "error: replay failed at " << e.what() << "\n";
    return 1;
  }
  const bool same = EncodeState(reached) == EncodeState(cex.violating_state) &&
                    reached.depth == cex.violating_state.depth;
  out << "replayed " << cex.path.size() << " transitions for " << cex.property << "\n"
      << StateToText(reached)
      << "matches recorded state: " << (same ? "yes" : "no") << "\n";
  return same ? 0 : 1;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic verifier for the device ownership transfer protocol", "owntrans"};
  app.require_subcommand(1);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Explore a scenario and check its properties");
  verify_cmd->add_option("scenario", verify.scenario, "Scenario JSON file")->required();
  verify_cmd->add_option("--max-depth", verify.max_depth, "Depth bound (transitions)")
      ->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--max-sessions", verify.max_sessions, "Use at most N sessions")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--property", verify.properties, "Property id (repeatable)");
  verify_cmd->add_option("--format", verify.format)->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_option("--out", verify.out, "Write the report to FILE");

  std::string honest_path;
  std::string honest_format = "text";
  auto* honest_cmd = app.add_subcommand("run-honest", "Print the undisturbed protocol run");
  honest_cmd->add_option("scenario", honest_path, "Scenario JSON file")->required();
  honest_cmd->add_option("--format", honest_format)->check(CLI::IsMember({"text", "json"}));

  std::string cex_path;
  std::string replay_scenario;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a counterexample against a scenario");
  replay_cmd->add_option("counterexample", cex_path, "Counterexample or report JSON")
      ->required();
  replay_cmd->add_option("scenario", replay_scenario, "Scenario JSON file")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*verify_cmd) return Verify(verify, out, err);
    if (*honest_cmd) return RunHonest(honest_path, honest_format, out, err);
    if (*replay_cmd) return ReplayCmd(cex_path, replay_scenario, out, err);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ReportError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace owntrans::cli
