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

#ifndef OWNTRANS_REPORT_HPP_
#define OWNTRANS_REPORT_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "owntrans/explorer.hpp"
#include "owntrans/scenario.hpp"

namespace owntrans {

// Malformed report or counterexample JSON.
class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportDocument {
  Scenario scenario;
  std::size_t state_count = 0;
  std::size_t transition_count = 0;
  int depth_reached = 0;
  bool bound_hit = false;
  Coverage coverage;
  std::vector<Verdict> verdicts;
  double duration_seconds = 0.0;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

ReportDocument MakeReport(const Scenario& scenario, const ExploreResult& result);

// Schema: docs/report.schema.json. Terms are written both pretty-printed and
// as hex canonical encodings; only the hex form is read back.
std::string ReportToJson(const ReportDocument& report, int indent = 2);
ReportDocument ReportFromJson(std::string_view json_text);

// Rendered from the JSON form, so both carry the same facts.
std::string ReportToText(const ReportDocument& report);

std::string CounterexampleToJson(const Counterexample& cex, int indent = 2);
// Accepts a counterexample object, or a report (first counterexample found).
Counterexample CounterexampleFromJson(std::string_view json_text);

std::string StateToText(const GlobalState& gs);

std::string HonestRunToJson(const System& sys, const HonestRun& run, int indent = 2);
std::string HonestRunToText(const System& sys, const HonestRun& run);

// Exit status for a verify run: 1 if any Violated, else 2 if any
// InconclusiveAtBound, else 0.
int ExitCodeFor(const std::vector<Verdict>& verdicts);

}  // namespace owntrans

#endif  // OWNTRANS_REPORT_HPP_
