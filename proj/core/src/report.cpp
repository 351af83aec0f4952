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

#include "owntrans/report.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace owntrans {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Writing

json TermJson(Term t) { return {{"pretty", Pretty(t)}, {"hex", ToHex(t.encoding())}}; }

json TransitionJson(const Transition& t, std::size_t step) {
  json j{{"step", step},
         {"kind", ToString(t.kind)},
         {"actor", TermJson(t.actor)},
         {"role", ToString(t.role)},
         {"session", t.session_id},
         {"label", t.label},
         {"message", t.message ? TermJson(*t.message) : json(nullptr)},
         {"text", t.ToString()}};
  return j;
}

json SignalJson(const SignalEvent& ev) {
  json payload = json::array();
  for (Term t : ev.payload) payload.push_back(TermJson(t));
  return {{"kind", ToString(ev.kind)},   {"actor", TermJson(ev.actor)},
          {"partner", TermJson(ev.partner)}, {"payload", payload},
          {"session", ev.session_id},    {"text", ev.ToString()}};
}

json StateJson(const GlobalState& gs) {
  json roles = json::array();
  for (const RoleState& rs : gs.roles) {
    json bindings = json::object();
    for (const auto& [name, t] : rs.bindings) bindings[name] = TermJson(t);
    roles.push_back({{"role", ToString(rs.role)},
                     {"agent", TermJson(rs.agent)},
                     {"session", rs.session_id},
                     {"pc", rs.pc},
                     {"status", rs.completed() ? "completed" : "running"},
                     {"bindings", bindings}});
  }
  json knowledge = json::array();
  for (Term f : gs.kb.facts()) knowledge.push_back(TermJson(f));
  json trace = json::array();
  for (const SignalEvent& ev : gs.trace) trace.push_back(SignalJson(ev));
  return {{"depth", gs.depth},
          {"roles", roles},
          {"knowledge", knowledge},
          {"trace", trace},
          {"encoding", ToHex(EncodeState(gs))}};
}

json CounterexampleJsonValue(const Counterexample& cex) {
  json path = json::array();
  for (std::size_t i = 0; i < cex.path.size(); ++i) {
    path.push_back(TransitionJson(cex.path[i], i + 1));
  }
  return {{"property", cex.property},
          {"length", cex.path.size()},
          {"path", path},
          {"violating_state", StateJson(cex.violating_state)}};
}

json TableIiJson(const Verdict& v) {
  auto info = FindProperty(v.property);
  if (!info || info->table_rows.empty() ||
      v.status == VerdictStatus::kInconclusiveAtBound) {
    return nullptr;
  }
  const bool holds = v.status == VerdictStatus::kHolds;
  return {{"rows", info->table_rows},
          {"value", holds ? info->table_value_when_holds : !info->table_value_when_holds}};
}

json ReportJsonValue(const ReportDocument& r) {
  json verdicts = json::array();
  for (const Verdict& v : r.verdicts) {
    auto info = FindProperty(v.property);
    verdicts.push_back(
        {{"property", v.property},
         {"kind", info ? json(ToString(info->kind)) : json(nullptr)},
         {"status", ToString(v.status)},
         {"table_ii", TableIiJson(v)},
         {"counterexample",
          v.counterexample ? CounterexampleJsonValue(*v.counterexample) : json(nullptr)},
         {"witness", v.witness ? CounterexampleJsonValue(*v.witness) : json(nullptr)}});
  }
  return {{"tool", "owntrans"},
          {"scenario", json::parse(ScenarioToJson(r.scenario))},
          {"state_count", r.state_count},
          {"transition_count", r.transition_count},
          {"depth_reached", r.depth_reached},
          {"bound_hit", r.bound_hit},
          {"coverage",
           {{"claim_secret", r.coverage.claim_secret},
            {"running", r.coverage.running},
            {"commit", r.coverage.commit},
            {"honest_completion", r.coverage.honest_completion}}},
          {"verdicts", verdicts},
          {"duration_seconds", r.duration_seconds}};
}

// ---------------------------------------------------------------------------
// Reading

const json& Field(const json& obj, const char* key) {
  if (!obj.is_object()) throw ReportError(std::string("expected an object around '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) throw ReportError(std::string("missing field '") + key + "'");
  return *it;
}

Term ReadTerm(const json& j) {
  try {
    return CanonicalDecode(FromHex(Field(j, "hex").get<std::string>()));
  } catch (const TermError& e) {
    throw ReportError(std::string("bad term: ") + e.what());
  }
}

Role ReadRole(const json& j) {
  const auto name = j.get<std::string>();
  for (Role r : {Role::kOldOwner, Role::kNewOwner, Role::kCks}) {
    if (ToString(r) == name) return r;
  }
  throw ReportError("unknown role '" + name + "'");
}

Transition ReadTransition(const json& j) {
  auto kind = TransitionKindFromString(Field(j, "kind").get<std::string>());
  if (!kind) throw ReportError("unknown transition kind");
  Transition t{*kind, ReadTerm(Field(j, "actor")), ReadRole(Field(j, "role")),
               Field(j, "session").get<int>(), Field(j, "label").get<std::string>(),
               std::nullopt};
  const json& msg = Field(j, "message");
  if (!msg.is_null()) t.message = ReadTerm(msg);
  return t;
}

GlobalState ReadState(const json& j) {
  GlobalState gs;
  gs.depth = Field(j, "depth").get<int>();
  for (const json& r : Field(j, "roles")) {
    RoleState rs{ReadRole(Field(r, "role")), ReadTerm(Field(r, "agent")),
                 Field(r, "pc").get<int>(), {}, Field(r, "session").get<int>()};
    for (const auto& [name, t] : Field(r, "bindings").items()) {
      rs.bindings.emplace(name, ReadTerm(t));
    }
    gs.roles.push_back(std::move(rs));
  }
  std::vector<Term> facts;
  for (const json& f : Field(j, "knowledge")) facts.push_back(ReadTerm(f));
  gs.kb = KnowledgeBase(facts);
  for (const json& e : Field(j, "trace")) {
    auto kind = SignalKindFromString(Field(e, "kind").get<std::string>());
    if (!kind) throw ReportError("unknown signal kind");
    SignalEvent ev{*kind, ReadTerm(Field(e, "actor")), ReadTerm(Field(e, "partner")),
                   {}, Field(e, "session").get<int>()};
    for (const json& p : Field(e, "payload")) ev.payload.push_back(ReadTerm(p));
    gs.trace.push_back(std::move(ev));
  }
  return gs;
}

Counterexample ReadCounterexample(const json& j) {
  Counterexample cex;
  cex.property = Field(j, "property").get<std::string>();
  for (const json& t : Field(j, "path")) cex.path.push_back(ReadTransition(t));
  cex.violating_state = ReadState(Field(j, "violating_state"));
  return cex;
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ReportError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename Fn>
auto Guarded(Fn fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ReportError(std::string("malformed document: ") + e.what());
  }
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void RenderPath(std::ostringstream& os, const json& cex, const char* what) {
  os << "\n" << what << " for " << cex["property"].get<std::string>() << " ("
     << cex["length"].get<std::size_t>() << " transitions):\n";
  for (const json& t : cex["path"]) {
    os << std::setw(5) << t["step"].get<std::size_t>() << ". "
       << t["text"].get<std::string>() << "\n";
  }
  const json& st = cex["violating_state"];
  os << "  final state:\n";
  for (const json& r : st["roles"]) {
    os << "    " << Pad(r["role"].get<std::string>(), 9) << " "
       << r["agent"]["pretty"].get<std::string>() << " session "
       << r["session"].get<int>() << ": " << r["status"].get<std::string>()
       << " (pc " << r["pc"].get<int>() << ")\n";
  }
  os << "    trace:";
  if (st["trace"].empty()) os << " (empty)";
  for (const json& e : st["trace"]) os << "\n      " << e["text"].get<std::string>();
  os << "\n    intruder knows " << st["knowledge"].size() << " facts\n";
}

}  // namespace

ReportDocument MakeReport(const Scenario& scenario, const ExploreResult& result) {
  ReportDocument r;
  r.scenario = scenario;
  r.state_count = result.states;
  r.transition_count = result.transitions;
  r.depth_reached = result.depth_reached;
  r.bound_hit = result.bound_hit;
  r.coverage = result.coverage;
  r.verdicts = result.verdicts;
  r.duration_seconds = result.seconds;
  return r;
}

std::string ReportToJson(const ReportDocument& report, int indent) {
  return ReportJsonValue(report).dump(indent);
}

ReportDocument ReportFromJson(std::string_view json_text) {
  const json doc = ParseJson(json_text);
  return Guarded([&] {
    ReportDocument r;
    try {
      r.scenario = ParseScenario(Field(doc, "scenario").dump());
    } catch (const ScenarioError& e) {
      throw ReportError(std::string("bad scenario echo: ") + e.what());
    }
    r.state_count = Field(doc, "state_count").get<std::size_t>();
    r.transition_count = Field(doc, "transition_count").get<std::size_t>();
    r.depth_reached = Field(doc, "depth_reached").get<int>();
    r.bound_hit = Field(doc, "bound_hit").get<bool>();
    const json& cov = Field(doc, "coverage");
    r.coverage.claim_secret = Field(cov, "claim_secret").get<bool>();
    r.coverage.running = Field(cov, "running").get<bool>();
    r.coverage.commit = Field(cov, "commit").get<bool>();
    r.coverage.honest_completion = Field(cov, "honest_completion").get<bool>();
    for (const json& v : Field(doc, "verdicts")) {
      Verdict verdict;
      verdict.property = Field(v, "property").get<std::string>();
      auto status = VerdictStatusFromString(Field(v, "status").get<std::string>());
      if (!status) throw ReportError("unknown verdict status");
      verdict.status = *status;
      if (const json& c = Field(v, "counterexample"); !c.is_null()) {
        verdict.counterexample = ReadCounterexample(c);
      }
      if (const json& w = Field(v, "witness"); !w.is_null()) {
        verdict.witness = ReadCounterexample(w);
      }
      r.verdicts.push_back(std::move(verdict));
    }
    r.duration_seconds = Field(doc, "duration_seconds").get<double>();
    return r;
  });
}

std::string ReportToText(const ReportDocument& report) {
  const json doc = ReportJsonValue(report);
  std::ostringstream os;
  const json& sc = doc["scenario"];
  os << "scenario: " << sc["name"].get<std::string>() << " ("
     << sc["sessions"].size() << " session(s), "
     << (sc["flags"]["ticket_weak"].get<bool>() ? "weak" : "strong") << " ticket)\n";
  os << "states: " << doc["state_count"].get<std::size_t>()
     << "  transitions: " << doc["transition_count"].get<std::size_t>()
     << "  depth: " << doc["depth_reached"].get<int>()
     << "  bound hit: " << (doc["bound_hit"].get<bool>() ? "yes" : "no") << "\n";
  const json& cov = doc["coverage"];
  auto yn = [](const json& b) { return b.get<bool>() ? "yes" : "no"; };
  os << "coverage: ClaimSecret " << yn(cov["claim_secret"]) << ", Running "
     << yn(cov["running"]) << ", Commit " << yn(cov["commit"])
     << ", honest completion " << yn(cov["honest_completion"]) << "\n";
  os << "time: " << std::fixed << std::setprecision(3)
     << doc["duration_seconds"].get<double>() << " s\n\n";

  for (const json& v : doc["verdicts"]) {
    os << Pad(v["property"].get<std::string>(), 26) << " ";
    const json& t = v["table_ii"];
    if (t.is_null()) {
      os << v["status"].get<std::string>() << "\n";
      continue;
    }
    os << Pad(v["status"].get<std::string>(), 20) << "[Table II row";
    if (t["rows"].size() > 1) os << "s";
    bool first = true;
    for (const json& row : t["rows"]) {
      os << (first ? " " : ", ") << row.get<int>();
      first = false;
    }
    os << ": " << (t["value"].get<bool>() ? "True" : "False") << "]\n";
  }
  for (const json& v : doc["verdicts"]) {
    if (!v["counterexample"].is_null()) RenderPath(os, v["counterexample"], "counterexample");
    if (!v["witness"].is_null()) RenderPath(os, v["witness"], "witness");
  }
  return os.str();
}

std::string CounterexampleToJson(const Counterexample& cex, int indent) {
  return CounterexampleJsonValue(cex).dump(indent);
}

Counterexample CounterexampleFromJson(std::string_view json_text) {
  const json doc = ParseJson(json_text);
  return Guarded([&] {
    if (doc.contains("verdicts")) {
      for (const json& v : doc["verdicts"]) {
        if (v.contains("counterexample") && !v["counterexample"].is_null()) {
          return ReadCounterexample(v["counterexample"]);
        }
      }
      throw ReportError("report contains no counterexample");
    }
    return ReadCounterexample(doc);
  });
}

std::string StateToText(const GlobalState& gs) {
  std::ostringstream os;
  os << "depth " << gs.depth << "\n";
  for (const RoleState& rs : gs.roles) {
    os << "  " << Pad(std::string(ToString(rs.role)), 9) << " " << Pretty(rs.agent)
       << " session " << rs.session_id << ": "
       << (rs.completed() ? "completed" : "pc " + std::to_string(rs.pc)) << "\n";
  }
  os << "  trace:";
  if (gs.trace.empty()) os << " (empty)";
  for (const SignalEvent& ev : gs.trace) os << "\n    " << ev.ToString();
  os << "\n  intruder knows " << gs.kb.size() << " facts\n";
  return os.str();
}

namespace {

json HonestRunJsonValue(const System& sys, const HonestRun& run) {
  json events = json::array();
  std::size_t messages = 0;
  for (const HonestEvent& e : run.events) {
    if (e.type == HonestEvent::Type::kMessage) {
      ++messages;
      const Term p = *e.payload;
      json key = nullptr;
      if (p.kind() == TermKind::kAEnc || p.kind() == TermKind::kSEnc) {
        key = AtomDisplayName(p.key());
      }
      events.push_back({{"type", "message"},
                        {"session", e.session_id},
                        {"label", e.label},
                        {"from", Pretty(e.from)},
                        {"to", Pretty(e.to)},
                        {"key", key},
                        {"term", Pretty(p)},
                        {"hex", ToHex(p.encoding())}});
    } else {
      const SignalEvent& ev = *e.signal;
      json payload = json::array();
      for (Term t : ev.payload) payload.push_back(Pretty(t));
      events.push_back({{"type", "signal"},
                        {"session", e.session_id},
                        {"kind", ToString(ev.kind)},
                        {"old_owner", Pretty(ev.old_owner())},
                        {"new_owner", Pretty(ev.new_owner())},
                        {"payload", payload},
                        {"text", ev.ToString()}});
    }
  }
  return {{"scenario", sys.scenario().name},
          {"messages", messages},
          {"completed", AllHonestRolesCompleted(run.final_state)},
          {"events", events}};
}

}  // namespace

std::string HonestRunToJson(const System& sys, const HonestRun& run, int indent) {
  return HonestRunJsonValue(sys, run).dump(indent);
}

std::string HonestRunToText(const System& sys, const HonestRun& run) {
  const json doc = HonestRunJsonValue(sys, run);
  std::ostringstream os;
  os << "honest run of " << doc["scenario"].get<std::string>() << "\n";
  const bool many = sys.scenario().sessions.size() > 1;
  for (const json& e : doc["events"]) {
    os << "  ";
    if (many) os << "[s" << e["session"].get<int>() << "] ";
    if (e["type"] == "message") {
      os << Pad(e["label"].get<std::string>(), 4) << e["from"].get<std::string>()
         << " -> " << e["to"].get<std::string>() << " : " << e["term"].get<std::string>()
         << "\n";
    } else {
      os << "signal " << e["text"].get<std::string>() << "\n";
    }
  }
  os << doc["messages"].get<std::size_t>() << " messages, all honest roles "
     << (doc["completed"].get<bool>() ? "completed" : "NOT completed") << "\n";
  return os.str();
}

int ExitCodeFor(const std::vector<Verdict>& verdicts) {
  bool inconclusive = false;
  for (const Verdict& v : verdicts) {
    if (v.status == VerdictStatus::kViolated) return 1;
    if (v.status == VerdictStatus::kInconclusiveAtBound) inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

}  // namespace owntrans
