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

#include "owntrans/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "owntrans/properties.hpp"

namespace owntrans {

using json = nlohmann::json;

namespace {

[[noreturn]] void SchemaError(const std::string& path, const std::string& what) {
  throw ScenarioError(ScenarioError::Category::kSchema, path + ": " + what);
}

[[noreturn]] void InvariantError(const std::string& what) {
  throw ScenarioError(ScenarioError::Category::kInvariant,
                      "invariant violated: " + what);
}

void RejectUnknownKeys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) SchemaError(path + "." + key, "unknown key");
  }
}

const json& RequireObject(const json& v, const std::string& path) {
  if (!v.is_object()) SchemaError(path, "expected an object");
  return v;
}

std::string GetString(const json& obj, const char* key, const std::string& path,
                      bool required, std::string fallback = {}) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) SchemaError(path + "." + key, "missing required field");
    return fallback;
  }
  if (!it->is_string()) SchemaError(path + "." + key, "expected a string");
  return it->get<std::string>();
}

bool GetBool(const json& obj, const char* key, const std::string& path,
             bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) SchemaError(path + "." + key, "expected a boolean");
  return it->get<bool>();
}

int GetInt(const json& obj, const char* key, const std::string& path,
           int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) SchemaError(path + "." + key, "expected an integer");
  return it->get<int>();
}

std::vector<std::string> GetStringList(const json& obj, const char* key,
                                       const std::string& path, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) SchemaError(path + "." + key, "missing required field");
    return {};
  }
  if (!it->is_array()) SchemaError(path + "." + key, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& v = (*it)[i];
    if (!v.is_string()) {
      SchemaError(path + "." + key + "[" + std::to_string(i) + "]",
                  "expected a string");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::pair<std::size_t, std::size_t> LineColumn(std::string_view text,
                                               std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

const AgentSpec* Scenario::FindAgent(std::string_view agent) const {
  for (const auto& a : agents) {
    if (a.name == agent) return &a;
  }
  return nullptr;
}

const AgentSpec& Scenario::Server() const {
  for (const auto& a : agents) {
    if (a.server) return a;
  }
  throw ScenarioError(ScenarioError::Category::kInvariant,
                      "invariant violated: exactly one CKS");
}

Scenario ParseScenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    auto [line, col] = LineColumn(json_text, e.byte);
    std::ostringstream os;
    os << "parse error at line " << line << ", column " << col << ": " << e.what();
    throw ScenarioError(ScenarioError::Category::kParse, os.str());
  }

  RequireObject(doc, "$");
  RejectUnknownKeys(doc, "$",
                    {"name", "description", "agents", "sessions", "intruder",
                     "bounds", "flags", "properties"});

  Scenario s;
  s.name = GetString(doc, "name", "$", true);
  s.description = GetString(doc, "description", "$", false);

  auto agents = doc.find("agents");
  if (agents == doc.end()) SchemaError("$.agents", "missing required field");
  if (!agents->is_array()) SchemaError("$.agents", "expected an array");
  for (std::size_t i = 0; i < agents->size(); ++i) {
    const std::string path = "$.agents[" + std::to_string(i) + "]";
    const json& a = RequireObject((*agents)[i], path);
    RejectUnknownKeys(a, path, {"name", "honest", "server"});
    AgentSpec spec;
    spec.name = GetString(a, "name", path, true);
    spec.honest = GetBool(a, "honest", path, true);
    spec.server = GetBool(a, "server", path, false);
    s.agents.push_back(std::move(spec));
  }

  auto sessions = doc.find("sessions");
  if (sessions == doc.end()) SchemaError("$.sessions", "missing required field");
  if (!sessions->is_array()) SchemaError("$.sessions", "expected an array");
  for (std::size_t i = 0; i < sessions->size(); ++i) {
    const std::string path = "$.sessions[" + std::to_string(i) + "]";
    const json& v = RequireObject((*sessions)[i], path);
    RejectUnknownKeys(v, path, {"old_owner", "new_owner"});
    s.sessions.push_back(SessionSpec{GetString(v, "old_owner", path, true),
                                     GetString(v, "new_owner", path, true)});
  }

  if (auto it = doc.find("intruder"); it != doc.end()) {
    const json& v = RequireObject(*it, "$.intruder");
    RejectUnknownKeys(v, "$.intruder", {"initial_knowledge", "active"});
    s.intruder.initial_knowledge =
        GetStringList(v, "initial_knowledge", "$.intruder", false);
    s.intruder.active = GetBool(v, "active", "$.intruder", true);
  }
  if (auto it = doc.find("bounds"); it != doc.end()) {
    const json& v = RequireObject(*it, "$.bounds");
    RejectUnknownKeys(v, "$.bounds", {"max_depth", "max_sessions"});
    s.bounds.max_depth = GetInt(v, "max_depth", "$.bounds", s.bounds.max_depth);
    s.bounds.max_sessions =
        GetInt(v, "max_sessions", "$.bounds", s.bounds.max_sessions);
  }
  if (auto it = doc.find("flags"); it != doc.end()) {
    const json& v = RequireObject(*it, "$.flags");
    RejectUnknownKeys(v, "$.flags", {"ticket_weak", "leak"});
    s.flags.ticket_weak = GetBool(v, "ticket_weak", "$.flags", false);
    s.flags.leak = GetStringList(v, "leak", "$.flags", false);
  }
  s.properties = GetStringList(doc, "properties", "$", true);

  ValidateScenario(s);
  return s;
}

void ValidateScenario(const Scenario& s) {
  std::set<std::string> names;
  int servers = 0;
  bool any_dishonest = false;
  for (const auto& a : s.agents) {
    if (a.name.empty()) InvariantError("agent names are non-empty");
    if (!names.insert(a.name).second) {
      InvariantError("agent names are unique ('" + a.name + "' repeated)");
    }
    if (a.server) {
      ++servers;
      if (!a.honest) InvariantError("the CKS is honest");
    }
    if (!a.honest) any_dishonest = true;
  }
  if (servers != 1) InvariantError("exactly one CKS");

  if (s.bounds.max_depth < 0) InvariantError("max_depth >= 0");
  if (s.bounds.max_sessions < 1) InvariantError("max_sessions >= 1");
  if (s.sessions.empty()) InvariantError("at least one session");
  if (static_cast<int>(s.sessions.size()) > s.bounds.max_sessions) {
    InvariantError("session count <= max_sessions (" +
                   std::to_string(s.sessions.size()) + " > " +
                   std::to_string(s.bounds.max_sessions) + ")");
  }
  for (const auto& session : s.sessions) {
    for (const std::string* who : {&session.old_owner, &session.new_owner}) {
      const AgentSpec* a = s.FindAgent(*who);
      if (a == nullptr) InvariantError("session agents are declared ('" + *who + "')");
      if (a->server) InvariantError("the CKS does not own devices");
    }
    if (session.old_owner == session.new_owner) {
      InvariantError("old and new owner differ");
    }
  }

  bool wants_unreachability = false;
  for (const auto& id : s.properties) {
    auto prop = FindProperty(id);
    if (!prop) InvariantError("known property ids ('" + id + "')");
    if (prop->kind == PropertyKind::kUnreachability) wants_unreachability = true;
  }
  if (wants_unreachability && !any_dishonest) {
    InvariantError(
        "at least one dishonest agent when an Unreachability property is selected");
  }
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioError(ScenarioError::Category::kParse,
                        "cannot open scenario file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScenario(buf.str());
}

std::string ScenarioToJson(const Scenario& s, int indent) {
  json doc;
  doc["name"] = s.name;
  if (!s.description.empty()) doc["description"] = s.description;
  doc["agents"] = json::array();
  for (const auto& a : s.agents) {
    json j{{"name", a.name}, {"honest", a.honest}};
    if (a.server) j["server"] = true;
    doc["agents"].push_back(std::move(j));
  }
  doc["sessions"] = json::array();
  for (const auto& session : s.sessions) {
    doc["sessions"].push_back(
        {{"old_owner", session.old_owner}, {"new_owner", session.new_owner}});
  }
  doc["intruder"] = {{"initial_knowledge", s.intruder.initial_knowledge},
                     {"active", s.intruder.active}};
  doc["bounds"] = {{"max_depth", s.bounds.max_depth},
                   {"max_sessions", s.bounds.max_sessions}};
  doc["flags"] = {{"ticket_weak", s.flags.ticket_weak}, {"leak", s.flags.leak}};
  doc["properties"] = s.properties;
  return doc.dump(indent);
}

}  // namespace owntrans
