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

#ifndef OWNTRANS_SCENARIO_HPP_
#define OWNTRANS_SCENARIO_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace owntrans {

class ScenarioError : public std::runtime_error {
 public:
  enum class Category { kParse, kSchema, kInvariant };

  ScenarioError(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const { return category_; }

 private:
  Category category_;
};

struct AgentSpec {
  std::string name;
  bool honest = true;
  // The central key server. Exactly one per scenario.
  bool server = false;

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct SessionSpec {
  std::string old_owner;
  std::string new_owner;

  friend bool operator==(const SessionSpec&, const SessionSpec&) = default;
};

struct IntruderSpec {
  // Atom display names: agent names, P_CKS, SK_CKS, PW_A, N_I, Ack, ...
  std::vector<std::string> initial_knowledge;
  bool active = true;

  friend bool operator==(const IntruderSpec&, const IntruderSpec&) = default;
};

struct BoundsSpec {
  int max_depth = 40;
  int max_sessions = 2;

  friend bool operator==(const BoundsSpec&, const BoundsSpec&) = default;
};

struct FlagsSpec {
  bool ticket_weak = false;
  // Atom display names handed to the intruder up front.
  std::vector<std::string> leak;

  friend bool operator==(const FlagsSpec&, const FlagsSpec&) = default;
};

/**
 * One verification instance. See docs/scenario.schema.json for the file
 * format; scenarios/ holds the bundled instances.
 */
struct Scenario {
  std::string name;
  std::string description;
  std::vector<AgentSpec> agents;
  std::vector<SessionSpec> sessions;
  IntruderSpec intruder;
  BoundsSpec bounds;
  FlagsSpec flags;
  std::vector<std::string> properties;

  const AgentSpec* FindAgent(std::string_view name) const;
  const AgentSpec& Server() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws ScenarioError. Parse errors carry line and column; schema errors the
// JSON path of the offending field; invariant errors name the invariant.
Scenario ParseScenario(std::string_view json_text);
Scenario LoadScenario(const std::string& path);
std::string ScenarioToJson(const Scenario& scenario, int indent = 2);

// Checks the cross-field invariants; ParseScenario already calls it.
void ValidateScenario(const Scenario& scenario);

}  // namespace owntrans

#endif  // OWNTRANS_SCENARIO_HPP_
