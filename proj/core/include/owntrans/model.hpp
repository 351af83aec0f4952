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

#ifndef OWNTRANS_MODEL_HPP_
#define OWNTRANS_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "owntrans/dolev_yao.hpp"
#include "owntrans/protocol.hpp"
#include "owntrans/scenario.hpp"
#include "owntrans/term.hpp"

namespace owntrans {

struct GlobalState {
  // Ordered by (session_id, role).
  std::vector<RoleState> roles;
  KnowledgeBase kb;
  std::vector<SignalEvent> trace;
  int depth = 0;

  friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

enum class TransitionKind : std::uint8_t {
  kHonestSend,
  kIntruderDeliver,
  kSignalStep,
  kDeviceHandover,
};

std::string_view ToString(TransitionKind kind);
std::optional<TransitionKind> TransitionKindFromString(std::string_view name);

struct Transition {
  TransitionKind kind;
  Term actor;
  Role role;
  int session_id = 0;
  // Action label: message name for sends and receives, signal name otherwise.
  std::string label;
  // Sent or delivered term; empty for signals.
  std::optional<Term> message;

  std::string ToString() const;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/**
 * A scenario compiled into terms: the atom universe, the protocol instance,
 * the initial global state and who is honest.
 *
 * Atom naming: session k (1-based) uses nonces N_A, N_B for k = 1 and
 * N_A<k>, N_B<k> otherwise; a dishonest agent X always uses N_X. The server
 * issues OTCpayload/TempID in session 1 and OTCpayload<k>/TempID<k> later.
 * Every non-server agent X is registered with password PW_X.
 */
class System {
 public:
  // Throws ScenarioError (kInvariant) on unknown atom names or label clashes.
  static System FromScenario(const Scenario& scenario);

  const Scenario& scenario() const { return scenario_; }
  const Protocol& protocol() const { return protocol_; }
  const TermSet& universe() const { return universe_; }
  const GlobalState& initial() const { return initial_; }
  bool intruder_active() const { return scenario_.intruder.active; }

  bool IsHonest(Term agent) const;
  // Atom by display name (A, PW_A, N_A, P_CKS, SK_CKS, Ack, ...).
  std::optional<Term> Lookup(std::string_view display_name) const;

  // Index into roles of the honest co-owner a device receive takes its input
  // from, or nullopt when that co-owner is played by the intruder.
  std::optional<std::size_t> DevicePartner(std::size_t role_index) const;

  // Index of the role (role, session_id) in every state's role vector.
  std::optional<std::size_t> RoleIndex(Role role, int session_id) const;

 private:
  System(Scenario scenario, Protocol protocol);

  Scenario scenario_;
  Protocol protocol_;
  TermSet universe_;
  std::map<std::string, Term, std::less<>> by_name_;
  TermSet honest_;
  GlobalState initial_;
  std::vector<std::optional<std::size_t>> device_partner_;
};

/**
 * Deterministic byte encoding of everything but the depth: roles in order
 * (role, agent, session, pc, bindings by name), knowledge facts in canonical
 * order, then the trace. Two states are equal up to depth iff their
 * encodings are.
 */
std::string EncodeState(const GlobalState& gs);

// Same information keyed by process-local term ids; cheaper to build and
// hash. Only meaningful within one process.
std::string CompactStateKey(const GlobalState& gs);

/**
 * A path from the initial state. For safety properties the last state
 * violates the property; for reachability it is the witness.
 */
struct Counterexample {
  std::string property;
  std::vector<Transition> path;
  GlobalState violating_state;

  friend bool operator==(const Counterexample&, const Counterexample&) = default;
};

}  // namespace owntrans

#endif  // OWNTRANS_MODEL_HPP_
