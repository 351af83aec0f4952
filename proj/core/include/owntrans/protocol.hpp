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

#ifndef OWNTRANS_PROTOCOL_HPP_
#define OWNTRANS_PROTOCOL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "owntrans/term.hpp"

namespace owntrans {

// Misuse of the step interface (e.g. input offered to a send step).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Role : std::uint8_t { kOldOwner = 0, kNewOwner = 1, kCks = 2 };

std::string_view ToString(Role role);

enum class SignalKind : std::uint8_t {
  kClaimSecret = 1,
  kRunningOldOwner = 2,
  kCommitNewOwner = 3,
};

std::string_view ToString(SignalKind kind);
std::optional<SignalKind> SignalKindFromString(std::string_view name);

/**
 * Instrumentation event. For Running the actor is the old owner and the
 * partner the new owner; for Commit it is the other way round. Use
 * old_owner()/new_owner() when the direction matters.
 *
 * Payloads: ClaimSecret carries [secret]; Running and Commit carry
 * [N_A, N_B].
 */
struct SignalEvent {
  SignalKind kind;
  Term actor;
  Term partner;
  std::vector<Term> payload;
  int session_id = 0;

  Term old_owner() const {
    return kind == SignalKind::kCommitNewOwner ? partner : actor;
  }
  Term new_owner() const {
    return kind == SignalKind::kCommitNewOwner ? actor : partner;
  }

  std::string ToString() const;

  friend bool operator==(const SignalEvent&, const SignalEvent&) = default;
};

enum class Channel : std::uint8_t {
  kNetwork,
  // Hand-over of the physical device between the two owners of a session.
  kDevice,
};

struct Guard {
  enum class Kind : std::uint8_t {
    kPasswordOf,      // binding[a] is the registered password of binding[b]
    kDistinct,        // binding[a] != binding[b]
    kRegisteredUser,  // binding[a] is a registered (non-server) user
  };
  Kind kind;
  std::string a;
  std::string b;
};

struct SendAction {
  std::string label;
  Pattern to;
  Pattern payload;
  // Remember the sent term under this name.
  std::optional<std::string> bind_as;
};

struct ReceiveAction {
  std::string label;
  Channel channel = Channel::kNetwork;
  Pattern pattern;
  std::vector<Guard> guards;
  // Bind the whole received term under this name.
  std::optional<std::string> bind_as;
};

struct SignalAction {
  SignalKind kind;
  std::string actor;
  std::string partner;
  std::vector<std::string> payload;
};

struct DoneAction {};

using RoleAction = std::variant<SendAction, ReceiveAction, SignalAction, DoneAction>;

struct ProtocolConfig {
  Term server = Term::Agent("CKS");
  // Registered users and their passwords. The server is not a user.
  std::map<Term, Term, CanonicalLess> passwords;
  // Ticket without nonces; the server then takes the new owner's nonce from
  // M3 on trust.
  bool ticket_weak = false;
};

/**
 * Role scripts for the ownership transfer.
 *
 *   M1  A   -> CKS : {ID_A . PW_A . N_A . OTR}_PCKS,  OTR = {ID_A . ID_B . N_B}_PCKS
 *   M2  CKS -> A   : Ticket = {Ack . ID_A . ID_B . N_A . N_B}_PCKS
 *   M3  B   -> CKS : {ID_B . Ticket . N_B}_PCKS
 *   M4  CKS -> B   : {OTC}_N_A
 *   M5  A   -> CKS : {OTC}_PCKS
 *   M6  CKS -> B   : {TempID}_N_B
 *
 * The ticket reaches B, and M4 reaches A, by handing the device over; those
 * receives use Channel::kDevice.
 */
class Protocol {
 public:
  explicit Protocol(ProtocolConfig config);

  const ProtocolConfig& config() const { return config_; }
  Term server() const { return config_.server; }
  Term public_key() const { return public_key_; }
  Term private_key() const { return private_key_; }
  Term ack() const { return ack_; }

  // Action templates over the role's binding names.
  const std::vector<RoleAction>& Script(Role role) const;

  // Script with `bindings` substituted; sends whose inputs are all bound come
  // back ground.
  std::vector<RoleAction> RoleScript(Role role, const Bindings& bindings) const;

  // {Ack . id_a . id_b . n_a . n_b}_PCKS, kind-checked.
  Term MakeTicket(Term id_a, Term id_b, Term n_a, Term n_b) const;
  // {Ack . id_a . id_b}_PCKS
  Term MakeWeakTicket(Term id_a, Term id_b) const;
  // The shape a ticket holder can check without opening it.
  Pattern TicketShape() const;

  bool GuardsHold(const std::vector<Guard>& guards, const Bindings& b) const;
  bool IsRegisteredUser(Term agent) const;

 private:
  void BuildScripts();

  ProtocolConfig config_;
  Term public_key_;
  Term private_key_;
  Term ack_;
  std::vector<RoleAction> old_owner_;
  std::vector<RoleAction> new_owner_;
  std::vector<RoleAction> cks_;
};

struct RoleState {
  static constexpr int kCompleted = -1;
  // Only used in simulation reports; exploration never marks roles stuck.
  static constexpr int kStuck = -2;

  Role role;
  Term agent;
  int pc = 0;
  Bindings bindings;
  int session_id = 0;

  bool completed() const { return pc == kCompleted; }
  bool terminal() const { return pc < 0; }

  friend bool operator==(const RoleState&, const RoleState&) = default;
};

RoleState InitialOldOwner(Term self, Term partner, Term password, Term own_nonce,
                          Term partner_nonce, int session_id);
RoleState InitialNewOwner(Term self, Term partner, Term own_nonce,
                          Term partner_nonce, int session_id);
RoleState InitialCks(const Protocol& protocol, Term otc, Term temp_id,
                     int session_id);

// nullptr once the role is terminal.
const RoleAction* CurrentAction(const Protocol& protocol, const RoleState& rs);

struct SentMessage {
  std::string label;
  Term from;
  Term to;
  Term payload;
};

struct StepResult {
  RoleState next;
  // False when a receive did not match; `next` is then the input state.
  bool advanced = false;
  std::optional<SentMessage> sent;
  std::optional<SignalEvent> signal;
};

/**
 * One deterministic step. Receives require `incoming`; every other action
 * requires its absence (UsageError otherwise). A terminal role stays put.
 */
StepResult Step(const Protocol& protocol, const RoleState& rs,
                std::optional<Term> incoming = std::nullopt);

}  // namespace owntrans

#endif  // OWNTRANS_PROTOCOL_HPP_
