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

#include "owntrans/protocol.hpp"

#include <sstream>

namespace owntrans {

std::string_view ToString(Role role) {
  switch (role) {
    case Role::kOldOwner:
      return "OldOwner";
    case Role::kNewOwner:
      return "NewOwner";
    case Role::kCks:
      return "CKS";
  }
  return "?";
}

std::string_view ToString(SignalKind kind) {
  switch (kind) {
    case SignalKind::kClaimSecret:
      return "ClaimSecret";
    case SignalKind::kRunningOldOwner:
      return "RunningOldOwner";
    case SignalKind::kCommitNewOwner:
      return "CommitNewOwner";
  }
  return "?";
}

std::optional<SignalKind> SignalKindFromString(std::string_view name) {
  for (SignalKind k : {SignalKind::kClaimSecret, SignalKind::kRunningOldOwner,
                       SignalKind::kCommitNewOwner}) {
    if (ToString(k) == name) return k;
  }
  return std::nullopt;
}

std::string SignalEvent::ToString() const {
  std::ostringstream os;
  switch (kind) {
    case SignalKind::kClaimSecret:
      os << "Claim_Secret";
      break;
    case SignalKind::kRunningOldOwner:
      os << "Running_OldOwner";
      break;
    case SignalKind::kCommitNewOwner:
      os << "Commit_NewOwner";
      break;
  }
  os << "(" << Pretty(old_owner()) << ", " << Pretty(new_owner());
  for (Term t : payload) os << ", " << Pretty(t);
  os << ")";
  return os.str();
}

namespace {

Pattern V(const char* name, AtomKind kind) { return Pattern::Var(name, kind); }
Pattern Any(const char* name) { return Pattern::AnyVar(name); }

constexpr AtomKind kAgent = AtomKind::kAgentName;
constexpr AtomKind kNonce = AtomKind::kNonce;

}  // namespace

Protocol::Protocol(ProtocolConfig config)
    : config_(std::move(config)),
      public_key_(Term::PublicKey(config_.server.label())),
      private_key_(Term::PrivateKey(config_.server.label())),
      ack_(Term::Constant("Ack")) {
  if (!config_.server.is_atom(AtomKind::kAgentName)) {
    throw TermError("server must be an agent name");
  }
  BuildScripts();
}

Pattern Protocol::TicketShape() const {
  if (config_.ticket_weak) {
    return Pattern::AEnc(public_key_, Pattern::Tuple({Pattern(ack_),
                                                      V("tk.ID_A", kAgent),
                                                      V("tk.ID_B", kAgent)}));
  }
  return Pattern::AEnc(
      public_key_,
      Pattern::Tuple({Pattern(ack_), V("tk.ID_A", kAgent), V("tk.ID_B", kAgent),
                      V("tk.N_A", kNonce), V("tk.N_B", kNonce)}));
}

void Protocol::BuildScripts() {
  const Pattern pk(public_key_);
  const Pattern server(config_.server);

  // OldOwner: env?B chooses the partner; N_B is learnt in person.
  old_owner_ = {
      SendAction{"M1", server,
                 Pattern::AEnc(pk, Pattern::Tuple({Any("ID_A"), Any("PW_A"),
                                                   Any("N_A"),
                                                   Pattern::AEnc(pk, Pattern::Tuple(
                                                                         {Any("ID_A"),
                                                                          Any("ID_B"),
                                                                          Any("N_B")}))})),
                 std::nullopt},
      ReceiveAction{"M2", Channel::kNetwork, TicketShape(), {}, "Ticket"},
      SignalAction{SignalKind::kRunningOldOwner, "ID_A", "ID_B", {"N_A", "N_B"}},
      ReceiveAction{"M4",
                    Channel::kDevice,
                    Pattern::SEnc(V("N_A", kNonce), V("OTC", AtomKind::kConstant)),
                    {},
                    "M4"},
      SendAction{"M5", server, Pattern::AEnc(pk, Any("OTC")), std::nullopt},
      SignalAction{SignalKind::kClaimSecret, "ID_A", "ID_B", {"N_B"}},
      DoneAction{},
  };

  new_owner_ = {
      ReceiveAction{"Ticket", Channel::kDevice, TicketShape(), {}, "Ticket"},
      SendAction{"M3", server,
                 Pattern::AEnc(pk, Pattern::Tuple({Any("ID_B"), Any("Ticket"),
                                                   Any("N_B")})),
                 "M3"},
      ReceiveAction{"M4",
                    Channel::kNetwork,
                    Pattern::SEnc(V("N_A", kNonce), V("OTC", AtomKind::kConstant)),
                    {},
                    "M4"},
      ReceiveAction{"M6",
                    Channel::kNetwork,
                    Pattern::SEnc(V("N_B", kNonce), V("TempID", AtomKind::kConstant)),
                    {},
                    std::nullopt},
      SignalAction{SignalKind::kCommitNewOwner, "ID_B", "ID_A", {"N_A", "N_B"}},
      DoneAction{},
  };

  // The server binds the OTR nonce as N_B, which makes the M3 check exact.
  // With the weak ticket it cannot tie M3 to M1 and takes N_B from M3.
  const char* otr_nonce = config_.ticket_weak ? "OTR.N_B" : "N_B";
  Pattern m1 = Pattern::AEnc(
      pk, Pattern::Tuple({V("ID_A", kAgent), V("PW_A", AtomKind::kPassword),
                          V("N_A", kNonce),
                          Pattern::AEnc(pk, Pattern::Tuple({V("ID_A", kAgent),
                                                            V("ID_B", kAgent),
                                                            V(otr_nonce, kNonce)}))}));
  Pattern ticket =
      config_.ticket_weak
          ? Pattern::AEnc(pk, Pattern::Tuple({Pattern(ack_), Any("ID_A"), Any("ID_B")}))
          : Pattern::AEnc(pk, Pattern::Tuple({Pattern(ack_), Any("ID_A"), Any("ID_B"),
                                              Any("N_A"), Any("N_B")}));
  cks_ = {
      ReceiveAction{"M1",
                    Channel::kNetwork,
                    m1,
                    {Guard{Guard::Kind::kRegisteredUser, "ID_A", ""},
                     Guard{Guard::Kind::kRegisteredUser, "ID_B", ""},
                     Guard{Guard::Kind::kDistinct, "ID_A", "ID_B"},
                     Guard{Guard::Kind::kPasswordOf, "PW_A", "ID_A"}},
                    std::nullopt},
      SendAction{"M2", Any("ID_A"), ticket, "Ticket"},
      ReceiveAction{"M3",
                    Channel::kNetwork,
                    Pattern::AEnc(pk, Pattern::Tuple({V("ID_B", kAgent), Any("Ticket"),
                                                      V("N_B", kNonce)})),
                    {},
                    "M3"},
      SendAction{"M4", Any("ID_B"), Pattern::SEnc(V("N_A", kNonce), Any("OTC")),
                 std::nullopt},
      ReceiveAction{"M5", Channel::kNetwork, Pattern::AEnc(pk, Any("OTC")), {},
                    std::nullopt},
      SendAction{"M6", Any("ID_B"), Pattern::SEnc(V("N_B", kNonce), Any("TempID")),
                 std::nullopt},
      DoneAction{},
  };
}

const std::vector<RoleAction>& Protocol::Script(Role role) const {
  switch (role) {
    case Role::kOldOwner:
      return old_owner_;
    case Role::kNewOwner:
      return new_owner_;
    case Role::kCks:
      return cks_;
  }
  throw std::invalid_argument("unknown role");
}

std::vector<RoleAction> Protocol::RoleScript(Role role, const Bindings& b) const {
  std::vector<RoleAction> out;
  for (const RoleAction& action : Script(role)) {
    out.push_back(std::visit(
        [&](const auto& a) -> RoleAction {
          using A = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<A, SendAction>) {
            return SendAction{a.label, Substitute(a.to, b), Substitute(a.payload, b),
                              a.bind_as};
          } else if constexpr (std::is_same_v<A, ReceiveAction>) {
            return ReceiveAction{a.label, a.channel, Substitute(a.pattern, b),
                                 a.guards, a.bind_as};
          } else {
            return a;
          }
        },
        action));
  }
  return out;
}

Term Protocol::MakeTicket(Term id_a, Term id_b, Term n_a, Term n_b) const {
  if (!id_a.is_atom(kAgent)) throw TermError("id_a must be an agent name");
  if (!id_b.is_atom(kAgent)) throw TermError("id_b must be an agent name");
  if (!n_a.is_atom(kNonce)) throw TermError("n_a must be a nonce");
  if (!n_b.is_atom(kNonce)) throw TermError("n_b must be a nonce");
  return Term::AEnc(public_key_, Term::Tuple({ack_, id_a, id_b, n_a, n_b}));
}

Term Protocol::MakeWeakTicket(Term id_a, Term id_b) const {
  if (!id_a.is_atom(kAgent)) throw TermError("id_a must be an agent name");
  if (!id_b.is_atom(kAgent)) throw TermError("id_b must be an agent name");
  return Term::AEnc(public_key_, Term::Tuple({ack_, id_a, id_b}));
}

bool Protocol::IsRegisteredUser(Term agent) const {
  return config_.passwords.count(agent) > 0;
}

bool Protocol::GuardsHold(const std::vector<Guard>& guards,
                          const Bindings& b) const {
  auto get = [&](const std::string& name) -> std::optional<Term> {
    auto it = b.find(name);
    if (it == b.end()) return std::nullopt;
    return it->second;
  };
  for (const Guard& g : guards) {
    auto a = get(g.a);
    if (!a) return false;
    switch (g.kind) {
      case Guard::Kind::kRegisteredUser:
        if (!IsRegisteredUser(*a)) return false;
        break;
      case Guard::Kind::kDistinct: {
        auto other = get(g.b);
        if (!other || *other == *a) return false;
        break;
      }
      case Guard::Kind::kPasswordOf: {
        auto user = get(g.b);
        if (!user) return false;
        auto it = config_.passwords.find(*user);
        if (it == config_.passwords.end() || it->second != *a) return false;
        break;
      }
    }
  }
  return true;
}

RoleState InitialOldOwner(Term self, Term partner, Term password, Term own_nonce,
                          Term partner_nonce, int session_id) {
  return RoleState{Role::kOldOwner,
                   self,
                   0,
                   {{"ID_A", self},
                    {"ID_B", partner},
                    {"PW_A", password},
                    {"N_A", own_nonce},
                    {"N_B", partner_nonce}},
                   session_id};
}

RoleState InitialNewOwner(Term self, Term partner, Term own_nonce,
                          Term partner_nonce, int session_id) {
  return RoleState{Role::kNewOwner,
                   self,
                   0,
                   {{"ID_B", self},
                    {"ID_A", partner},
                    {"N_B", own_nonce},
                    {"N_A", partner_nonce}},
                   session_id};
}

RoleState InitialCks(const Protocol& protocol, Term otc, Term temp_id,
                     int session_id) {
  return RoleState{Role::kCks,
                   protocol.server(),
                   0,
                   {{"OTC", otc}, {"TempID", temp_id}},
                   session_id};
}

const RoleAction* CurrentAction(const Protocol& protocol, const RoleState& rs) {
  if (rs.terminal()) return nullptr;
  const auto& script = protocol.Script(rs.role);
  if (rs.pc >= static_cast<int>(script.size())) return nullptr;
  return &script[static_cast<std::size_t>(rs.pc)];
}

namespace {

void Advance(const Protocol& protocol, RoleState* rs) {
  rs->pc += 1;
  const RoleAction* next = CurrentAction(protocol, *rs);
  if (next == nullptr || std::holds_alternative<DoneAction>(*next)) {
    rs->pc = RoleState::kCompleted;
  }
}

}  // namespace

StepResult Step(const Protocol& protocol, const RoleState& rs,
                std::optional<Term> incoming) {
  StepResult result{rs, false, std::nullopt, std::nullopt};
  const RoleAction* action = CurrentAction(protocol, rs);
  if (action == nullptr) return result;

  const bool is_receive = std::holds_alternative<ReceiveAction>(*action);
  if (incoming && !is_receive) {
    throw UsageError("incoming message offered to a non-receive step");
  }
  if (!incoming && is_receive) {
    throw UsageError("receive step requires an incoming message");
  }

  RoleState& next = result.next;
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, SendAction>) {
          Term payload = Instantiate(a.payload, rs.bindings);
          Term to = Instantiate(a.to, rs.bindings);
          if (a.bind_as) next.bindings.emplace(*a.bind_as, payload);
          result.sent = SentMessage{a.label, rs.agent, to, payload};
          Advance(protocol, &next);
          result.advanced = true;
        } else if constexpr (std::is_same_v<A, ReceiveAction>) {
          auto matched = Match(a.pattern, *incoming, rs.bindings);
          if (!matched || !protocol.GuardsHold(a.guards, *matched)) return;
          next.bindings = std::move(*matched);
          if (a.bind_as) {
            auto [it, fresh] = next.bindings.emplace(*a.bind_as, *incoming);
            if (!fresh && it->second != *incoming) {
              next = rs;
              return;
            }
          }
          Advance(protocol, &next);
          result.advanced = true;
        } else if constexpr (std::is_same_v<A, SignalAction>) {
          SignalEvent ev{a.kind, rs.bindings.at(a.actor), rs.bindings.at(a.partner),
                         {}, rs.session_id};
          for (const auto& name : a.payload) ev.payload.push_back(rs.bindings.at(name));
          result.signal = std::move(ev);
          Advance(protocol, &next);
          result.advanced = true;
        } else {
          next.pc = RoleState::kCompleted;
          result.advanced = true;
        }
      },
      *action);
  return result;
}

}  // namespace owntrans
