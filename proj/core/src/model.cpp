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

#include "owntrans/model.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <sstream>

namespace owntrans {

std::string_view ToString(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::kHonestSend:
      return "HonestSend";
    case TransitionKind::kIntruderDeliver:
      return "IntruderDeliver";
    case TransitionKind::kSignalStep:
      return "SignalStep";
    case TransitionKind::kDeviceHandover:
      return "DeviceHandover";
  }
  return "?";
}

std::optional<TransitionKind> TransitionKindFromString(std::string_view name) {
  for (TransitionKind k :
       {TransitionKind::kHonestSend, TransitionKind::kIntruderDeliver,
        TransitionKind::kSignalStep, TransitionKind::kDeviceHandover}) {
    if (ToString(k) == name) return k;
  }
  return std::nullopt;
}

std::string Transition::ToString() const {
  std::ostringstream os;
  const std::string who = Pretty(actor) + " (" + std::string(owntrans::ToString(role)) +
                          ", session " + std::to_string(session_id) + ")";
  switch (kind) {
    case TransitionKind::kHonestSend:
      os << who << " sends " << label;
      break;
    case TransitionKind::kIntruderDeliver:
      os << "intruder delivers " << label << " to " << who;
      break;
    case TransitionKind::kSignalStep:
      os << who << " signals " << label;
      break;
    case TransitionKind::kDeviceHandover:
      os << who << " takes " << label << " by device hand-over";
      break;
  }
  if (message) os << ": " << Pretty(*message);
  return os.str();
}

namespace {

std::string SessionSuffix(int k) { return k == 1 ? "" : std::to_string(k); }

[[noreturn]] void Invariant(const std::string& what) {
  throw ScenarioError(ScenarioError::Category::kInvariant, "invariant violated: " + what);
}

}  // namespace

System::System(Scenario scenario, Protocol protocol)
    : scenario_(std::move(scenario)), protocol_(std::move(protocol)) {}

System System::FromScenario(const Scenario& s) {
  ValidateScenario(s);

  ProtocolConfig config;
  config.server = Term::Agent(s.Server().name);
  config.ticket_weak = s.flags.ticket_weak;
  for (const auto& a : s.agents) {
    if (!a.server) config.passwords.emplace(Term::Agent(a.name), Term::Password("PW_" + a.name));
  }
  System sys(s, Protocol(config));
  const Protocol& proto = sys.protocol_;

  for (const auto& a : s.agents) {
    const Term agent = Term::Agent(a.name);
    sys.universe_.insert(agent);
    if (a.honest) sys.honest_.insert(agent);
    if (!a.server) sys.universe_.insert(config.passwords.at(agent));
    if (!a.honest) sys.universe_.insert(Term::Nonce("N_" + a.name));
  }
  sys.universe_.insert(proto.public_key());
  sys.universe_.insert(proto.private_key());
  sys.universe_.insert(proto.ack());

  std::set<std::string> honest_nonces;
  auto nonce_for = [&](const std::string& agent, const char* role_letter, int k) {
    if (!s.FindAgent(agent)->honest) return Term::Nonce("N_" + agent);
    std::string label = std::string("N_") + role_letter + SessionSuffix(k);
    if (!honest_nonces.insert(label).second ||
        sys.universe_.count(Term::Nonce(label)) > 0) {
      Invariant("nonce labels are unique ('" + label + "')");
    }
    return Term::Nonce(label);
  };

  std::vector<Term> implied;
  for (std::size_t i = 0; i < s.sessions.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const SessionSpec& session = s.sessions[i];
    const Term a = Term::Agent(session.old_owner);
    const Term b = Term::Agent(session.new_owner);
    const Term na = nonce_for(session.old_owner, "A", k);
    const Term nb = nonce_for(session.new_owner, "B", k);
    const Term otc = Term::Constant("OTCpayload" + SessionSuffix(k));
    const Term temp_id = Term::Constant("TempID" + SessionSuffix(k));
    for (Term t : {na, nb, otc, temp_id}) sys.universe_.insert(t);

    const bool a_honest = sys.IsHonest(a);
    const bool b_honest = sys.IsHonest(b);
    if (a_honest) {
      sys.initial_.roles.push_back(
          InitialOldOwner(a, b, config.passwords.at(a), na, nb, k));
    } else {
      // The intruder plays the old owner: its own credentials, plus the
      // partner's nonce exchanged in person.
      implied.insert(implied.end(), {a, config.passwords.at(a), na, nb});
    }
    if (b_honest) {
      sys.initial_.roles.push_back(InitialNewOwner(b, a, nb, na, k));
    } else {
      implied.insert(implied.end(), {b, nb, na});
    }
    sys.initial_.roles.push_back(InitialCks(proto, otc, temp_id, k));
  }

  for (Term t : sys.universe_) sys.by_name_.emplace(AtomDisplayName(t), t);

  std::vector<Term> known;
  auto resolve = [&](const std::vector<std::string>& names, const char* field) {
    for (const auto& name : names) {
      auto t = sys.Lookup(name);
      if (!t) Invariant("unknown atom '" + name + "' in " + field);
      known.push_back(*t);
    }
  };
  resolve(s.intruder.initial_knowledge, "intruder.initial_knowledge");
  resolve(s.flags.leak, "flags.leak");
  known.insert(known.end(), implied.begin(), implied.end());
  sys.initial_.kb = KnowledgeBase(known);

  const auto& roles = sys.initial_.roles;
  sys.device_partner_.assign(roles.size(), std::nullopt);
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i].role == Role::kCks) continue;
    const Role other =
        roles[i].role == Role::kOldOwner ? Role::kNewOwner : Role::kOldOwner;
    sys.device_partner_[i] = sys.RoleIndex(other, roles[i].session_id);
  }
  return sys;
}

bool System::IsHonest(Term agent) const { return honest_.count(agent) > 0; }

std::optional<Term> System::Lookup(std::string_view display_name) const {
  auto it = by_name_.find(display_name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> System::DevicePartner(std::size_t role_index) const {
  return device_partner_.at(role_index);
}

std::optional<std::size_t> System::RoleIndex(Role role, int session_id) const {
  const auto& roles = initial_.roles;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i].role == role && roles[i].session_id == session_id) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// State encodings

namespace {

void PutU32(std::string* out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>((v >> 24) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 8) & 0xff), static_cast<char>(v & 0xff)};
  out->append(bytes, 4);
}

void PutBytes(std::string* out, std::string_view bytes) {
  PutU32(out, static_cast<std::uint32_t>(bytes.size()));
  out->append(bytes);
}

std::string Encode(const GlobalState& gs) {
  auto put_term = [](std::string* out, Term t) { PutBytes(out, t.encoding()); };
  std::string out;
  out.reserve(1024);
  PutU32(&out, static_cast<std::uint32_t>(gs.roles.size()));
  for (const RoleState& rs : gs.roles) {
    out.push_back(static_cast<char>(rs.role));
    put_term(&out, rs.agent);
    PutU32(&out, static_cast<std::uint32_t>(rs.session_id));
    PutU32(&out, static_cast<std::uint32_t>(rs.pc));
    PutU32(&out, static_cast<std::uint32_t>(rs.bindings.size()));
    for (const auto& [name, term] : rs.bindings) {
      PutBytes(&out, name);
      put_term(&out, term);
    }
  }
  PutU32(&out, static_cast<std::uint32_t>(gs.kb.size()));
  for (Term f : gs.kb.facts()) put_term(&out, f);
  PutU32(&out, static_cast<std::uint32_t>(gs.trace.size()));
  for (const SignalEvent& ev : gs.trace) {
    out.push_back(static_cast<char>(ev.kind));
    put_term(&out, ev.actor);
    put_term(&out, ev.partner);
    PutU32(&out, static_cast<std::uint32_t>(ev.session_id));
    PutU32(&out, static_cast<std::uint32_t>(ev.payload.size()));
    for (Term t : ev.payload) put_term(&out, t);
  }
  return out;
}

}  // namespace

std::string EncodeState(const GlobalState& gs) { return Encode(gs); }

// Binding names are left out: which names are bound is fixed by the role and
// its pc, both of which are in the key.

std::string CompactStateKey(const GlobalState& gs) {
  std::size_t words = 3 + gs.kb.size();
  for (const RoleState& rs : gs.roles) words += 5 + rs.bindings.size();
  for (const SignalEvent& ev : gs.trace) words += 5 + ev.payload.size();
  std::vector<std::uint32_t> w;
  w.reserve(words);
  w.push_back(static_cast<std::uint32_t>(gs.roles.size()));
  for (const RoleState& rs : gs.roles) {
    w.push_back(static_cast<std::uint32_t>(rs.role));
    w.push_back(rs.agent.id());
    w.push_back(static_cast<std::uint32_t>(rs.session_id));
    w.push_back(static_cast<std::uint32_t>(rs.pc));
    w.push_back(static_cast<std::uint32_t>(rs.bindings.size()));
    for (const auto& entry : rs.bindings) w.push_back(entry.second.id());
  }
  w.push_back(static_cast<std::uint32_t>(gs.kb.size()));
  for (Term f : gs.kb.facts()) w.push_back(f.id());
  w.push_back(static_cast<std::uint32_t>(gs.trace.size()));
  for (const SignalEvent& ev : gs.trace) {
    w.push_back(static_cast<std::uint32_t>(ev.kind));
    w.push_back(ev.actor.id());
    w.push_back(ev.partner.id());
    w.push_back(static_cast<std::uint32_t>(ev.session_id));
    w.push_back(static_cast<std::uint32_t>(ev.payload.size()));
    for (Term t : ev.payload) w.push_back(t.id());
  }
  std::string out(w.size() * sizeof(std::uint32_t), '\0');
  std::memcpy(out.data(), w.data(), out.size());
  return out;
}

}  // namespace owntrans
