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

#include "owntrans/properties.hpp"

namespace owntrans {

std::string_view ToString(PropertyKind kind) {
  switch (kind) {
    case PropertyKind::kSecrecy:
      return "Secrecy";
    case PropertyKind::kNonInjectiveAgreement:
      return "NonInjectiveAgreement";
    case PropertyKind::kInjectiveAgreement:
      return "InjectiveAgreement";
    case PropertyKind::kReachability:
      return "Reachability";
    case PropertyKind::kUnreachability:
      return "Unreachability";
  }
  return "?";
}

const std::vector<PropertyInfo>& AllProperties() {
  static const std::vector<PropertyInfo> kAll = {
      {PropertyId::kSecrecy, "secrecy", PropertyKind::kSecrecy,
       "the intruder never derives a secret claimed by an honest old owner",
       {1}, true},
      {PropertyId::kAgreement, "agreement", PropertyKind::kNonInjectiveAgreement,
       "every honest Commit is preceded by a Running agreeing on A, B, N_A, N_B",
       {2, 3}, true},
      {PropertyId::kInjectiveAgreement, "injective_agreement",
       PropertyKind::kInjectiveAgreement,
       "as agreement, with each Running justifying at most one Commit", {}, true},
      {PropertyId::kImpersonationNewOwner, "impersonation_new_owner",
       PropertyKind::kUnreachability,
       "no server session between honest owners completes without the new owner",
       {4}, false},
      {PropertyId::kImpersonationOldOwner, "impersonation_old_owner",
       PropertyKind::kUnreachability,
       "no server session naming an honest old owner completes without its Running",
       {5}, false},
      {PropertyId::kHonestCompletion, "honest_completion", PropertyKind::kReachability,
       "some reachable state has every honest role completed", {}, true},
  };
  return kAll;
}

std::optional<PropertyInfo> FindProperty(std::string_view name) {
  for (const auto& p : AllProperties()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

const PropertyInfo& Info(PropertyId id) {
  for (const auto& p : AllProperties()) {
    if (p.id == id) return p;
  }
  throw std::invalid_argument("unknown property id");
}

std::string_view ToString(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::kHolds:
      return "Holds";
    case VerdictStatus::kViolated:
      return "Violated";
    case VerdictStatus::kInconclusiveAtBound:
      return "InconclusiveAtBound";
  }
  return "?";
}

std::optional<VerdictStatus> VerdictStatusFromString(std::string_view name) {
  for (VerdictStatus s : {VerdictStatus::kHolds, VerdictStatus::kViolated,
                          VerdictStatus::kInconclusiveAtBound}) {
    if (ToString(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<SecrecyViolation> CheckSecrecy(const System& sys, const GlobalState& gs) {
  for (const SignalEvent& ev : gs.trace) {
    if (ev.kind != SignalKind::kClaimSecret) continue;
    if (!sys.IsHonest(ev.actor) || !sys.IsHonest(ev.partner)) continue;
    for (Term s : ev.payload) {
      if (gs.kb.CanDerive(s)) return SecrecyViolation{s, ev};
    }
  }
  return std::nullopt;
}

std::optional<SignalEvent> CheckAgreement(const System& sys, const GlobalState& gs,
                                          bool injective) {
  std::vector<const SignalEvent*> running;
  std::vector<bool> used;
  for (const SignalEvent& ev : gs.trace) {
    if (ev.kind == SignalKind::kRunningOldOwner) {
      running.push_back(&ev);
      used.push_back(false);
      continue;
    }
    if (ev.kind != SignalKind::kCommitNewOwner) continue;
    if (!sys.IsHonest(ev.old_owner()) || !sys.IsHonest(ev.new_owner())) continue;
    bool matched = false;
    for (std::size_t i = 0; i < running.size() && !matched; ++i) {
      const SignalEvent& r = *running[i];
      if (injective && used[i]) continue;
      if (r.old_owner() == ev.old_owner() && r.new_owner() == ev.new_owner() &&
          r.payload == ev.payload) {
        matched = true;
        used[i] = true;
      }
    }
    if (!matched) return ev;
  }
  return std::nullopt;
}

namespace {

std::optional<Term> Bound(const RoleState& rs, const char* name) {
  auto it = rs.bindings.find(name);
  if (it == rs.bindings.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::optional<std::size_t> NewOwnerImpersonated(const System& sys,
                                                const GlobalState& gs) {
  for (std::size_t i = 0; i < gs.roles.size(); ++i) {
    const RoleState& cks = gs.roles[i];
    if (cks.role != Role::kCks || !cks.completed()) continue;
    const auto a = Bound(cks, "ID_A");
    const auto b = Bound(cks, "ID_B");
    const auto m3 = Bound(cks, "M3");
    if (!a || !b || !m3 || !sys.IsHonest(*a) || !sys.IsHonest(*b)) continue;
    bool participated = false;
    for (const RoleState& rs : gs.roles) {
      if (rs.role == Role::kNewOwner && rs.agent == *b && Bound(rs, "M3") == m3) {
        participated = true;
        break;
      }
    }
    if (!participated) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> OldOwnerImpersonated(const System& sys,
                                                const GlobalState& gs) {
  for (std::size_t i = 0; i < gs.roles.size(); ++i) {
    const RoleState& cks = gs.roles[i];
    if (cks.role != Role::kCks || !cks.completed()) continue;
    const auto a = Bound(cks, "ID_A");
    const auto b = Bound(cks, "ID_B");
    const auto na = Bound(cks, "N_A");
    if (!a || !b || !na || !sys.IsHonest(*a)) continue;
    bool running = false;
    for (const SignalEvent& ev : gs.trace) {
      if (ev.kind == SignalKind::kRunningOldOwner && ev.old_owner() == *a &&
          ev.new_owner() == *b && !ev.payload.empty() && ev.payload[0] == *na) {
        running = true;
        break;
      }
    }
    if (!running) return i;
  }
  return std::nullopt;
}

bool AllHonestRolesCompleted(const GlobalState& gs) {
  for (const RoleState& rs : gs.roles) {
    if (!rs.completed()) return false;
  }
  return true;
}

bool Triggers(const System& sys, const GlobalState& gs, PropertyId id) {
  switch (id) {
    case PropertyId::kSecrecy:
      return CheckSecrecy(sys, gs).has_value();
    case PropertyId::kAgreement:
      return CheckAgreement(sys, gs, false).has_value();
    case PropertyId::kInjectiveAgreement:
      return CheckAgreement(sys, gs, true).has_value();
    case PropertyId::kImpersonationNewOwner:
      return NewOwnerImpersonated(sys, gs).has_value();
    case PropertyId::kImpersonationOldOwner:
      return OldOwnerImpersonated(sys, gs).has_value();
    case PropertyId::kHonestCompletion:
      return AllHonestRolesCompleted(gs);
  }
  return false;
}

std::optional<std::size_t> CheckImpersonationUnreachable(
    const System& sys, std::span<const GlobalState> reachable,
    bool exploration_complete, PropertyId which) {
  if (which != PropertyId::kImpersonationNewOwner &&
      which != PropertyId::kImpersonationOldOwner) {
    throw std::invalid_argument("not an impersonation property");
  }
  if (!exploration_complete) throw InconclusiveError("bound too small");
  for (std::size_t i = 0; i < reachable.size(); ++i) {
    if (Triggers(sys, reachable[i], which)) return i;
  }
  return std::nullopt;
}

}  // namespace owntrans
