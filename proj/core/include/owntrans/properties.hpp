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

#ifndef OWNTRANS_PROPERTIES_HPP_
#define OWNTRANS_PROPERTIES_HPP_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "owntrans/model.hpp"

namespace owntrans {

enum class PropertyKind {
  kSecrecy,
  kNonInjectiveAgreement,
  kInjectiveAgreement,
  kReachability,
  kUnreachability,
};

std::string_view ToString(PropertyKind kind);

enum class PropertyId {
  kSecrecy,
  kAgreement,
  kInjectiveAgreement,
  // Goal-table case 4: the intruder completes a transfer in the new owner's name.
  kImpersonationNewOwner,
  // Goal-table case 5: the intruder initiates a transfer in the old owner's name.
  kImpersonationOldOwner,
  kHonestCompletion,
};

struct PropertyInfo {
  PropertyId id;
  std::string_view name;
  PropertyKind kind;
  std::string_view description;
  // Goal-table rows this property answers, and the boolean those rows show
  // when the property holds (the impersonation rows query reachability of
  // the attack, so they read False when it is unreachable).
  std::vector<int> table_rows;
  bool table_value_when_holds = true;
};

const std::vector<PropertyInfo>& AllProperties();
std::optional<PropertyInfo> FindProperty(std::string_view name);
const PropertyInfo& Info(PropertyId id);

enum class VerdictStatus { kHolds, kViolated, kInconclusiveAtBound };

std::string_view ToString(VerdictStatus status);
std::optional<VerdictStatus> VerdictStatusFromString(std::string_view name);

// A reachability property that is exhaustively unreachable is Violated
// without a counterexample; every other Violated verdict carries one.
struct Verdict {
  std::string property;
  VerdictStatus status = VerdictStatus::kHolds;
  std::optional<Counterexample> counterexample;
  std::optional<Counterexample> witness;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct SecrecyViolation {
  Term secret;
  SignalEvent claim;
};

// Some honest ClaimSecret whose secret the intruder can derive.
std::optional<SecrecyViolation> CheckSecrecy(const System& sys, const GlobalState& gs);

// The first honest Commit without a matching earlier Running. When
// `injective`, each Running can justify only one Commit.
std::optional<SignalEvent> CheckAgreement(const System& sys, const GlobalState& gs,
                                          bool injective);

// Index of a completed server session that no honest new owner took part in
// although both owners it names are honest.
std::optional<std::size_t> NewOwnerImpersonated(const System& sys,
                                                const GlobalState& gs);
// Index of a completed server session naming an honest old owner who never
// signalled Running for it.
std::optional<std::size_t> OldOwnerImpersonated(const System& sys,
                                                const GlobalState& gs);

bool AllHonestRolesCompleted(const GlobalState& gs);

/**
 * True when gs is a bad state for a safety or unreachability property, or a
 * target state for a reachability property.
 */
bool Triggers(const System& sys, const GlobalState& gs, PropertyId id);

class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Set-level form of the impersonation checks over all reachable states.
 * Returns the index of a witness state, or nullopt when the property holds.
 * Throws InconclusiveError("bound too small") when `exploration_complete` is
 * false.
 */
std::optional<std::size_t> CheckImpersonationUnreachable(
    const System& sys, std::span<const GlobalState> reachable,
    bool exploration_complete, PropertyId which);

}  // namespace owntrans

#endif  // OWNTRANS_PROPERTIES_HPP_
