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

// Property-based suites over the explorer and the intruder model, each
// checked against an independent oracle.

#include <gtest/gtest.h>

#include "checks.hpp"

namespace owntrans::testing {
namespace {

void ExpectNone(const Failures& failures) {
  EXPECT_TRUE(failures.empty()) << failures.size() << " failure(s), first: " << failures.front();
}

TEST(BfsMinimality, WeakTicketAgreement) { ExpectNone(CheckBfsMinimality("weak_ticket", PropertyId::kAgreement)); }

TEST(BfsMinimality, LeakedPasswordImpersonation) {
  ExpectNone(CheckBfsMinimality("leaked_password", PropertyId::kImpersonationOldOwner));
  ExpectNone(CheckBfsMinimality("leaked_password", PropertyId::kImpersonationNewOwner));
}

TEST(VisitedSet, SoundOnBase) { ExpectNone(CheckVisitedSetSoundness("base")); }

TEST(VisitedSet, SoundOnLeakedPassword) { ExpectNone(CheckVisitedSetSoundness("leaked_password")); }

TEST(Determinism, ThreadCountDoesNotChangeResults) {
  for (const char* name : {"base", "leaked_password", "weak_ticket"}) {
    ExpectNone(CheckThreadDeterminism(name));
  }
}

TEST(OracleEquivalence, ExhaustiveUpToFourFacts) {
  const OracleStats s = CompareWithOracleExhaustive();
  EXPECT_EQ(s.fact_sets, 1471u);
  EXPECT_EQ(s.disagreements, 0u) << (s.examples.empty() ? "" : s.examples.front());
  RecordProperty("queries", static_cast<int>(s.queries));
  RecordProperty("beyond_budget", static_cast<int>(s.beyond_budget));
}

TEST(OracleEquivalence, SampledUpToEightFacts) {
  const OracleStats s = CompareWithOracleSampled(0x5a3b1e, 10000);
  EXPECT_EQ(s.disagreements, 0u) << (s.examples.empty() ? "" : s.examples.front());
  RecordProperty("queries", static_cast<int>(s.queries));
  RecordProperty("beyond_budget", static_cast<int>(s.beyond_budget));
}

}  // namespace
}  // namespace owntrans::testing
