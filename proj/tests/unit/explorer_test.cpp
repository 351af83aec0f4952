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

#include "owntrans/explorer.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "oracles.hpp"

namespace owntrans {
namespace {

ExploreResult ExploreScenario(const System& sys, std::vector<PropertyId> props, int max_depth = -1) {
  ExploreOptions options;
  options.max_depth = max_depth < 0 ? sys.scenario().bounds.max_depth : max_depth;
  options.properties = std::move(props);
  options.threads = 1;
  return Explore(sys, options);
}

const Verdict& VerdictFor(const ExploreResult& r, std::string_view name) {
  for (const Verdict& v : r.verdicts) {
    if (v.property == name) return v;
  }
  throw std::out_of_range(std::string(name));
}

TEST(Successors, InitialStateHasOnlyTheFirstSend) {
  const System sys = testing::LoadSystem("base");
  const auto succ = Successors(sys, sys.initial());
  ASSERT_EQ(succ.size(), 1u);
  EXPECT_EQ(succ[0].first.kind, TransitionKind::kHonestSend);
  EXPECT_EQ(succ[0].first.label, "M1");
  EXPECT_EQ(succ[0].first.role, Role::kOldOwner);
  EXPECT_EQ(succ[0].second.depth, 1);
  EXPECT_TRUE(succ[0].second.kb.Contains(*succ[0].first.message));
}

TEST(Successors, OverheardM1IsReplayable) {
  const System sys = testing::LoadSystem("base");
  const auto first = Successors(sys, sys.initial());
  const Term m1 = *first[0].first.message;
  bool replay = false;
  for (const auto& [t, next] : Successors(sys, first[0].second)) {
    if (t.kind == TransitionKind::kIntruderDeliver && t.role == Role::kCks && t.message == m1) {
      replay = true;
    }
  }
  EXPECT_TRUE(replay);
}

TEST(Successors, TraceIsAppendOnlyAndKnowledgeMonotone) {
  const System sys = testing::LoadSystem("leaked_password");
  std::mt19937_64 rng(7);
  for (int walk = 0; walk < 50; ++walk) {
    GlobalState gs = sys.initial();
    for (int step = 0; step < 30; ++step) {
      auto succ = Successors(sys, gs);
      if (succ.empty()) break;
      GlobalState next = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)].second;
      ASSERT_GE(next.trace.size(), gs.trace.size());
      EXPECT_TRUE(std::equal(gs.trace.begin(), gs.trace.end(), next.trace.begin()));
      EXPECT_TRUE(std::includes(next.kb.facts().begin(), next.kb.facts().end(), gs.kb.facts().begin(),
                                gs.kb.facts().end(), CanonicalLess()));
      EXPECT_EQ(next.depth, gs.depth + 1);
      gs = std::move(next);
    }
  }
}

TEST(Explore, BaseStateCountIsPinned) {
  const System sys = testing::LoadSystem("base");
  const ExploreResult r = ExploreScenario(sys, {PropertyId::kSecrecy, PropertyId::kAgreement,
                                                PropertyId::kImpersonationNewOwner,
                                                PropertyId::kImpersonationOldOwner});
  // Regression constants from the first full exploration.
  EXPECT_EQ(r.states, 28u);
  EXPECT_EQ(r.transitions, 35u);
  EXPECT_EQ(r.depth_reached, 17);
  EXPECT_FALSE(r.bound_hit);
  for (const Verdict& v : r.verdicts) {
    EXPECT_EQ(v.status, VerdictStatus::kHolds) << v.property;
    EXPECT_FALSE(v.counterexample.has_value());
  }
  EXPECT_TRUE(r.coverage.claim_secret);
  EXPECT_TRUE(r.coverage.running);
  EXPECT_TRUE(r.coverage.commit);
  EXPECT_TRUE(r.coverage.honest_completion);
}

TEST(Explore, SmallBoundIsInconclusive) {
  const System sys = testing::LoadSystem("base");
  const ExploreResult r = ExploreScenario(sys, {PropertyId::kSecrecy, PropertyId::kAgreement,
                                                PropertyId::kImpersonationNewOwner}, 3);
  EXPECT_TRUE(r.bound_hit);
  EXPECT_EQ(r.depth_reached, 3);
  for (const Verdict& v : r.verdicts) EXPECT_EQ(v.status, VerdictStatus::kInconclusiveAtBound);
}

TEST(Explore, HonestCompletionIsReachableWithWitness) {
  const System sys = testing::LoadSystem("base");
  const ExploreResult r = ExploreScenario(sys, {PropertyId::kHonestCompletion});
  const Verdict& v = r.verdicts.at(0);
  EXPECT_EQ(v.status, VerdictStatus::kHolds);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_TRUE(AllHonestRolesCompleted(v.witness->violating_state));
}

TEST(Explore, WeakTicketViolatesAgreement) {
  const System sys = testing::LoadSystem("weak_ticket");
  const ExploreResult r = ExploreScenario(sys, {PropertyId::kAgreement, PropertyId::kSecrecy});
  EXPECT_EQ(r.states, 34350u);
  const Verdict& agreement = VerdictFor(r, "agreement");
  EXPECT_EQ(agreement.status, VerdictStatus::kViolated);
  ASSERT_TRUE(agreement.counterexample.has_value());
  EXPECT_EQ(agreement.counterexample->path.size(), 25u);
  EXPECT_EQ(VerdictFor(r, "secrecy").status, VerdictStatus::kHolds);

  const Counterexample& cex = *agreement.counterexample;
  const GlobalState replayed = Replay(sys, cex.path);
  EXPECT_EQ(EncodeState(replayed), EncodeState(cex.violating_state));
  EXPECT_EQ(replayed, cex.violating_state);
  EXPECT_TRUE(CheckAgreement(sys, replayed, false).has_value());
  // Every proper prefix still satisfies the property.
  for (std::size_t n = 0; n < cex.path.size(); ++n) {
    const GlobalState prefix = Replay(sys, std::span(cex.path).first(n));
    EXPECT_FALSE(CheckAgreement(sys, prefix, false).has_value()) << n;
  }
}

TEST(Explore, CompromisedServerLeaksTheSecret) {
  const System sys = testing::LoadSystem("compromised_cks");
  const ExploreResult r = ExploreScenario(sys, {PropertyId::kSecrecy}, 11);
  const Verdict& v = r.verdicts.at(0);
  ASSERT_EQ(v.status, VerdictStatus::kViolated);
  const auto leak = CheckSecrecy(sys, v.counterexample->violating_state);
  ASSERT_TRUE(leak.has_value());
  EXPECT_EQ(leak->secret, *sys.Lookup("N_B"));
  EXPECT_TRUE(v.counterexample->violating_state.kb.CanDerive(*sys.Lookup("N_B")));
  EXPECT_EQ(v.counterexample->path.size(), 11u);
}

TEST(Explore, ViolationsPersistAlongSuccessorChains) {
  const System sys = testing::LoadSystem("leaked_password");
  const ExploreResult r = ExploreScenario(sys, {PropertyId::kImpersonationOldOwner});
  ASSERT_TRUE(r.verdicts.at(0).counterexample.has_value());
  std::mt19937_64 rng(11);
  for (int walk = 0; walk < 30; ++walk) {
    GlobalState gs = r.verdicts.at(0).counterexample->violating_state;
    for (int step = 0; step < 20; ++step) {
      ASSERT_TRUE(Triggers(sys, gs, PropertyId::kImpersonationOldOwner));
      auto succ = Successors(sys, gs);
      if (succ.empty()) break;
      gs = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)].second;
    }
  }
}

TEST(Replay, EmptyPathGivesInitialState) {
  const System sys = testing::LoadSystem("base");
  EXPECT_EQ(Replay(sys, {}), sys.initial());
}

TEST(Replay, HonestPathReachesCompletion) {
  const System sys = testing::LoadSystem("base");
  const HonestRun run = SimulateHonest(sys);
  const GlobalState end = Replay(sys, run.path);
  EXPECT_EQ(end, run.final_state);
  EXPECT_TRUE(AllHonestRolesCompleted(end));
}

TEST(Replay, DisabledTransitionNamesItsIndex) {
  const System sys = testing::LoadSystem("base");
  std::vector<Transition> path = SimulateHonest(sys).path;
  std::swap(path[2], path[5]);
  try {
    Replay(sys, path);
    FAIL();
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.index(), 2u);
    EXPECT_EQ(std::string(e.what()).rfind("transition 2: not enabled", 0), 0u) << e.what();
  }
}

TEST(SimulateHonest, StuckWithoutNewOwner) {
  Scenario s = LoadScenario(testing::ScenarioPath("base"));
  s.sessions[0].new_owner = "I";
  try {
    SimulateHonest(System::FromScenario(s));
    FAIL();
  } catch (const StuckError& e) {
    EXPECT_STREQ(e.what(), "stuck: CKS waiting at M3 (pc 2)");
  }
}

TEST(ThreadsFromEnv, ParsesAndClamps) {
  const char* saved = std::getenv("OWNTRANS_THREADS");
  const std::string keep = saved ? saved : "";
  ::setenv("OWNTRANS_THREADS", "4", 1);
  EXPECT_EQ(ThreadsFromEnv(), 4);
  ::setenv("OWNTRANS_THREADS", "0", 1);
  EXPECT_EQ(ThreadsFromEnv(), 1);
  ::setenv("OWNTRANS_THREADS", "x", 1);
  EXPECT_EQ(ThreadsFromEnv(), 1);
  ::setenv("OWNTRANS_THREADS", "100000", 1);
  EXPECT_EQ(ThreadsFromEnv(), 256);
  ::unsetenv("OWNTRANS_THREADS");
  EXPECT_EQ(ThreadsFromEnv(), 1);
  if (saved) ::setenv("OWNTRANS_THREADS", keep.c_str(), 1);
}

}  // namespace
}  // namespace owntrans
