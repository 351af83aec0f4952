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

#ifndef OWNTRANS_EXPLORER_HPP_
#define OWNTRANS_EXPLORER_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "owntrans/model.hpp"
#include "owntrans/properties.hpp"

namespace owntrans {

/**
 * Every enabled transition of gs, in a fixed order: roles in state order;
 * within a role, intruder deliveries in canonical message order.
 *
 * Sends go to the intruder (it is the network); receives on the network, and
 * device receives whose co-owner is dishonest, take any synthesizable
 * instance of the pattern. A device receive between two honest owners takes
 * the co-owner's binding of the same name.
 */
std::vector<std::pair<Transition, GlobalState>> Successors(const System& sys,
                                                           const GlobalState& gs);

struct ExploreOptions {
  int max_depth = 40;
  bool dedup = true;
  // 0 reads OWNTRANS_THREADS (default 1).
  int threads = 0;
  std::vector<PropertyId> properties;
  // Keep EncodeState of every discovered state (tests only).
  bool collect_encodings = false;
};

// Whether the explored space contains the instrumented events at all, so
// that holding properties are not vacuous.
struct Coverage {
  bool claim_secret = false;
  bool running = false;
  bool commit = false;
  bool honest_completion = false;

  friend bool operator==(const Coverage&, const Coverage&) = default;
};

struct ExploreResult {
  std::size_t states = 0;
  std::size_t transitions = 0;
  int depth_reached = 0;
  // Some state at max_depth still had successors.
  bool bound_hit = false;
  std::vector<Verdict> verdicts;
  Coverage coverage;
  double seconds = 0.0;
  std::vector<std::string> encodings;
};

/**
 * Level-synchronous breadth-first search. Properties are evaluated on every
 * newly discovered state; the first state that triggers a property within
 * the BFS order yields its (shortest) counterexample or witness. Results do
 * not depend on the thread count.
 */
ExploreResult Explore(const System& sys, const ExploreOptions& options);

class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t index, const std::string& what)
      : std::runtime_error("transition " + std::to_string(index) + ": " + what),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Applies `path` from the initial state; throws ReplayError naming the first
// transition that is not enabled.
GlobalState Replay(const System& sys, std::span<const Transition> path);

struct HonestEvent {
  enum class Type { kMessage, kSignal };
  Type type;
  int session_id = 0;
  // kMessage
  std::string label;
  Term from = Term::Agent("?");
  Term to = Term::Agent("?");
  std::optional<Term> payload;
  // kSignal
  std::optional<SignalEvent> signal;
};

struct HonestRun {
  std::vector<HonestEvent> events;
  std::vector<Transition> path;
  GlobalState final_state;
};

class StuckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Runs the schedule without interference: every message is delivered to its
 * addressee in its own session, one enabled step at a time (lowest role
 * first). Throws StuckError naming the stuck role and its step when some
 * honest role cannot finish.
 */
HonestRun SimulateHonest(const System& sys);

// OWNTRANS_THREADS, or 1 when unset or invalid.
int ThreadsFromEnv();

}  // namespace owntrans

#endif  // OWNTRANS_EXPLORER_HPP_
