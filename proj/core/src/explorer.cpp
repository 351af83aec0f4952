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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <set>
#include <thread>
#include <unordered_set>

namespace owntrans {

namespace {

GlobalState Apply(const GlobalState& gs, std::size_t i, const StepResult& r) {
  GlobalState next = gs;
  next.roles[i] = r.next;
  next.depth = gs.depth + 1;
  if (r.sent) next.kb = next.kb.Learn(r.sent->payload);
  if (r.signal) next.trace.push_back(*r.signal);
  return next;
}

std::vector<Term> NetworkCandidates(const System& sys, const GlobalState& gs,
                                    const RoleState& rs, const ReceiveAction& a) {
  const Pattern p = Substitute(a.pattern, rs.bindings);
  if (sys.intruder_active()) {
    return SynthesizableInstances(gs.kb, p, sys.universe());
  }
  std::vector<Term> out;
  for (Term f : gs.kb.facts()) {
    if (Match(p, f, {})) out.push_back(f);
  }
  return out;
}

}  // namespace

std::vector<std::pair<Transition, GlobalState>> Successors(const System& sys,
                                                           const GlobalState& gs) {
  std::vector<std::pair<Transition, GlobalState>> out;
  const Protocol& proto = sys.protocol();
  for (std::size_t i = 0; i < gs.roles.size(); ++i) {
    const RoleState& rs = gs.roles[i];
    const RoleAction* action = CurrentAction(proto, rs);
    if (action == nullptr) continue;
    auto emit = [&](TransitionKind kind, std::string label, std::optional<Term> msg,
                    const StepResult& r) {
      out.emplace_back(
          Transition{kind, rs.agent, rs.role, rs.session_id, std::move(label), msg},
          Apply(gs, i, r));
    };

    if (const auto* send = std::get_if<SendAction>(action)) {
      StepResult r = Step(proto, rs);
      emit(TransitionKind::kHonestSend, send->label, r.sent->payload, r);
    } else if (const auto* sig = std::get_if<SignalAction>(action)) {
      StepResult r = Step(proto, rs);
      emit(TransitionKind::kSignalStep, std::string(ToString(sig->kind)), std::nullopt, r);
    } else if (const auto* recv = std::get_if<ReceiveAction>(action)) {
      const auto partner = recv->channel == Channel::kDevice ? sys.DevicePartner(i)
                                                             : std::nullopt;
      if (partner) {
        const auto& pb = gs.roles[*partner].bindings;
        auto it = recv->bind_as ? pb.find(*recv->bind_as) : pb.end();
        if (it == pb.end()) continue;
        StepResult r = Step(proto, rs, it->second);
        if (r.advanced) emit(TransitionKind::kDeviceHandover, recv->label, it->second, r);
        continue;
      }
      for (Term t : NetworkCandidates(sys, gs, rs, *recv)) {
        StepResult r = Step(proto, rs, t);
        if (r.advanced) emit(TransitionKind::kIntruderDeliver, recv->label, t, r);
      }
    }
  }
  return out;
}

int ThreadsFromEnv() {
  const char* v = std::getenv("OWNTRANS_THREADS");
  if (v == nullptr) return 1;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 256));
}

namespace {

struct Node {
  std::int64_t parent;
  std::optional<Transition> via;
};

struct Expanded {
  Transition via;
  GlobalState state;
  std::string key;
  std::uint32_t triggers = 0;
  std::uint8_t events = 0;
};

enum EventBit : std::uint8_t {
  kClaimBit = 1,
  kRunningBit = 2,
  kCommitBit = 4,
  kCompletedBit = 8,
};

std::uint8_t EventBits(const GlobalState& gs) {
  std::uint8_t bits = 0;
  for (const SignalEvent& ev : gs.trace) {
    switch (ev.kind) {
      case SignalKind::kClaimSecret:
        bits |= kClaimBit;
        break;
      case SignalKind::kRunningOldOwner:
        bits |= kRunningBit;
        break;
      case SignalKind::kCommitNewOwner:
        bits |= kCommitBit;
        break;
    }
  }
  if (AllHonestRolesCompleted(gs)) bits |= kCompletedBit;
  return bits;
}

std::uint32_t TriggerBits(const System& sys, const GlobalState& gs,
                          const std::vector<PropertyId>& props) {
  std::uint32_t bits = 0;
  for (std::size_t p = 0; p < props.size(); ++p) {
    if (Triggers(sys, gs, props[p])) bits |= 1u << p;
  }
  return bits;
}

std::vector<Transition> PathTo(const std::vector<Node>& nodes, std::int64_t index) {
  std::vector<Transition> path;
  for (std::int64_t cur = index; nodes[cur].parent >= 0; cur = nodes[cur].parent) {
    path.push_back(*nodes[cur].via);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  const int count = static_cast<int>(std::min<std::size_t>(n, threads));
  for (int t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace

ExploreResult Explore(const System& sys, const ExploreOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int threads = options.threads > 0 ? options.threads : ThreadsFromEnv();
  const auto& props = options.properties;
  if (props.size() > 32) throw std::invalid_argument("too many properties");

  ExploreResult result;
  std::vector<Node> nodes;
  std::unordered_set<std::string> visited;
  std::set<std::string> encodings;
  std::vector<std::int64_t> first(props.size(), -1);

  auto discover = [&](std::int64_t node, std::uint32_t triggers, std::uint8_t events) {
    result.states += 1;
    result.coverage.claim_secret |= (events & kClaimBit) != 0;
    result.coverage.running |= (events & kRunningBit) != 0;
    result.coverage.commit |= (events & kCommitBit) != 0;
    result.coverage.honest_completion |= (events & kCompletedBit) != 0;
    for (std::size_t p = 0; p < props.size(); ++p) {
      if (first[p] < 0 && (triggers & (1u << p))) first[p] = node;
    }
  };

  const GlobalState& init = sys.initial();
  nodes.push_back(Node{-1, std::nullopt});
  if (options.dedup) visited.insert(CompactStateKey(init));
  if (options.collect_encodings) encodings.insert(EncodeState(init));
  discover(0, TriggerBits(sys, init, props), EventBits(init));

  std::vector<std::pair<std::int64_t, GlobalState>> frontier{{0, init}};
  int depth = 0;
  while (!frontier.empty()) {
    if (depth >= options.max_depth) {
      for (const auto& [idx, gs] : frontier) {
        if (!Successors(sys, gs).empty()) {
          result.bound_hit = true;
          break;
        }
      }
      break;
    }

    std::vector<std::vector<Expanded>> expanded(frontier.size());
    ParallelFor(frontier.size(), threads, [&](std::size_t f) {
      auto succ = Successors(sys, frontier[f].second);
      auto& out = expanded[f];
      out.reserve(succ.size());
      for (auto& [t, gs] : succ) {
        Expanded e{std::move(t), std::move(gs), {}, 0, 0};
        if (options.dedup) e.key = CompactStateKey(e.state);
        e.triggers = TriggerBits(sys, e.state, props);
        e.events = EventBits(e.state);
        out.push_back(std::move(e));
      }
    });

    std::vector<std::pair<std::int64_t, GlobalState>> next;
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      for (Expanded& e : expanded[f]) {
        result.transitions += 1;
        if (options.dedup && !visited.insert(std::move(e.key)).second) continue;
        const auto idx = static_cast<std::int64_t>(nodes.size());
        nodes.push_back(Node{frontier[f].first, std::move(e.via)});
        if (options.collect_encodings) encodings.insert(EncodeState(e.state));
        discover(idx, e.triggers, e.events);
        next.emplace_back(idx, std::move(e.state));
      }
      expanded[f].clear();
    }
    frontier = std::move(next);
    if (!frontier.empty()) depth += 1;
  }
  result.depth_reached = depth;

  for (std::size_t p = 0; p < props.size(); ++p) {
    const PropertyInfo& info = Info(props[p]);
    Verdict v;
    v.property = std::string(info.name);
    const bool reachability = info.kind == PropertyKind::kReachability;
    if (first[p] >= 0) {
      Counterexample cex;
      cex.property = v.property;
      cex.path = PathTo(nodes, first[p]);
      cex.violating_state = Replay(sys, cex.path);
      if (reachability) {
        v.status = VerdictStatus::kHolds;
        v.witness = std::move(cex);
      } else {
        v.status = VerdictStatus::kViolated;
        v.counterexample = std::move(cex);
      }
    } else if (result.bound_hit) {
      v.status = VerdictStatus::kInconclusiveAtBound;
    } else {
      v.status = reachability ? VerdictStatus::kViolated : VerdictStatus::kHolds;
    }
    result.verdicts.push_back(std::move(v));
  }

  if (options.collect_encodings) {
    result.encodings.assign(encodings.begin(), encodings.end());
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

GlobalState Replay(const System& sys, std::span<const Transition> path) {
  GlobalState cur = sys.initial();
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto succ = Successors(sys, cur);
    auto it = std::find_if(succ.begin(), succ.end(),
                           [&](const auto& s) { return s.first == path[i]; });
    if (it == succ.end()) {
      throw ReplayError(i, "not enabled: " + path[i].ToString());
    }
    cur = std::move(it->second);
  }
  return cur;
}

HonestRun SimulateHonest(const System& sys) {
  struct InFlight {
    SentMessage msg;
    int session_id;
    bool consumed = false;
  };
  const Protocol& proto = sys.protocol();
  HonestRun run;
  GlobalState gs = sys.initial();
  std::vector<InFlight> in_flight;

  auto take_step = [&](std::size_t i) -> bool {
    const RoleState& rs = gs.roles[i];
    const RoleAction* action = CurrentAction(proto, rs);
    if (action == nullptr) return false;
    auto commit = [&](TransitionKind kind, std::string label, std::optional<Term> msg,
                      const StepResult& r) {
      run.path.push_back(
          Transition{kind, rs.agent, rs.role, rs.session_id, std::move(label), msg});
      if (r.sent) {
        in_flight.push_back(InFlight{*r.sent, rs.session_id});
        run.events.push_back(HonestEvent{HonestEvent::Type::kMessage, rs.session_id,
                                         r.sent->label, r.sent->from, r.sent->to,
                                         r.sent->payload, std::nullopt});
      }
      if (r.signal) {
        run.events.push_back(HonestEvent{HonestEvent::Type::kSignal, rs.session_id, "",
                                         rs.agent, rs.agent, std::nullopt, r.signal});
      }
      gs = Apply(gs, i, r);
    };

    if (const auto* send = std::get_if<SendAction>(action)) {
      StepResult r = Step(proto, rs);
      commit(TransitionKind::kHonestSend, send->label, r.sent->payload, r);
      return true;
    }
    if (const auto* sig = std::get_if<SignalAction>(action)) {
      commit(TransitionKind::kSignalStep, std::string(ToString(sig->kind)), std::nullopt,
             Step(proto, rs));
      return true;
    }
    const auto& recv = std::get<ReceiveAction>(*action);
    if (recv.channel == Channel::kDevice) {
      const auto partner = sys.DevicePartner(i);
      if (!partner || !recv.bind_as) return false;
      const auto& pb = gs.roles[*partner].bindings;
      auto it = pb.find(*recv.bind_as);
      if (it == pb.end()) return false;
      StepResult r = Step(proto, rs, it->second);
      if (!r.advanced) return false;
      commit(TransitionKind::kDeviceHandover, recv.label, it->second, r);
      return true;
    }
    for (InFlight& m : in_flight) {
      if (m.consumed || m.session_id != rs.session_id || m.msg.to != rs.agent) continue;
      StepResult r = Step(proto, rs, m.msg.payload);
      if (!r.advanced) continue;
      m.consumed = true;
      commit(TransitionKind::kIntruderDeliver, recv.label, m.msg.payload, r);
      return true;
    }
    return false;
  };

  for (bool progressed = true; progressed;) {
    progressed = false;
    for (std::size_t i = 0; i < gs.roles.size() && !progressed; ++i) {
      progressed = take_step(i);
    }
  }

  if (!AllHonestRolesCompleted(gs)) {
    std::optional<std::size_t> stuck;
    for (std::size_t i = 0; i < gs.roles.size(); ++i) {
      if (gs.roles[i].completed()) continue;
      if (!stuck || gs.roles[i].role == Role::kCks) stuck = i;
      if (gs.roles[i].role == Role::kCks) break;
    }
    const RoleState& rs = gs.roles[*stuck];
    std::string who(ToString(rs.role));
    if (rs.role != Role::kCks) who += " " + Pretty(rs.agent);
    std::string at = "step " + std::to_string(rs.pc);
    if (const RoleAction* a = CurrentAction(proto, rs)) {
      if (const auto* recv = std::get_if<ReceiveAction>(a)) at = recv->label;
    }
    std::string msg = "stuck: " + who + " waiting at " + at + " (pc " +
                      std::to_string(rs.pc) + ")";
    if (sys.scenario().sessions.size() > 1) {
      msg += " in session " + std::to_string(rs.session_id);
    }
    throw StuckError(msg);
  }
  run.final_state = gs;
  return run;
}

}  // namespace owntrans
