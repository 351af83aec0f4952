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

#include "checks.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "owntrans/dolev_yao.hpp"
#include "owntrans/explorer.hpp"

namespace owntrans::testing {

namespace {

// Constructor levels above the atoms for "depth <= 3" terms, where an atom
// has depth 1.
constexpr int kMaxLevels = 2;
constexpr int kOracleRounds = 6;

std::string Describe(const std::vector<Term>& facts, Term target) {
  std::ostringstream os;
  os << "facts {";
  for (std::size_t i = 0; i < facts.size(); ++i) os << (i ? ", " : "") << Pretty(facts[i]);
  os << "} target " << Pretty(target);
  return os.str();
}

template <typename... Args>
std::string Str(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

// Abstracts a random selection of positions of `t` into variables. Atoms
// become typed variables named after the atom, so repeated atoms share a
// variable; whole compound subterms occasionally become untyped variables.
Pattern Abstract(std::mt19937_64& rng, Term t, int* fresh) {
  std::uniform_int_distribution<int> coin(0, 9);
  if (t.is_atom()) {
    if (coin(rng) < 5) return Pattern::Var("v_" + AtomDisplayName(t), t.atom_kind());
    return Pattern::Lit(t);
  }
  if (coin(rng) == 0) return Pattern::AnyVar("w" + std::to_string((*fresh)++));
  if (t.kind() == TermKind::kPair) {
    Pattern l = Abstract(rng, t.left(), fresh);
    return Pattern::Pair(l, Abstract(rng, t.right(), fresh));
  }
  // Keys stay typed so the pattern constructors accept them.
  Pattern k = coin(rng) < 5 ? Pattern::Var("v_" + AtomDisplayName(t.key()), t.key().atom_kind())
                            : Pattern::Lit(t.key());
  Pattern b = Abstract(rng, t.body(), fresh);
  return t.kind() == TermKind::kAEnc ? Pattern::AEnc(k, b) : Pattern::SEnc(k, b);
}

bool AnalysisClosed(const KnowledgeBase& kb) {
  for (Term f : kb.facts()) {
    switch (f.kind()) {
      case TermKind::kPair:
        if (!kb.Contains(f.left()) || !kb.Contains(f.right())) return false;
        break;
      case TermKind::kSEnc:
        if (kb.Contains(f.key()) && !kb.Contains(f.body())) return false;
        break;
      case TermKind::kAEnc:
        if (kb.Contains(Term::PrivateKey(f.key().label())) && !kb.Contains(f.body())) {
          return false;
        }
        break;
      case TermKind::kAtom:
        break;
    }
  }
  return true;
}

std::vector<Term> RandomFacts(std::mt19937_64& rng, const std::vector<Term>& atoms,
                              std::size_t max_count, int max_depth) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_count)(rng);
  std::vector<Term> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(RandomTerm(rng, atoms, max_depth));
  return out;
}

void Compare(const std::vector<Term>& facts, Term target, OracleStats* stats) {
  const KnowledgeBase kb(facts);
  const bool fast = kb.CanDerive(target);
  const OracleAnswer slow = BruteForceDerivable(facts, target, kOracleRounds);
  ++stats->queries;
  if (fast == slow.derivable) return;
  std::string note;
  if (!slow.saturated) {
    // The round budget ran out while the known set was still growing: decide
    // the query at saturation and record how many rounds it really needs.
    const OracleAnswer full = BruteForceDerivable(facts, target, 1000);
    if (full.saturated && full.derivable == fast) {
      ++stats->beyond_budget;
      if (stats->beyond_budget_examples.size() < 3) {
        stats->beyond_budget_examples.push_back(Describe(facts, target) + " needs " +
                                                std::to_string(full.rounds) + " rounds");
      }
      return;
    }
    note = " (oracle unsaturated)";
  }
  ++stats->disagreements;
  if (stats->examples.size() < 5) {
    stats->examples.push_back(Describe(facts, target) + ": can_derive=" + (fast ? "1" : "0") +
                              " oracle=" + (slow.derivable ? "1" : "0") + note);
  }
}

}  // namespace

Failures CheckEncodingInjective(int full_depth) {
  Failures failures;
  const std::vector<Term> atoms = SixAtoms();
  const std::vector<Term> terms = EnumerateTerms(atoms, full_depth - 1);
  std::set<std::string> seen;
  for (Term t : terms) {
    if (!seen.insert(CanonicalEncode(t)).second) {
      failures.push_back("duplicate encoding for " + Pretty(t));
    }
  }
  // One more level, restricted so the interned term table stays small:
  // every encryption of an enumerated term, and pairs with an atom or
  // depth-one term on either side.
  std::vector<Term> small;
  for (Term t : terms) {
    if (t.depth() <= 1) small.push_back(t);
  }
  for (Term t : terms) {
    if (static_cast<int>(t.depth()) + 1 != full_depth) continue;
    std::vector<Term> next;
    for (Term k : atoms) {
      if (k.is_atom(AtomKind::kPublicKey)) next.push_back(Term::AEnc(k, t));
      if (k.is_atom(AtomKind::kNonce)) next.push_back(Term::SEnc(k, t));
    }
    for (Term s : small) {
      next.push_back(Term::Pair(t, s));
      next.push_back(Term::Pair(s, t));
    }
    for (Term n : next) {
      if (!seen.insert(CanonicalEncode(n)).second) {
        failures.push_back("duplicate encoding for " + Pretty(n));
      }
    }
  }
  return failures;
}

Failures CheckTermRoundTripAndMatch(std::uint64_t seed, int samples) {
  Failures failures;
  std::mt19937_64 rng(seed);
  const std::vector<Term> atoms = SixAtoms();
  for (int i = 0; i < samples && failures.size() < 10; ++i) {
    const Term t = RandomTerm(rng, atoms, 4);
    const std::string enc = CanonicalEncode(t);
    if (enc != t.encoding()) failures.push_back("cached encoding differs for " + Pretty(t));
    if (CanonicalDecode(enc) != t) failures.push_back("round trip failed for " + Pretty(t));
    if (FromHex(ToHex(enc)) != enc) failures.push_back("hex round trip failed for " + Pretty(t));

    int fresh = 0;
    const Pattern p = Abstract(rng, t, &fresh);
    auto theta = Match(p, t, {});
    if (!theta) {
      failures.push_back("abstraction " + p.ToString() + " does not match " + Pretty(t));
      continue;
    }
    std::set<std::string> vars;
    p.CollectVariables(&vars);
    for (const auto& v : vars) {
      if (!theta->count(v)) failures.push_back("variable " + v + " left unbound");
    }
    if (Instantiate(p, *theta) != t) {
      failures.push_back("substitution of " + p.ToString() + " does not give " + Pretty(t));
    }
    // Soundness on unrelated terms: any success must reproduce the term.
    const Term other = RandomTerm(rng, atoms, 4);
    if (auto b = Match(p, other, {})) {
      if (Instantiate(p, *b) != other) {
        failures.push_back("unsound match of " + p.ToString() + " on " + Pretty(other));
      }
    }
  }
  return failures;
}

Failures CheckSubtermClosure(std::uint64_t seed, int samples) {
  Failures failures;
  std::mt19937_64 rng(seed);
  const std::vector<Term> atoms = SixAtoms();
  for (int i = 0; i < samples && failures.size() < 10; ++i) {
    const Term t = RandomTerm(rng, atoms, 4);
    const TermSet all = Subterms(t);
    if (!all.count(t)) failures.push_back("subterms misses the term itself: " + Pretty(t));
    for (Term s : all) {
      for (Term u : Subterms(s)) {
        if (!all.count(u)) {
          failures.push_back("subterms of " + Pretty(t) + " not closed at " + Pretty(u));
        }
      }
    }
  }
  return failures;
}

Failures CheckKnowledgeClosure(std::uint64_t seed, int samples) {
  Failures failures;
  std::mt19937_64 rng(seed);
  const std::vector<Term> atoms = SixAtoms();
  std::vector<Term> no_private;
  for (Term a : atoms) {
    if (!a.is_atom(AtomKind::kPrivateKey)) no_private.push_back(a);
  }
  const Term secret = Term::Constant("S_fresh");
  const Term pk = Term::PublicKey("K");
  for (int i = 0; i < samples && failures.size() < 10; ++i) {
    const KnowledgeBase kb(RandomFacts(rng, atoms, 6, 3));
    const Term t = RandomTerm(rng, atoms, 3);
    const KnowledgeBase once = kb.Learn(t);
    const KnowledgeBase twice = once.Learn(t);
    if (!(once == twice)) failures.push_back("learn not idempotent on " + Pretty(t));
    if (!AnalysisClosed(once)) failures.push_back("learn result not analysis-closed");
    if (once.generation() != kb.generation() + 1) failures.push_back("generation not bumped");
    if (!std::includes(once.facts().begin(), once.facts().end(), kb.facts().begin(),
                       kb.facts().end(), CanonicalLess())) {
      failures.push_back("learn dropped facts");
    }
    for (int q = 0; q < 4; ++q) {
      const Term query = RandomTerm(rng, atoms, 3);
      if (kb.CanDerive(query) && !once.CanDerive(query)) {
        failures.push_back("can_derive not monotone on " + Pretty(query));
      }
    }
    // No decryption without the private key.
    const KnowledgeBase blind = KnowledgeBase(RandomFacts(rng, no_private, 6, 3))
                                    .Learn(Term::AEnc(pk, Term::Pair(secret, RandomTerm(rng, no_private, 1))));
    if (blind.CanDerive(secret)) failures.push_back("secret derived without private key");
  }
  return failures;
}

OracleStats CompareWithOracleSampled(std::uint64_t seed, std::size_t fact_sets) {
  OracleStats stats;
  std::mt19937_64 rng(seed);
  const std::vector<Term> atoms = SixAtoms();
  for (std::size_t i = 0; i < fact_sets; ++i) {
    const std::vector<Term> facts = RandomFacts(rng, atoms, 8, kMaxLevels);
    ++stats.fact_sets;
    // Fresh random targets plus targets built from the facts' parts, which
    // are the interesting ones.
    std::vector<Term> targets{RandomTerm(rng, atoms, kMaxLevels), RandomTerm(rng, atoms, 1)};
    TermSet parts;
    for (Term f : facts) {
      const TermSet s = Subterms(f);
      parts.insert(s.begin(), s.end());
    }
    if (!parts.empty()) {
      std::vector<Term> pv(parts.begin(), parts.end());
      std::uniform_int_distribution<std::size_t> pick(0, pv.size() - 1);
      targets.push_back(pv[pick(rng)]);
      targets.push_back(Term::Pair(pv[pick(rng)], pv[pick(rng)]));
    }
    for (Term target : targets) Compare(facts, target, &stats);
  }
  return stats;
}

OracleStats CompareWithOracleExhaustive() {
  const Term a = Term::Agent("A");
  const Term n1 = Term::Nonce("N1");
  const Term n2 = Term::Nonce("N2");
  const Term c = Term::Constant("C");
  const Term pk = Term::PublicKey("K");
  const Term sk = Term::PrivateKey("K");
  const std::vector<Term> pool{
      a, n1, n2, c, pk, sk,
      Term::AEnc(pk, n1),
      Term::SEnc(n1, n2),
      Term::SEnc(n2, c),
      Term::Pair(a, n1),
      Term::AEnc(pk, Term::Pair(n2, c)),
      Term::SEnc(n1, Term::Pair(sk, a)),
      Term::Pair(Term::SEnc(n2, n1), c),
      Term::AEnc(pk, Term::SEnc(n1, c)),
  };
  std::vector<Term> targets = EnumerateTerms(SixAtoms(), 1);
  for (Term p : pool) {
    const TermSet s = Subterms(p);
    targets.insert(targets.end(), s.begin(), s.end());
  }
  targets.push_back(Term::AEnc(pk, Term::Pair(n1, c)));
  targets.push_back(Term::SEnc(n2, Term::Pair(a, Term::SEnc(n1, c))));
  targets.push_back(Term::Pair(Term::Pair(n2, c), Term::AEnc(pk, sk)));
  std::sort(targets.begin(), targets.end(), CanonicalLess());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  OracleStats stats;
  const std::size_t n = pool.size();
  std::vector<Term> facts;
  // All subsets of size <= 4, in lexicographic index order.
  auto rec = [&](auto&& self, std::size_t start) -> void {
    ++stats.fact_sets;
    for (Term target : targets) Compare(facts, target, &stats);
    if (facts.size() == 4) return;
    for (std::size_t i = start; i < n; ++i) {
      facts.push_back(pool[i]);
      self(self, i + 1);
      facts.pop_back();
    }
  };
  rec(rec, 0);
  return stats;
}

Failures CheckBfsMinimality(const std::string& scenario, PropertyId id) {
  Failures failures;
  const System sys = LoadSystem(scenario);
  ExploreOptions options;
  options.max_depth = sys.scenario().bounds.max_depth;
  options.properties = {id};
  const ExploreResult result = Explore(sys, options);
  const Verdict& v = result.verdicts.at(0);
  if (!v.counterexample) {
    failures.push_back(Str(scenario, ": no counterexample for ", Info(id).name));
    return failures;
  }
  const int bfs_len = static_cast<int>(v.counterexample->path.size());
  const std::optional<int> iddfs = ShortestTriggerIddfs(sys, id, bfs_len);
  if (!iddfs || *iddfs != bfs_len) {
    failures.push_back(Str(scenario, ": BFS counterexample length ", bfs_len,
                           " but iterative deepening found ",
                           iddfs ? std::to_string(*iddfs) : std::string("none")));
  }
  return failures;
}

Failures CheckVisitedSetSoundness(const std::string& scenario) {
  Failures failures;
  const System sys = LoadSystem(scenario);
  ExploreOptions options;
  options.max_depth = sys.scenario().bounds.max_depth;
  for (const auto& name : sys.scenario().properties) options.properties.push_back(FindProperty(name)->id);
  options.collect_encodings = true;
  options.threads = 1;
  const ExploreResult with = Explore(sys, options);
  options.dedup = false;
  const ExploreResult without = Explore(sys, options);
  if (with.encodings != without.encodings) {
    failures.push_back(Str(scenario, ": distinct states with visited set ", with.encodings.size(),
                           ", without ", without.encodings.size()));
  }
  if (with.states != with.encodings.size()) {
    failures.push_back(Str(scenario, ": visited set merged distinct states (", with.states,
                           " keys vs ", with.encodings.size(), " encodings)"));
  }
  if (with.verdicts.size() != without.verdicts.size()) {
    failures.push_back(scenario + ": verdict count differs without visited set");
  } else {
    for (std::size_t i = 0; i < with.verdicts.size(); ++i) {
      if (with.verdicts[i].status != without.verdicts[i].status) {
        failures.push_back(Str(scenario, ": ", with.verdicts[i].property,
                               " differs without visited set"));
      }
      const auto& a = with.verdicts[i].counterexample;
      const auto& b = without.verdicts[i].counterexample;
      if (a.has_value() != b.has_value() || (a && a->path.size() != b->path.size())) {
        failures.push_back(Str(scenario, ": ", with.verdicts[i].property,
                               " counterexample length differs without visited set"));
      }
    }
  }
  return failures;
}

Failures CheckAgreementMutations() {
  Failures failures;
  const System sys = LoadSystem("base");
  const GlobalState done = SimulateHonest(sys).final_state;
  if (CheckAgreement(sys, done, false)) failures.push_back("honest run violates agreement");
  if (CheckAgreement(sys, done, true)) failures.push_back("honest run violates injective agreement");

  auto commit = std::find_if(done.trace.begin(), done.trace.end(), [](const SignalEvent& e) {
    return e.kind == SignalKind::kCommitNewOwner;
  });
  if (commit == done.trace.end()) {
    failures.push_back("honest run has no Commit");
    return failures;
  }
  const std::size_t at = static_cast<std::size_t>(commit - done.trace.begin());
  // Agreement only constrains Commits between honest owners, so agent
  // parameters are perturbed to the other honest agent.
  const Term a = *sys.Lookup("A");
  const Term b = *sys.Lookup("B");
  const Term other_nonce = *sys.Lookup("N_I");
  const std::vector<std::pair<std::string, SignalEvent>> mutations = [&] {
    std::vector<std::pair<std::string, SignalEvent>> out;
    SignalEvent e = *commit;
    e.partner = b;
    out.emplace_back("a", e);
    e = *commit;
    e.actor = a;
    out.emplace_back("b", e);
    e = *commit;
    e.payload.at(0) = other_nonce;
    out.emplace_back("na", e);
    e = *commit;
    e.payload.at(1) = other_nonce;
    out.emplace_back("nb", e);
    return out;
  }();
  for (const auto& [name, event] : mutations) {
    GlobalState mutated = done;
    mutated.trace[at] = event;
    if (!CheckAgreement(sys, mutated, false)) {
      failures.push_back("perturbing " + name + " does not violate agreement");
    }
  }
  // Commit placed before its Running.
  GlobalState reordered = done;
  const SignalEvent c = reordered.trace[at];
  reordered.trace.erase(reordered.trace.begin() + static_cast<std::ptrdiff_t>(at));
  reordered.trace.insert(reordered.trace.begin(), c);
  if (!CheckAgreement(sys, reordered, false)) {
    failures.push_back("Commit before Running does not violate agreement");
  }
  // Two Commits sharing one Running: injective only.
  GlobalState doubled = done;
  doubled.trace.push_back(*commit);
  if (CheckAgreement(sys, doubled, false)) failures.push_back("duplicate Commit violates agreement");
  if (!CheckAgreement(sys, doubled, true)) {
    failures.push_back("duplicate Commit does not violate injective agreement");
  }
  return failures;
}

Failures CheckThreadDeterminism(const std::string& scenario) {
  Failures failures;
  const System sys = LoadSystem(scenario);
  auto run = [&](const char* threads) {
    ::setenv("OWNTRANS_THREADS", threads, 1);
    ExploreOptions options;
    options.max_depth = sys.scenario().bounds.max_depth;
    for (const auto& name : sys.scenario().properties) options.properties.push_back(FindProperty(name)->id);
    options.collect_encodings = true;
    options.threads = 0;
    return Explore(sys, options);
  };
  const char* saved = std::getenv("OWNTRANS_THREADS");
  const std::string saved_value = saved ? saved : "";
  const ExploreResult one = run("1");
  const ExploreResult four = run("4");
  if (saved) {
    ::setenv("OWNTRANS_THREADS", saved_value.c_str(), 1);
  } else {
    ::unsetenv("OWNTRANS_THREADS");
  }
  if (one.states != four.states || one.transitions != four.transitions ||
      one.depth_reached != four.depth_reached || one.bound_hit != four.bound_hit) {
    failures.push_back(Str(scenario, ": counts differ (", one.states, "/", one.transitions,
                           " vs ", four.states, "/", four.transitions, ")"));
  }
  if (one.encodings != four.encodings) failures.push_back(scenario + ": state sets differ");
  if (!(one.coverage == four.coverage)) failures.push_back(scenario + ": coverage differs");
  if (!(one.verdicts == four.verdicts)) {
    failures.push_back(scenario + ": verdicts or counterexamples differ");
  }
  return failures;
}

}  // namespace owntrans::testing
