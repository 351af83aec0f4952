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

#include "owntrans/dolev_yao.hpp"

#include <algorithm>
#include <utility>

namespace owntrans {

KnowledgeBase::KnowledgeBase(std::span<const Term> initial) {
  for (Term t : initial) InsertClosed(t);
}

bool KnowledgeBase::InsertRaw(Term t) {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), t, CanonicalLess());
  if (it != facts_.end() && *it == t) return false;
  facts_.insert(it, t);
  return true;
}

void KnowledgeBase::InsertClosed(Term t) {
  std::vector<Term> work{t};
  while (!work.empty()) {
    Term cur = work.back();
    work.pop_back();
    if (!InsertRaw(cur)) continue;
    switch (cur.kind()) {
      case TermKind::kPair:
        work.push_back(cur.left());
        work.push_back(cur.right());
        break;
      case TermKind::kSEnc:
        if (Contains(cur.key())) work.push_back(cur.body());
        break;
      case TermKind::kAEnc:
        if (Contains(Term::PrivateKey(cur.key().label()))) {
          work.push_back(cur.body());
        }
        break;
      case TermKind::kAtom:
        // A newly learned key may open ciphertexts heard earlier.
        if (cur.atom_kind() == AtomKind::kNonce) {
          for (Term f : facts_) {
            if (f.kind() == TermKind::kSEnc && f.key() == cur) {
              work.push_back(f.body());
            }
          }
        } else if (cur.atom_kind() == AtomKind::kPrivateKey) {
          const Term pk = Term::PublicKey(cur.label());
          for (Term f : facts_) {
            if (f.kind() == TermKind::kAEnc && f.key() == pk) {
              work.push_back(f.body());
            }
          }
        }
        break;
    }
  }
}

KnowledgeBase KnowledgeBase::Learn(Term t) const {
  KnowledgeBase next = *this;
  next.InsertClosed(t);
  next.generation_ = generation_ + 1;
  return next;
}

KnowledgeBase KnowledgeBase::LearnAll(std::span<const Term> ts) const {
  KnowledgeBase next = *this;
  for (Term t : ts) next.InsertClosed(t);
  next.generation_ = generation_ + 1;
  return next;
}

bool KnowledgeBase::Contains(Term t) const {
  return std::binary_search(facts_.begin(), facts_.end(), t, CanonicalLess());
}

bool KnowledgeBase::CanDerive(Term t) const {
  if (Contains(t)) return true;
  if (t.is_atom()) return false;
  return CanDerive(t.left()) && CanDerive(t.right());
}

namespace {

using Candidate = std::pair<Term, Bindings>;

Term Rebuild(Pattern::Kind kind, Term l, Term r) {
  switch (kind) {
    case Pattern::Kind::kPair:
      return Term::Pair(l, r);
    case Pattern::Kind::kAEnc:
      return Term::AEnc(l, r);
    default:
      return Term::SEnc(l, r);
  }
}

class InstanceGenerator {
 public:
  InstanceGenerator(const KnowledgeBase& kb, const TermSet& universe)
      : kb_(kb), universe_(universe) {}

  std::vector<Candidate> Gen(const Pattern& p, const Bindings& seed) const {
    std::vector<Candidate> out;
    switch (p.kind()) {
      case Pattern::Kind::kLiteral:
        if (kb_.CanDerive(p.literal())) out.emplace_back(p.literal(), seed);
        return out;
      case Pattern::Kind::kVar: {
        auto bound = seed.find(p.var_name());
        if (bound != seed.end()) {
          if (kb_.CanDerive(bound->second)) out.emplace_back(bound->second, seed);
          return out;
        }
        if (p.var_kind()) {
          for (Term a : universe_) {
            if (a.is_atom(*p.var_kind()) && kb_.Contains(a)) {
              Bindings b = seed;
              b.emplace(p.var_name(), a);
              out.emplace_back(a, std::move(b));
            }
          }
        } else {
          for (Term f : kb_.facts()) {
            Bindings b = seed;
            b.emplace(p.var_name(), f);
            out.emplace_back(f, std::move(b));
          }
        }
        return out;
      }
      default:
        break;
    }
    // Replay of known facts of the right shape.
    for (Term f : kb_.facts()) {
      if (auto b = Match(p, f, seed)) out.emplace_back(f, std::move(*b));
    }
    // Composition from derivable parts.
    for (auto& [l, lb] : Gen(p.left(), seed)) {
      for (auto& [r, rb] : Gen(p.right(), lb)) {
        out.emplace_back(Rebuild(p.kind(), l, r), std::move(rb));
      }
    }
    return out;
  }

 private:
  const KnowledgeBase& kb_;
  const TermSet& universe_;
};

}  // namespace

std::vector<Term> SynthesizableInstances(const KnowledgeBase& kb,
                                         const Pattern& p,
                                         const TermSet& universe,
                                         const Bindings& seed) {
  InstanceGenerator gen(kb, universe);
  TermSet uniq;
  for (auto& [t, b] : gen.Gen(p, seed)) uniq.insert(t);
  return {uniq.begin(), uniq.end()};
}

}  // namespace owntrans
