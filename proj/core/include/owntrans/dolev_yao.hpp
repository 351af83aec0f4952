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

#ifndef OWNTRANS_DOLEV_YAO_HPP_
#define OWNTRANS_DOLEV_YAO_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "owntrans/term.hpp"

namespace owntrans {

/**
 * Intruder knowledge: an analysis-closed set of facts.
 *
 * Analysis (projection, decryption with a known key) is saturated eagerly on
 * every Learn; synthesis (pairing, encryption) is evaluated lazily by
 * CanDerive through structural recursion on the queried term. Because every
 * key is an atom, an encryption key is derivable exactly when it is a fact,
 * which is what makes the split complete.
 *
 * Value type: Learn returns a new knowledge base and leaves *this untouched.
 */
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::span<const Term> initial);

  [[nodiscard]] KnowledgeBase Learn(Term t) const;
  [[nodiscard]] KnowledgeBase LearnAll(std::span<const Term> ts) const;

  bool Contains(Term t) const;
  bool CanDerive(Term t) const;

  // Canonically ordered.
  const std::vector<Term>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }
  std::uint64_t generation() const { return generation_; }

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    return a.facts_ == b.facts_;
  }

 private:
  void InsertClosed(Term t);
  bool InsertRaw(Term t);

  std::vector<Term> facts_;
  std::uint64_t generation_ = 0;
};

struct IntruderProfile {
  std::vector<Term> initial_knowledge;
  // A passive intruder only forwards overheard messages verbatim.
  bool active = true;
};

/**
 * Every term t such that Match(p, t, seed) succeeds, every typed variable is
 * instantiated by an atom of `universe`, untyped variables are instantiated
 * by known facts, and kb.CanDerive(t) holds. Whole-term replay of a known
 * fact is included even when its interior is not derivable piecewise.
 * Returned in canonical order.
 */
std::vector<Term> SynthesizableInstances(const KnowledgeBase& kb,
                                         const Pattern& p,
                                         const TermSet& universe,
                                         const Bindings& seed = {});

}  // namespace owntrans

#endif  // OWNTRANS_DOLEV_YAO_HPP_
