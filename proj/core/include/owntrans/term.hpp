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

#ifndef OWNTRANS_TERM_HPP_
#define OWNTRANS_TERM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace owntrans {

/**
 * Thrown when a term or pattern is built from arguments of the wrong kind,
 * e.g. an asymmetric encryption whose key is not a public key.
 */
class TermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The numeric values are the kind tag bytes of the canonical encoding.
enum class AtomKind : std::uint8_t {
  kAgentName = 0x01,
  kPassword = 0x02,
  kNonce = 0x03,
  kPublicKey = 0x04,
  kPrivateKey = 0x05,
  kConstant = 0x06,
};

// The numeric values are the constructor tag bytes of the canonical encoding.
enum class TermKind : std::uint8_t {
  kAtom = 0x01,
  kPair = 0x02,
  kAEnc = 0x03,
  kSEnc = 0x04,
};

std::string_view ToString(AtomKind kind);
std::optional<AtomKind> AtomKindFromString(std::string_view name);

namespace detail {
struct TermNode;
}  // namespace detail

/**
 * Immutable symbolic message.
 *
 * Terms are hash-consed: structurally equal terms share one node, so equality
 * is pointer comparison and copies are free. Nodes live for the lifetime of
 * the process. Each node caches its canonical encoding, which also defines
 * the canonical (deterministic) ordering used wherever term sets are
 * iterated.
 *
 * Concatenation `x || y || z` is represented as Pair(x, Pair(y, z)).
 */
class Term {
 public:
  static Term Atom(AtomKind kind, std::string_view label);
  static Term Agent(std::string_view label) {
    return Atom(AtomKind::kAgentName, label);
  }
  static Term Nonce(std::string_view label) {
    return Atom(AtomKind::kNonce, label);
  }
  static Term Password(std::string_view label) {
    return Atom(AtomKind::kPassword, label);
  }
  static Term PublicKey(std::string_view label) {
    return Atom(AtomKind::kPublicKey, label);
  }
  static Term PrivateKey(std::string_view label) {
    return Atom(AtomKind::kPrivateKey, label);
  }
  static Term Constant(std::string_view label) {
    return Atom(AtomKind::kConstant, label);
  }

  static Term Pair(Term left, Term right);
  // Throws TermError unless `key` is a PublicKey atom.
  static Term AEnc(Term key, Term body);
  // Throws TermError unless `key` is a Nonce atom.
  static Term SEnc(Term key, Term body);
  // Right-nested pairs; a single element is returned as is.
  static Term Tuple(std::initializer_list<Term> parts);
  static Term Tuple(const std::vector<Term>& parts);

  TermKind kind() const;
  bool is_atom() const { return kind() == TermKind::kAtom; }
  bool is_atom(AtomKind k) const { return is_atom() && atom_kind() == k; }

  // Atom accessors; precondition is_atom().
  AtomKind atom_kind() const;
  const std::string& label() const;

  // Pair accessors.
  Term left() const;
  Term right() const;
  // Encryption accessors (AEnc and SEnc).
  Term key() const;
  Term body() const;

  // Canonical byte encoding (see CanonicalEncode).
  const std::string& encoding() const;
  std::size_t hash() const;
  // Process-local identity; stable for the life of the process but not
  // across processes. Never use it for ordering anything user visible.
  std::uint32_t id() const;
  std::size_t depth() const;

  friend bool operator==(Term a, Term b) { return a.node_ == b.node_; }
  friend bool operator!=(Term a, Term b) { return a.node_ != b.node_; }

 private:
  explicit Term(const detail::TermNode* node) : node_(node) {}
  const detail::TermNode* node_;

  friend struct detail::TermNode;
  friend class TermFactory;
};

/// Strict weak ordering by canonical encoding.
struct CanonicalLess {
  bool operator()(Term a, Term b) const;
};

struct TermHash {
  std::size_t operator()(Term t) const { return t.hash(); }
};

using TermSet = std::set<Term, CanonicalLess>;

/**
 * Canonical byte encoding.
 *
 * Atom:  0x01, kind tag, 4-byte big-endian label length, UTF-8 label.
 * Pair:  0x02, then for left and right: 4-byte big-endian length, encoding.
 * AEnc:  0x03, then key and body encoded as for Pair.
 * SEnc:  0x04, likewise.
 */
std::string CanonicalEncode(Term t);
// Inverse of CanonicalEncode; throws TermError on malformed input.
Term CanonicalDecode(std::string_view bytes);

std::string ToHex(std::string_view bytes);
// Throws TermError on odd length or non-hex characters.
std::string FromHex(std::string_view hex);

/// Returns t plus every transitive constituent, including encryption keys.
TermSet Subterms(Term t);

/// OTR = {ID_A . ID_B . N_B}_P. Arguments are kind-checked.
Term MakeOtr(Term id_a, Term id_b, Term n_b, Term pk_cks);

/**
 * Rendering in protocol notation, e.g. `{A . PW_A . N_A . {A . B . N_B}_PCKS}_PCKS`.
 * Public keys render as `P_<label>`, private keys as `SK_<label>`.
 */
std::string Pretty(Term t);
// The name a scenario file uses to refer to an atom (P_CKS, SK_CKS, N_A...).
std::string AtomDisplayName(Term atom);

std::ostream& operator<<(std::ostream& os, Term t);

// ---------------------------------------------------------------------------
// Patterns

/**
 * A term with variables at the leaves. A variable either carries an atom kind
 * (and then only matches atoms of that kind) or is untyped and matches any
 * whole term. A variable occurring twice must bind the same term.
 */
class Pattern {
 public:
  enum class Kind { kLiteral, kVar, kPair, kAEnc, kSEnc };

  static Pattern Lit(Term t);
  static Pattern Var(std::string name, AtomKind kind);
  static Pattern AnyVar(std::string name);
  static Pattern Pair(Pattern left, Pattern right);
  // The key must be a PublicKey literal or a PublicKey-typed variable.
  static Pattern AEnc(Pattern key, Pattern body);
  // The key must be a Nonce literal or a Nonce-typed variable.
  static Pattern SEnc(Pattern key, Pattern body);
  static Pattern Tuple(std::vector<Pattern> parts);

  // Implicit on purpose: concrete terms are the common leaf.
  Pattern(Term t);  // NOLINT(google-explicit-constructor)

  Kind kind() const { return node_->kind; }
  Term literal() const { return *node_->literal; }
  const std::string& var_name() const { return node_->var_name; }
  // nullopt for untyped variables.
  std::optional<AtomKind> var_kind() const { return node_->var_kind; }
  const Pattern& left() const { return *node_->left; }
  const Pattern& right() const { return *node_->right; }

  bool is_ground() const;
  // The term when the pattern has no variables.
  std::optional<Term> AsTerm() const;
  void CollectVariables(std::set<std::string>* out) const;

  std::string ToString() const;

 private:
  struct Node {
    Kind kind;
    std::optional<Term> literal;
    std::string var_name;
    std::optional<AtomKind> var_kind;
    std::shared_ptr<const Pattern> left;
    std::shared_ptr<const Pattern> right;
  };
  explicit Pattern(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/**
 * Variable name to term, sorted by name. A flat vector rather than a node
 * map: role states hold a dozen bindings and are copied on every transition.
 */
class Bindings {
 public:
  using value_type = std::pair<std::string, Term>;
  using const_iterator = std::vector<value_type>::const_iterator;

  Bindings() = default;
  Bindings(std::initializer_list<value_type> init);

  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  const_iterator find(std::string_view name) const;
  std::size_t count(std::string_view name) const { return find(name) == end() ? 0 : 1; }
  // Throws std::out_of_range when unbound.
  Term at(std::string_view name) const;
  // Inserts unless already bound; returns the entry and whether it was new.
  std::pair<const_iterator, bool> emplace(std::string name, Term t);

  friend bool operator==(const Bindings& a, const Bindings& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<value_type> items_;
};

/**
 * Matches `t` against `p`, extending `seed`. Variables already bound in the
 * seed act as equality constraints. Returns nullopt on mismatch.
 */
std::optional<Bindings> Match(const Pattern& p, Term t, const Bindings& seed);

/**
 * Replaces bound variables by their terms. Unbound variables stay; the result
 * is ground exactly when every variable was bound.
 */
Pattern Substitute(const Pattern& p, const Bindings& b);

// Ground substitution; throws TermError naming the first unbound variable.
Term Instantiate(const Pattern& p, const Bindings& b);

}  // namespace owntrans

template <>
struct std::hash<owntrans::Term> {
  std::size_t operator()(owntrans::Term t) const { return t.hash(); }
};

#endif  // OWNTRANS_TERM_HPP_
