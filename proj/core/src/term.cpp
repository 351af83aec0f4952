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

#include "owntrans/term.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstring>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace owntrans {

namespace detail {

struct TermNode {
  TermKind kind;
  AtomKind atom_kind{};
  std::string label;
  const TermNode* a = nullptr;  // pair left / encryption key
  const TermNode* b = nullptr;  // pair right / encryption body
  std::string encoding;
  std::size_t hash = 0;
  std::uint32_t id = 0;
  std::size_t depth = 0;
};

}  // namespace detail

namespace {

using detail::TermNode;

void PutU32(std::string* out, std::uint32_t v) {
  out->push_back(static_cast<char>((v >> 24) & 0xff));
  out->push_back(static_cast<char>((v >> 16) & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
  out->push_back(static_cast<char>(v & 0xff));
}

std::uint32_t GetU32(std::string_view in, std::size_t pos) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + 3]));
}

// Global unique table. Sharded so that successor generation on several
// threads does not serialize on one lock.
class UniqueTable {
 public:
  static UniqueTable& Get() {
    static UniqueTable* table = new UniqueTable();
    return *table;
  }

  const TermNode* Intern(std::string key, std::unique_ptr<TermNode> fresh) {
    const std::size_t h = std::hash<std::string>()(key);
    Shard& shard = shards_[h % kShards];
    std::lock_guard<std::mutex> lock(shard.mu);
    auto it = shard.map.find(key);
    if (it != shard.map.end()) return it->second;
    fresh->id = next_id_.fetch_add(1, std::memory_order_relaxed);
    fresh->hash = std::hash<std::string>()(fresh->encoding);
    const TermNode* node = fresh.get();
    shard.owned.push_back(std::move(fresh));
    shard.map.emplace(std::move(key), node);
    return node;
  }

  const TermNode* Lookup(const std::string& key) {
    const std::size_t h = std::hash<std::string>()(key);
    Shard& shard = shards_[h % kShards];
    std::lock_guard<std::mutex> lock(shard.mu);
    auto it = shard.map.find(key);
    return it == shard.map.end() ? nullptr : it->second;
  }

 private:
  static constexpr std::size_t kShards = 64;
  struct Shard {
    std::mutex mu;
    std::unordered_map<std::string, const TermNode*> map;
    std::vector<std::unique_ptr<TermNode>> owned;
  };
  std::array<Shard, kShards> shards_;
  std::atomic<std::uint32_t> next_id_{1};
};

std::string CompoundKey(TermKind kind, const TermNode* a, const TermNode* b) {
  std::string key(1 + 2 * sizeof(void*), '\0');
  key[0] = static_cast<char>(kind);
  std::memcpy(key.data() + 1, &a, sizeof(void*));
  std::memcpy(key.data() + 1 + sizeof(void*), &b, sizeof(void*));
  return key;
}

}  // namespace

class TermFactory {
 public:
  static Term MakeAtom(AtomKind kind, std::string_view label) {
    std::string enc;
    enc.reserve(6 + label.size());
    enc.push_back(static_cast<char>(TermKind::kAtom));
    enc.push_back(static_cast<char>(kind));
    PutU32(&enc, static_cast<std::uint32_t>(label.size()));
    enc.append(label);
    // Atom keys are their encodings; compound keys start with a constructor
    // byte != 0x01 followed by pointers, so the two key spaces never collide.
    auto& table = UniqueTable::Get();
    if (const TermNode* hit = table.Lookup(enc)) return Term(hit);
    auto node = std::make_unique<TermNode>();
    node->kind = TermKind::kAtom;
    node->atom_kind = kind;
    node->label = std::string(label);
    node->encoding = enc;
    node->depth = 0;
    return Term(table.Intern(std::move(enc), std::move(node)));
  }

  static Term MakeCompound(TermKind kind, Term a, Term b) {
    std::string key = CompoundKey(kind, a.node_, b.node_);
    auto& table = UniqueTable::Get();
    if (const TermNode* hit = table.Lookup(key)) return Term(hit);
    auto node = std::make_unique<TermNode>();
    node->kind = kind;
    node->a = a.node_;
    node->b = b.node_;
    node->depth = 1 + std::max(a.node_->depth, b.node_->depth);
    std::string& enc = node->encoding;
    enc.reserve(9 + a.node_->encoding.size() + b.node_->encoding.size());
    enc.push_back(static_cast<char>(kind));
    PutU32(&enc, static_cast<std::uint32_t>(a.node_->encoding.size()));
    enc.append(a.node_->encoding);
    PutU32(&enc, static_cast<std::uint32_t>(b.node_->encoding.size()));
    enc.append(b.node_->encoding);
    return Term(table.Intern(std::move(key), std::move(node)));
  }
};

std::string_view ToString(AtomKind kind) {
  switch (kind) {
    case AtomKind::kAgentName:
      return "AgentName";
    case AtomKind::kPassword:
      return "Password";
    case AtomKind::kNonce:
      return "Nonce";
    case AtomKind::kPublicKey:
      return "PublicKey";
    case AtomKind::kPrivateKey:
      return "PrivateKey";
    case AtomKind::kConstant:
      return "Constant";
  }
  return "?";
}

std::optional<AtomKind> AtomKindFromString(std::string_view name) {
  for (AtomKind k : {AtomKind::kAgentName, AtomKind::kPassword, AtomKind::kNonce,
                     AtomKind::kPublicKey, AtomKind::kPrivateKey,
                     AtomKind::kConstant}) {
    if (ToString(k) == name) return k;
  }
  return std::nullopt;
}

Term Term::Atom(AtomKind kind, std::string_view label) {
  if (label.empty()) throw TermError("atom label must not be empty");
  return TermFactory::MakeAtom(kind, label);
}

Term Term::Pair(Term left, Term right) {
  return TermFactory::MakeCompound(TermKind::kPair, left, right);
}

Term Term::AEnc(Term key, Term body) {
  if (!key.is_atom(AtomKind::kPublicKey)) {
    throw TermError("key must be a public key");
  }
  return TermFactory::MakeCompound(TermKind::kAEnc, key, body);
}

Term Term::SEnc(Term key, Term body) {
  if (!key.is_atom(AtomKind::kNonce)) {
    throw TermError("symmetric key must be a nonce");
  }
  return TermFactory::MakeCompound(TermKind::kSEnc, key, body);
}

Term Term::Tuple(std::initializer_list<Term> parts) {
  return Tuple(std::vector<Term>(parts));
}

Term Term::Tuple(const std::vector<Term>& parts) {
  if (parts.empty()) throw TermError("empty tuple");
  Term acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
    acc = Pair(*it, acc);
  }
  return acc;
}

TermKind Term::kind() const { return node_->kind; }
AtomKind Term::atom_kind() const { return node_->atom_kind; }
const std::string& Term::label() const { return node_->label; }
Term Term::left() const { return Term(node_->a); }
Term Term::right() const { return Term(node_->b); }
Term Term::key() const { return Term(node_->a); }
Term Term::body() const { return Term(node_->b); }
const std::string& Term::encoding() const { return node_->encoding; }
std::size_t Term::hash() const { return node_->hash; }
std::uint32_t Term::id() const { return node_->id; }
std::size_t Term::depth() const { return node_->depth; }

bool CanonicalLess::operator()(Term a, Term b) const {
  if (a == b) return false;
  return a.encoding() < b.encoding();
}

std::string CanonicalEncode(Term t) { return t.encoding(); }

namespace {

Term DecodeAt(std::string_view in, std::size_t* pos, int nesting) {
  if (nesting > 4096) throw TermError("encoding nested too deeply");
  auto need = [&](std::size_t n) {
    if (*pos + n > in.size()) throw TermError("truncated term encoding");
  };
  need(1);
  const auto tag = static_cast<std::uint8_t>(in[*pos]);
  *pos += 1;
  if (tag == static_cast<std::uint8_t>(TermKind::kAtom)) {
    need(5);
    const auto kind_byte = static_cast<std::uint8_t>(in[*pos]);
    if (kind_byte < 0x01 || kind_byte > 0x06) {
      throw TermError("bad atom kind tag");
    }
    const std::uint32_t len = GetU32(in, *pos + 1);
    *pos += 5;
    need(len);
    std::string_view label = in.substr(*pos, len);
    *pos += len;
    return Term::Atom(static_cast<AtomKind>(kind_byte), label);
  }
  if (tag < 0x02 || tag > 0x04) throw TermError("bad constructor tag");
  auto child = [&]() {
    need(4);
    const std::uint32_t len = GetU32(in, *pos);
    *pos += 4;
    need(len);
    std::size_t sub = 0;
    Term t = DecodeAt(in.substr(*pos, len), &sub, nesting + 1);
    if (sub != len) throw TermError("length prefix does not match child");
    *pos += len;
    return t;
  };
  Term a = child();
  Term b = child();
  switch (static_cast<TermKind>(tag)) {
    case TermKind::kPair:
      return Term::Pair(a, b);
    case TermKind::kAEnc:
      return Term::AEnc(a, b);
    default:
      return Term::SEnc(a, b);
  }
}

}  // namespace

Term CanonicalDecode(std::string_view bytes) {
  std::size_t pos = 0;
  Term t = DecodeAt(bytes, &pos, 0);
  if (pos != bytes.size()) throw TermError("trailing bytes after term");
  return t;
}

std::string ToHex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char c : bytes) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(kDigits[u >> 4]);
    out.push_back(kDigits[u & 0x0f]);
  }
  return out;
}

std::string FromHex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw TermError("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw TermError("invalid hex digit");
  };
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  }
  return out;
}

TermSet Subterms(Term t) {
  TermSet out;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (!out.insert(cur).second) continue;
    if (!cur.is_atom()) {
      stack.push_back(cur.left());
      stack.push_back(cur.right());
    }
  }
  return out;
}

Term MakeOtr(Term id_a, Term id_b, Term n_b, Term pk_cks) {
  if (!id_a.is_atom(AtomKind::kAgentName)) {
    throw TermError("id_a must be an agent name");
  }
  if (!id_b.is_atom(AtomKind::kAgentName)) {
    throw TermError("id_b must be an agent name");
  }
  if (!n_b.is_atom(AtomKind::kNonce)) throw TermError("n_b must be a nonce");
  if (!pk_cks.is_atom(AtomKind::kPublicKey)) {
    throw TermError("key must be a public key");
  }
  return Term::AEnc(pk_cks, Term::Tuple({id_a, id_b, n_b}));
}

std::string AtomDisplayName(Term atom) {
  switch (atom.atom_kind()) {
    case AtomKind::kPublicKey:
      return "P_" + atom.label();
    case AtomKind::kPrivateKey:
      return "SK_" + atom.label();
    default:
      return atom.label();
  }
}

namespace {

void RenderInto(Term t, std::string* out) {
  switch (t.kind()) {
    case TermKind::kAtom:
      out->append(AtomDisplayName(t));
      return;
    case TermKind::kPair: {
      // Flatten the right spine: x . y . z
      Term cur = t;
      bool first = true;
      while (cur.kind() == TermKind::kPair) {
        if (!first) out->append(" . ");
        RenderInto(cur.left(), out);
        first = false;
        cur = cur.right();
      }
      out->append(" . ");
      RenderInto(cur, out);
      return;
    }
    case TermKind::kAEnc:
    case TermKind::kSEnc: {
      out->push_back('{');
      RenderInto(t.body(), out);
      out->append("}_");
      Term k = t.key();
      if (k.atom_kind() == AtomKind::kPublicKey) {
        out->append("P" + k.label());
      } else {
        out->append(k.label());
      }
      return;
    }
  }
}

}  // namespace

std::string Pretty(Term t) {
  std::string out;
  RenderInto(t, &out);
  return out;
}

std::ostream& operator<<(std::ostream& os, Term t) { return os << Pretty(t); }

// ---------------------------------------------------------------------------
// Pattern

Pattern::Pattern(Term t)
    : node_(std::make_shared<const Node>(
          Node{Kind::kLiteral, t, {}, std::nullopt, nullptr, nullptr})) {}

Pattern Pattern::Lit(Term t) { return Pattern(t); }

Pattern Pattern::Var(std::string name, AtomKind kind) {
  if (name.empty()) throw TermError("variable name must not be empty");
  return Pattern(std::make_shared<const Node>(
      Node{Kind::kVar, std::nullopt, std::move(name), kind, nullptr, nullptr}));
}

Pattern Pattern::AnyVar(std::string name) {
  if (name.empty()) throw TermError("variable name must not be empty");
  return Pattern(std::make_shared<const Node>(Node{
      Kind::kVar, std::nullopt, std::move(name), std::nullopt, nullptr, nullptr}));
}

namespace {

bool KeyShapeOk(const Pattern& key, AtomKind want) {
  if (key.kind() == Pattern::Kind::kLiteral) return key.literal().is_atom(want);
  if (key.kind() == Pattern::Kind::kVar) return key.var_kind() == want;
  return false;
}

}  // namespace

Pattern Pattern::Pair(Pattern left, Pattern right) {
  return Pattern(std::make_shared<const Node>(
      Node{Kind::kPair, std::nullopt, {}, std::nullopt,
           std::make_shared<const Pattern>(std::move(left)),
           std::make_shared<const Pattern>(std::move(right))}));
}

Pattern Pattern::AEnc(Pattern key, Pattern body) {
  if (!KeyShapeOk(key, AtomKind::kPublicKey)) {
    throw TermError("key must be a public key");
  }
  return Pattern(std::make_shared<const Node>(
      Node{Kind::kAEnc, std::nullopt, {}, std::nullopt,
           std::make_shared<const Pattern>(std::move(key)),
           std::make_shared<const Pattern>(std::move(body))}));
}

Pattern Pattern::SEnc(Pattern key, Pattern body) {
  if (!KeyShapeOk(key, AtomKind::kNonce)) {
    throw TermError("symmetric key must be a nonce");
  }
  return Pattern(std::make_shared<const Node>(
      Node{Kind::kSEnc, std::nullopt, {}, std::nullopt,
           std::make_shared<const Pattern>(std::move(key)),
           std::make_shared<const Pattern>(std::move(body))}));
}

Pattern Pattern::Tuple(std::vector<Pattern> parts) {
  if (parts.empty()) throw TermError("empty tuple pattern");
  Pattern acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
    acc = Pair(*it, acc);
  }
  return acc;
}

bool Pattern::is_ground() const { return AsTerm().has_value(); }

std::optional<Term> Pattern::AsTerm() const {
  switch (kind()) {
    case Kind::kLiteral:
      return literal();
    case Kind::kVar:
      return std::nullopt;
    default: {
      auto l = left().AsTerm();
      if (!l) return std::nullopt;
      auto r = right().AsTerm();
      if (!r) return std::nullopt;
      if (kind() == Kind::kPair) return Term::Pair(*l, *r);
      if (kind() == Kind::kAEnc) return Term::AEnc(*l, *r);
      return Term::SEnc(*l, *r);
    }
  }
}

void Pattern::CollectVariables(std::set<std::string>* out) const {
  switch (kind()) {
    case Kind::kLiteral:
      return;
    case Kind::kVar:
      out->insert(var_name());
      return;
    default:
      left().CollectVariables(out);
      right().CollectVariables(out);
  }
}

std::string Pattern::ToString() const {
  switch (kind()) {
    case Kind::kLiteral:
      return Pretty(literal());
    case Kind::kVar:
      return "?" + var_name() + ":" +
             (var_kind() ? std::string(owntrans::ToString(*var_kind())) : "Any");
    case Kind::kPair: {
      std::string out = left().ToString();
      const Pattern* cur = &right();
      while (cur->kind() == Kind::kPair) {
        out += " . " + cur->left().ToString();
        cur = &cur->right();
      }
      return out + " . " + cur->ToString();
    }
    default: {
      std::string k;
      if (left().kind() == Kind::kLiteral &&
          left().literal().atom_kind() == AtomKind::kPublicKey) {
        k = "P" + left().literal().label();
      } else {
        k = left().kind() == Kind::kLiteral ? left().literal().label()
                                             : left().ToString();
      }
      return "{" + right().ToString() + "}_" + k;
    }
  }
}

Bindings::Bindings(std::initializer_list<value_type> init) {
  for (const auto& [name, t] : init) emplace(name, t);
}

Bindings::const_iterator Bindings::find(std::string_view name) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), name,
                             [](const value_type& v, std::string_view n) { return v.first < n; });
  return it != items_.end() && it->first == name ? it : items_.end();
}

Term Bindings::at(std::string_view name) const {
  auto it = find(name);
  if (it == end()) throw std::out_of_range("unbound variable '" + std::string(name) + "'");
  return it->second;
}

std::pair<Bindings::const_iterator, bool> Bindings::emplace(std::string name, Term t) {
  auto it = std::lower_bound(items_.begin(), items_.end(), name,
                             [](const value_type& v, const std::string& n) { return v.first < n; });
  if (it != items_.end() && it->first == name) return {it, false};
  it = items_.insert(it, value_type{std::move(name), t});
  return {it, true};
}

namespace {

bool MatchInto(const Pattern& p, Term t, Bindings* b) {
  switch (p.kind()) {
    case Pattern::Kind::kLiteral:
      return p.literal() == t;
    case Pattern::Kind::kVar: {
      auto it = b->find(p.var_name());
      if (it != b->end()) return it->second == t;
      if (p.var_kind() && !t.is_atom(*p.var_kind())) return false;
      b->emplace(p.var_name(), t);
      return true;
    }
    case Pattern::Kind::kPair:
      if (t.kind() != TermKind::kPair) return false;
      break;
    case Pattern::Kind::kAEnc:
      if (t.kind() != TermKind::kAEnc) return false;
      break;
    case Pattern::Kind::kSEnc:
      if (t.kind() != TermKind::kSEnc) return false;
      break;
  }
  return MatchInto(p.left(), t.left(), b) && MatchInto(p.right(), t.right(), b);
}

}  // namespace

std::optional<Bindings> Match(const Pattern& p, Term t, const Bindings& seed) {
  Bindings out = seed;
  if (!MatchInto(p, t, &out)) return std::nullopt;
  return out;
}

Pattern Substitute(const Pattern& p, const Bindings& b) {
  switch (p.kind()) {
    case Pattern::Kind::kLiteral:
      return p;
    case Pattern::Kind::kVar: {
      auto it = b.find(p.var_name());
      return it == b.end() ? p : Pattern(it->second);
    }
    case Pattern::Kind::kPair:
      return Pattern::Pair(Substitute(p.left(), b), Substitute(p.right(), b));
    case Pattern::Kind::kAEnc:
      return Pattern::AEnc(Substitute(p.left(), b), Substitute(p.right(), b));
    case Pattern::Kind::kSEnc:
      return Pattern::SEnc(Substitute(p.left(), b), Substitute(p.right(), b));
  }
  return p;
}

Term Instantiate(const Pattern& p, const Bindings& b) {
  Pattern s = Substitute(p, b);
  if (auto t = s.AsTerm()) return *t;
  std::set<std::string> vars;
  s.CollectVariables(&vars);
  throw TermError("unbound variable '" + *vars.begin() + "'");
}

}  // namespace owntrans
