#pragma once

// Canonical exogenous values as bit strings: one block of bits per member
// mechanism of a c-component, one bit per configuration of the member's
// endogenous parents.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qmb/error.hpp"
#include "qmb/graph.hpp"
#include "qmb/node_set.hpp"

namespace qmb {

// Fixed-length bit string; position 0 is the first bit of the layout.
class BitString {
 public:
  BitString() = default;
  explicit BitString(int n) : size_(n), words_((n + 63) / 64, 0) {}

  static BitString from_index(std::uint64_t u, int n) {
    BitString b(n);
    if (n < 64 && (u >> n) != 0) {
      throw PreconditionError("index out of range for the bit layout");
    }
    if (n > 0) b.words_[0] = u;
    return b;
  }

  int size() const { return size_; }
  bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(int i, bool v) {
    std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }

  bool fits_index() const { return size_ <= 63; }
  std::uint64_t to_index() const {
    if (!fits_index()) throw SizeLimitError("bit string longer than 63 bits");
    return size_ == 0 ? 0 : words_[0];
  }

  // Bits in layout order, e.g. "01101".
  std::string str() const {
    std::string s(static_cast<std::size_t>(size_), '0');
    for (int i = 0; i < size_; ++i) {
      if (get(i)) s[i] = '1';
    }
    return s;
  }

  static BitString parse(const std::string& s) {
    BitString b(static_cast<int>(s.size()));
    for (int i = 0; i < b.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw InputError("bad bit string");
      b.set(i, s[i] == '1');
    }
    return b;
  }

  bool operator==(const BitString&) const = default;
  bool operator<(const BitString& o) const {
    if (size_ != o.size_) return size_ < o.size_;
    for (std::size_t w = words_.size(); w-- > 0;) {
      if (words_[w] != o.words_[w]) return words_[w] < o.words_[w];
    }
    return false;
  }

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Bit `offset` of block `block`, optionally negated. Blocks and offsets are
// 0-based; printed blocks are 1-based.
struct BitLiteral {
  int block = 0;
  int offset = 0;
  bool positive = true;

  bool operator==(const BitLiteral&) const = default;
  auto operator<=>(const BitLiteral&) const = default;
};

struct MechanismBlock {
  NodeId member = 0;
  std::string name;
  // Endogenous parents sorted by name; the last one is the least
  // significant bit of the configuration index.
  std::vector<NodeId> parents;
  int offset = 0;
  int width = 1;
};

class BitEncoding {
 public:
  BitEncoding() = default;

  // Blocks follow the member names in lexicographic order.
  BitEncoding(const CausalGraph& g, const CComponent& c)
      : members_(c.members), extended_(c.extended), exogenous_(c.exogenous) {
    int offset = 0;
    for (NodeId v : g.sorted_by_name(c.members)) {
      MechanismBlock b;
      b.member = v;
      b.name = g.name(v);
      b.parents = g.sorted_by_name(g.endogenous_parents(v));
      if (b.parents.size() > 20) {
        throw SizeLimitError("mechanism of '" + b.name +
                             "' has too many endogenous parents");
      }
      b.offset = offset;
      b.width = 1 << b.parents.size();
      offset += b.width;
      blocks_.push_back(std::move(b));
    }
    total_bits_ = offset;
  }

  int total_bits() const { return total_bits_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<MechanismBlock>& blocks() const { return blocks_; }
  const MechanismBlock& block(int i) const { return blocks_.at(i); }
  NodeSet members() const { return members_; }
  NodeSet extended() const { return extended_; }
  std::optional<NodeId> exogenous() const { return exogenous_; }

  // Number of canonical exogenous values; only when it fits in 64 bits.
  std::uint64_t cardinality() const {
    if (total_bits_ > 63) {
      throw SizeLimitError("exogenous cardinality exceeds 2^63");
    }
    return std::uint64_t{1} << total_bits_;
  }

  int block_of(NodeId member) const {
    for (int i = 0; i < num_blocks(); ++i) {
      if (blocks_[i].member == member) return i;
    }
    throw PreconditionError("node is not a member of the encoded component");
  }

  int position(const BitLiteral& lit) const {
    return blocks_.at(lit.block).offset + lit.offset;
  }

  // Configuration index of the block's parents under `a`.
  int configuration(int block, const Assignment& a) const {
    const MechanismBlock& b = blocks_.at(block);
    int j = 0;
    for (NodeId p : b.parents) {
      if (!a.vars.contains(p)) {
        throw PreconditionError("assignment misses a parent of '" + b.name +
                                "'");
      }
      j = (j << 1) | a.value(p);
    }
    return j;
  }

  // Literal stating "the mechanism of `member` outputs `value` under the
  // parent values in `a`".
  BitLiteral literal(NodeId member, const Assignment& a, int value) const {
    int b = block_of(member);
    return {b, configuration(b, a), value != 0};
  }

  // Human-readable literal, e.g. "b1_2" or "(1-b2_0)".
  std::string literal_name(const BitLiteral& lit) const {
    std::string s = "b" + std::to_string(lit.block + 1) + "_" +
                    std::to_string(lit.offset);
    return lit.positive ? s : "(1-" + s + ")";
  }

  bool operator==(const BitEncoding& o) const {
    if (total_bits_ != o.total_bits_ || blocks_.size() != o.blocks_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].name != o.blocks_[i].name ||
          blocks_[i].width != o.blocks_[i].width) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<MechanismBlock> blocks_;
  int total_bits_ = 0;
  NodeSet members_;
  NodeSet extended_;
  std::optional<NodeId> exogenous_;
};

inline BitEncoding build_encoding(const CausalGraph& g, const CComponent& c) {
  return BitEncoding(g, c);
}

inline bool literal_value(const BitEncoding& e, const BitString& u,
                          const BitLiteral& lit) {
  return u.get(e.position(lit)) == lit.positive;
}

// Output of `member`'s mechanism for exogenous value `u` when its parents
// take the values in `parents`.
inline int eval_mechanism(const BitEncoding& e, const BitString& u,
                          NodeId member, const Assignment& parents) {
  if (u.size() != e.total_bits()) {
    throw PreconditionError("bit string does not match the encoding");
  }
  int b = e.block_of(member);
  return u.get(e.block(b).offset + e.configuration(b, parents)) ? 1 : 0;
}

inline int eval_mechanism(const BitEncoding& e, std::uint64_t u,
                          NodeId member, const Assignment& parents) {
  if (u >= e.cardinality()) {
    throw PreconditionError("exogenous index out of range");
  }
  return eval_mechanism(e, BitString::from_index(u, e.total_bits()), member,
                        parents);
}

// Symbolic column entry a_{u,w} = prod(L+) * prod(1 - L-).
struct ColumnEntry {
  std::vector<BitLiteral> positive;
  std::vector<BitLiteral> negative;

  std::vector<BitLiteral> literals() const {
    std::vector<BitLiteral> all = positive;
    all.insert(all.end(), negative.begin(), negative.end());
    std::sort(all.begin(), all.end());
    return all;
  }
};

inline ColumnEntry symbolic_column_entry(const BitEncoding& e,
                                         const Assignment& w) {
  if (!e.extended().subset_of(w.vars)) {
    throw PreconditionError("assignment does not cover the component");
  }
  ColumnEntry out;
  for (int b = 0; b < e.num_blocks(); ++b) {
    const MechanismBlock& blk = e.block(b);
    BitLiteral lit{b, e.configuration(b, w), w.value(blk.member) == 1};
    (lit.positive ? out.positive : out.negative).push_back(lit);
  }
  return out;
}

inline int eval_entry(const BitEncoding& e, const ColumnEntry& entry,
                      const BitString& u) {
  for (const auto& l : entry.positive) {
    if (!u.get(e.position(l))) return 0;
  }
  for (const auto& l : entry.negative) {
    if (u.get(e.position(l))) return 0;
  }
  return 1;
}

// Bit-mask form of a literal product over exogenous indices that fit in a
// machine word: the product is 1 iff (u & mask) == want.
struct MaskedProduct {
  std::uint64_t mask = 0;
  std::uint64_t want = 0;

  bool eval(std::uint64_t u) const { return (u & mask) == want; }
};

inline MaskedProduct masked(const BitEncoding& e,
                            const std::vector<BitLiteral>& lits) {
  MaskedProduct m;
  for (const auto& l : lits) {
    std::uint64_t bit = std::uint64_t{1} << e.position(l);
    if ((m.mask & bit) && (((m.want & bit) != 0) != l.positive)) {
      // Contradictory literals: never satisfied.
      return {1, 0x2};
    }
    m.mask |= bit;
    if (l.positive) m.want |= bit;
  }
  return m;
}

}  // namespace qmb
