#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <vector>

namespace qmb {

using NodeId = int;

// Maximum number of nodes (endogenous plus exogenous) in a graph.
inline constexpr int kMaxNodes = 64;

// Set of node ids backed by a 64-bit mask.
class NodeSet {
 public:
  class iterator {
   public:
    using value_type = NodeId;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::forward_iterator_tag;
    using pointer = void;
    using reference = NodeId;

    iterator() = default;
    explicit iterator(std::uint64_t rest) : rest_(rest) {}
    NodeId operator*() const { return std::countr_zero(rest_); }
    iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr NodeSet() = default;
  constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}
  NodeSet(std::initializer_list<NodeId> ids) {
    for (NodeId id : ids) insert(id);
  }

  static NodeSet single(NodeId id) { return NodeSet(std::uint64_t{1} << id); }
  // {0, ..., n-1}
  static NodeSet first(int n) {
    return NodeSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  bool contains(NodeId id) const { return (bits_ >> id) & 1U; }
  void insert(NodeId id) { bits_ |= std::uint64_t{1} << id; }
  void erase(NodeId id) { bits_ &= ~(std::uint64_t{1} << id); }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::uint64_t bits() const { return bits_; }

  bool intersects(NodeSet other) const { return (bits_ & other.bits_) != 0; }
  bool subset_of(NodeSet other) const { return (bits_ & ~other.bits_) == 0; }

  NodeSet operator|(NodeSet o) const { return NodeSet(bits_ | o.bits_); }
  NodeSet operator&(NodeSet o) const { return NodeSet(bits_ & o.bits_); }
  NodeSet operator-(NodeSet o) const { return NodeSet(bits_ & ~o.bits_); }
  NodeSet& operator|=(NodeSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  NodeSet& operator&=(NodeSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  NodeSet& operator-=(NodeSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }
  bool operator==(const NodeSet&) const = default;

  iterator begin() const { return iterator(bits_); }
  iterator end() const { return iterator(0); }

  std::vector<NodeId> ids() const { return {begin(), end()}; }

 private:
  std::uint64_t bits_ = 0;
};

// Partial assignment of binary values to a set of nodes. Bit `id` of
// `values` holds the value of node `id`; bits outside `vars` are zero.
struct Assignment {
  NodeSet vars;
  std::uint64_t values = 0;

  int value(NodeId id) const { return static_cast<int>((values >> id) & 1U); }

  void set(NodeId id, int v) {
    vars.insert(id);
    if (v != 0) {
      values |= std::uint64_t{1} << id;
    } else {
      values &= ~(std::uint64_t{1} << id);
    }
  }

  Assignment with(NodeId id, int v) const {
    Assignment a = *this;
    a.set(id, v);
    return a;
  }

  Assignment restricted(NodeSet keep) const {
    NodeSet k = vars & keep;
    return {k, values & k.bits()};
  }

  // True when both assign the same values to their shared variables.
  bool consistent_with(const Assignment& o) const {
    std::uint64_t shared = (vars & o.vars).bits();
    return (values & shared) == (o.values & shared);
  }

  // Union of two consistent assignments.
  Assignment merged(const Assignment& o) const {
    return {vars | o.vars, values | o.values};
  }

  bool operator==(const Assignment&) const = default;
};

// Calls `f(Assignment)` for every assignment of the nodes in `vars`, in
// increasing order of the packed value.
template <typename F>
void for_each_assignment(NodeSet vars, F&& f) {
  const std::uint64_t mask = vars.bits();
  std::uint64_t sub = 0;
  while (true) {
    f(Assignment{vars, sub});
    if (sub == mask) break;
    sub = (sub - mask) & mask;
  }
}

}  // namespace qmb
