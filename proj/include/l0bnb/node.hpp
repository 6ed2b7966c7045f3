// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace l0bnb {

enum class EntryStatus : std::uint8_t {
  kFree,  // no decision taken yet
  kZero,  // forced to zero
  kOne,   // forced nonzero
};

struct ScreeningResult;

/// A search-tree node: a partition of the variable indices into entries
/// forced to zero, forced nonzero, and still undecided. Stored as one status
/// per index, which keeps the three sets disjoint and exhaustive by
/// construction.
class Node {
 public:
  /// Root node: all indices undecided.
  explicit Node(int n);

  int size() const { return static_cast<int>(status_.size()); }
  EntryStatus status(int i) const;

  int num_zero() const { return num_zero_; }
  int num_one() const { return num_one_; }
  int num_free() const { return size() - num_zero_ - num_one_; }
  bool is_leaf() const { return num_free() == 0; }

  /// Materialized index sets, ascending.
  std::vector<int> fixed_zero() const;
  std::vector<int> fixed_one() const;
  std::vector<int> free_indices() const;

  bool operator==(const Node&) const = default;

 private:
  friend Node child_zero(const Node& node, int l);
  friend Node child_one(const Node& node, int l);
  friend Node apply_screening(const Node& node, const ScreeningResult& result);

  // Requires status(l) == kFree.
  void fix(int l, EntryStatus target);

  std::vector<EntryStatus> status_;
  int num_zero_ = 0;
  int num_one_ = 0;
};

/// Copy of `node` with undecided index l forced to zero. Throws if l is not
/// undecided.
Node child_zero(const Node& node, int l);

/// Copy of `node` with undecided index l forced nonzero. Throws if l is not
/// undecided.
Node child_one(const Node& node, int l);

}  // namespace l0bnb
