// SPDX-License-Identifier: Apache-2.0
#include "l0bnb/node.hpp"

#include <stdexcept>

namespace l0bnb {

Node::Node(int n) {
  if (n < 1) throw std::invalid_argument("node needs at least one index");
  status_.assign(static_cast<std::size_t>(n), EntryStatus::kFree);
}

EntryStatus Node::status(int i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("index out of range");
  return status_[static_cast<std::size_t>(i)];
}

std::vector<int> Node::fixed_zero() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(num_zero_));
  for (int i = 0; i < size(); ++i) {
    if (status_[static_cast<std::size_t>(i)] == EntryStatus::kZero) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<int> Node::fixed_one() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(num_one_));
  for (int i = 0; i < size(); ++i) {
    if (status_[static_cast<std::size_t>(i)] == EntryStatus::kOne) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<int> Node::free_indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(num_free()));
  for (int i = 0; i < size(); ++i) {
    if (status_[static_cast<std::size_t>(i)] == EntryStatus::kFree) {
      out.push_back(i);
    }
  }
  return out;
}

void Node::fix(int l, EntryStatus target) {
  if (status(l) != EntryStatus::kFree) {
    throw std::logic_error("index is already decided");
  }
  status_[static_cast<std::size_t>(l)] = target;
  if (target == EntryStatus::kZero) ++num_zero_;
  if (target == EntryStatus::kOne) ++num_one_;
}

Node child_zero(const Node& node, int l) {
  Node child = node;
  child.fix(l, EntryStatus::kZero);
  return child;
}

Node child_one(const Node& node, int l) {
  Node child = node;
  child.fix(l, EntryStatus::kOne);
  return child;
}

}  // namespace l0bnb
