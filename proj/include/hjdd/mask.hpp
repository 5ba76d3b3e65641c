#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace hjdd {

/// Per-node membership of one approximate independent sub-domain.
struct SubdomainMask {
  int part = 0;
  std::vector<std::uint8_t> members;

  SubdomainMask() = default;
  SubdomainMask(int part_index, std::size_t n, bool value = false)
      : part(part_index), members(n, value ? 1 : 0) {}

  std::size_t size() const { return members.size(); }
  bool contains(std::size_t k) const { return members[k] != 0; }
  void insert(std::size_t k) { members[k] = 1; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(members.begin(), members.end(), std::uint8_t{1}));
  }
  bool operator==(const SubdomainMask&) const = default;
};

}  // namespace hjdd
