#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace ocran {

// Bitmask over users or relays; element 1 (index 0) is the least significant bit.
using Mask = std::uint32_t;

inline constexpr Mask full_mask(int n) { return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1; }
inline constexpr bool has(Mask m, int i) { return (m >> i) & 1u; }
inline constexpr int cardinality(Mask m) { return std::popcount(m); }

// A rate constraint index: sum of R_t over users T bounded using relay set S.
struct SubsetPair {
  Mask users = 0;
  Mask relays = 0;

  friend bool operator==(const SubsetPair&, const SubsetPair&) = default;
};

// All (T, S) with T nonempty, T by increasing bitmask, then S by increasing
// bitmask. Throws CapacityError when num_users + num_relays > 24.
std::vector<SubsetPair> enumerate_constraint_pairs(int num_users, int num_relays);

// Indices of the set bits, ascending.
std::vector<int> members(Mask m);

// "{1,3}" with 1-based labels.
std::string format_set(Mask m);

}  // namespace ocran
