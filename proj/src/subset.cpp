#include "ocran/subset.hpp"

#include "ocran/error.hpp"

namespace ocran {

std::vector<SubsetPair> enumerate_constraint_pairs(int num_users, int num_relays) {
  if (num_users < 1 || num_relays < 1) {
    throw ValidationError("enumerate_constraint_pairs: need at least one user and one relay");
  }
  if (num_users + num_relays > 24) {
    throw CapacityError("enumerate_constraint_pairs: users + relays = " +
                        std::to_string(num_users + num_relays) + " exceeds the limit of 24");
  }
  std::vector<SubsetPair> pairs;
  pairs.reserve(static_cast<std::size_t>(full_mask(num_users)) << num_relays);
  for (Mask t = 1; t <= full_mask(num_users); ++t) {
    for (Mask s = 0; s <= full_mask(num_relays); ++s) pairs.push_back({t, s});
  }
  return pairs;
}

std::vector<int> members(Mask m) {
  std::vector<int> out;
  for (int i = 0; m >> i; ++i) {
    if (has(m, i)) out.push_back(i);
  }
  return out;
}

std::string format_set(Mask m) {
  std::string s = "{";
  bool first = true;
  for (int i : members(m)) {
    if (!first) s += ',';
    s += std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

}  // namespace ocran
