#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ocran {

// Bitmask over tensor axes.
using AxisSet = std::uint64_t;

inline constexpr AxisSet axis(int i) { return AxisSet{1} << i; }

// Dense probability tensor, row-major (last axis fastest), with axis labels.
// Immutable after construction.
class JointPmf {
 public:
  JointPmf() = default;

  // Throws ValidationError unless data is nonnegative and sums to 1 within 1e-10.
  JointPmf(std::vector<std::size_t> dims, std::vector<std::string> labels, std::vector<double> data);

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const double> data() const { return data_; }
  int rank() const { return static_cast<int>(dims_.size()); }
  std::size_t size() const { return data_.size(); }

  // Marginal pmf over the kept axes, row-major in increasing axis order.
  std::vector<double> marginal(AxisSet keep) const;

  // Tensor with only the kept axes.
  JointPmf marginalize(AxisSet keep) const;

  // Joint entropy of the kept axes in bits, using 0 log 0 = 0.
  double entropy(AxisSet keep) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::string> labels_;
  std::vector<double> data_;
};

// I(A;B|C) in bits. Throws ValidationError if the axis sets overlap.
// Values within 1e-12 below zero are clipped to 0.
double cmi(const JointPmf& joint, AxisSet a, AxisSet b, AxisSet c);

// Memoized entropies of one tensor. Not thread-safe: one instance per task.
class EntropyCache {
 public:
  explicit EntropyCache(const JointPmf& joint) : joint_(&joint) {}
  explicit EntropyCache(JointPmf&& joint) = delete;

  double entropy(AxisSet keep);
  double cmi(AxisSet a, AxisSet b, AxisSet c);
  const JointPmf& joint() const { return *joint_; }

 private:
  const JointPmf* joint_;
  std::unordered_map<AxisSet, double> cache_;
};

}  // namespace ocran
