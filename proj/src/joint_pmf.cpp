#include "ocran/joint_pmf.hpp"

#include <cmath>

#include "ocran/error.hpp"

namespace ocran {

JointPmf::JointPmf(std::vector<std::size_t> dims, std::vector<std::string> labels, std::vector<double> data)
    : dims_(std::move(dims)), labels_(std::move(labels)), data_(std::move(data)) {
  if (labels_.size() != dims_.size()) throw ValidationError("JointPmf: one label per axis required");
  if (dims_.size() > 64) throw CapacityError("JointPmf: at most 64 axes");
  std::size_t n = 1;
  for (auto d : dims_) {
    if (d == 0) throw ValidationError("JointPmf: axis of size zero");
    n *= d;
  }
  if (n != data_.size()) throw ValidationError("JointPmf: data size does not match dims");
  double total = 0.0;
  for (double p : data_) {
    if (!(p >= 0.0)) throw ValidationError("JointPmf: negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw ValidationError("JointPmf: probabilities do not sum to 1");
}

std::vector<double> JointPmf::marginal(AxisSet keep) const {
  const int r = rank();
  std::vector<std::size_t> mstride(static_cast<std::size_t>(r), 0);
  std::size_t msize = 1;
  for (int ax = r - 1; ax >= 0; --ax) {
    if ((keep >> ax) & 1u) {
      mstride[ax] = msize;
      msize *= dims_[ax];
    }
  }
  std::vector<double> out(msize, 0.0);
  if (msize == 1) {
    for (double p : data_) out[0] += p;
    return out;
  }
  // Trailing axes that are summed out form a contiguous inner block.
  int inner_end = r;
  std::size_t inner = 1;
  while (inner_end > 0 && !((keep >> (inner_end - 1)) & 1u)) {
    --inner_end;
    inner *= dims_[inner_end];
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(inner_end), 0);
  std::size_t mi = 0;
  for (std::size_t f = 0; f < data_.size(); f += inner) {
    double s = 0.0;
    for (std::size_t i = 0; i < inner; ++i) s += data_[f + i];
    out[mi] += s;
    for (int ax = inner_end - 1; ax >= 0; --ax) {
      ++idx[ax];
      mi += mstride[ax];
      if (idx[ax] < dims_[ax]) break;
      mi -= mstride[ax] * dims_[ax];
      idx[ax] = 0;
    }
  }
  return out;
}

JointPmf JointPmf::marginalize(AxisSet keep) const {
  std::vector<std::size_t> dims;
  std::vector<std::string> labels;
  for (int ax = 0; ax < rank(); ++ax) {
    if ((keep >> ax) & 1u) {
      dims.push_back(dims_[ax]);
      labels.push_back(labels_[ax]);
    }
  }
  auto m = marginal(keep);
  double total = 0.0;
  for (double p : m) total += p;
  for (double& p : m) p /= total;
  return JointPmf(std::move(dims), std::move(labels), std::move(m));
}

double JointPmf::entropy(AxisSet keep) const {
  if (keep == 0) return 0.0;
  double h = 0.0;
  for (double p : marginal(keep)) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

namespace {

void check_disjoint(AxisSet a, AxisSet b, AxisSet c) {
  if ((a & b) || (a & c) || (b & c)) throw ValidationError("cmi: axis sets must be disjoint");
}

// Rounding can leave information values a hair below zero.
double clip(double v) { return std::max(v, 0.0); }

}  // namespace

double cmi(const JointPmf& joint, AxisSet a, AxisSet b, AxisSet c) {
  check_disjoint(a, b, c);
  if (a == 0 || b == 0) return 0.0;
  double v = joint.entropy(a | c) + joint.entropy(b | c) - joint.entropy(a | b | c) - joint.entropy(c);
  return clip(v);
}

double EntropyCache::entropy(AxisSet keep) {
  auto it = cache_.find(keep);
  if (it != cache_.end()) return it->second;
  double h = joint_->entropy(keep);
  cache_.emplace(keep, h);
  return h;
}

double EntropyCache::cmi(AxisSet a, AxisSet b, AxisSet c) {
  check_disjoint(a, b, c);
  if (a == 0 || b == 0) return 0.0;
  return clip(entropy(a | c) + entropy(b | c) - entropy(a | b | c) - entropy(c));
}

}  // namespace ocran
