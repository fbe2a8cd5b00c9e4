#include "ocran/discrete.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ocran/error.hpp"
#include "ocran/parallel.hpp"

namespace ocran {

namespace {

constexpr double kNormTol = 1e-12;

void check_pmf_rows(std::span<const double> v, std::size_t row, const std::string& field) {
  if (row == 0 || v.size() % row != 0) throw ValidationError(field + ": table has the wrong size");
  for (std::size_t r = 0; r < v.size(); r += row) {
    double total = 0.0;
    for (std::size_t i = 0; i < row; ++i) {
      if (!(v[r + i] >= 0.0)) throw ValidationError(field + ": negative or NaN probability");
      total += v[r + i];
    }
    if (std::abs(total - 1.0) > kNormTol) throw ValidationError(field + ": row does not sum to 1");
  }
}

// Product of sizes, or nullopt once it exceeds `limit`.
std::optional<std::size_t> bounded_product(std::span<const int> sizes, std::size_t start, std::size_t limit) {
  std::size_t n = start;
  for (int s : sizes) {
    if (s <= 0) return std::nullopt;
    if (n > limit / static_cast<std::size_t>(s)) return std::nullopt;
    n *= static_cast<std::size_t>(s);
  }
  return n;
}

// Mixed-radix digits of a row-major tuple index (last position fastest).
void decode(std::size_t index, std::span<const int> sizes, std::vector<int>& digits) {
  digits.resize(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    digits[i] = static_cast<int>(index % static_cast<std::size_t>(sizes[i]));
    index /= static_cast<std::size_t>(sizes[i]);
  }
}

double input_prob(const DiscreteScenario& sc, int q, std::span<const int> x) {
  double p = 1.0;
  for (int l = 0; l < sc.num_users(); ++l) {
    p *= sc.input_pmf[l][static_cast<std::size_t>(q) * sc.input_sizes[l] + x[l]];
  }
  return p;
}

std::vector<std::string> cran_labels(int users, int relays) {
  std::vector<std::string> labels{"Q"};
  for (int l = 0; l < users; ++l) labels.push_back("X" + std::to_string(l + 1));
  for (int k = 0; k < relays; ++k) labels.push_back("Y" + std::to_string(k + 1));
  for (int k = 0; k < relays; ++k) labels.push_back("U" + std::to_string(k + 1));
  return labels;
}

std::size_t guarded_joint_size(const DiscreteScenario& sc, std::span<const int> u_sizes) {
  auto n = bounded_product(sc.input_sizes, static_cast<std::size_t>(sc.num_q()), kMaxJointEntries);
  if (n) n = bounded_product(sc.output_sizes, *n, kMaxJointEntries);
  if (n) n = bounded_product(u_sizes, *n, kMaxJointEntries);
  if (!n) throw CapacityError("joint pmf would exceed 1e7 entries");
  return *n;
}

// Fills the tensor given, for each (q, y tuple), the pmf over U tuples.
template <typename UFactor>
JointPmf assemble_joint(const DiscreteScenario& sc, std::span<const int> u_sizes, UFactor u_factor) {
  const std::size_t total = guarded_joint_size(sc, u_sizes);
  const std::size_t xt = sc.input_tuples();
  const std::size_t yt = sc.output_tuples();
  const std::size_t ut = total / (static_cast<std::size_t>(sc.num_q()) * xt * yt);
  std::vector<double> data(total, 0.0);
  std::vector<int> x_digits;
  std::vector<int> y_digits;
  std::vector<double> uvec(ut);
  for (int q = 0; q < sc.num_q(); ++q) {
    for (std::size_t yi = 0; yi < yt; ++yi) {
      decode(yi, sc.output_sizes, y_digits);
      u_factor(q, y_digits, uvec);
      for (std::size_t xi = 0; xi < xt; ++xi) {
        decode(xi, sc.input_sizes, x_digits);
        double w = sc.time_share[q] * input_prob(sc, q, x_digits) * sc.channel[xi * yt + yi];
        if (w == 0.0) continue;
        double* out = data.data() + ((q * xt + xi) * yt + yi) * ut;
        for (std::size_t ui = 0; ui < ut; ++ui) out[ui] = w * uvec[ui];
      }
    }
  }
  std::vector<std::size_t> dims{static_cast<std::size_t>(sc.num_q())};
  for (int s : sc.input_sizes) dims.push_back(static_cast<std::size_t>(s));
  for (int s : sc.output_sizes) dims.push_back(static_cast<std::size_t>(s));
  for (int s : u_sizes) dims.push_back(static_cast<std::size_t>(s));
  return JointPmf(std::move(dims), cran_labels(sc.num_users(), sc.num_relays()), std::move(data));
}

}  // namespace

std::size_t DiscreteScenario::input_tuples() const {
  std::size_t n = 1;
  for (int s : input_sizes) n *= static_cast<std::size_t>(s);
  return n;
}

std::size_t DiscreteScenario::output_tuples() const {
  std::size_t n = 1;
  for (int s : output_sizes) n *= static_cast<std::size_t>(s);
  return n;
}

void DiscreteScenario::validate() const {
  if (num_users() < 1) throw ValidationError("users: at least one user is required");
  if (num_relays() < 1) throw ValidationError("relays: at least one relay is required");
  if (num_q() < 1) throw ValidationError("time_share: at least one time-sharing symbol is required");
  check_pmf_rows(time_share, time_share.size(), "time_share");
  if (static_cast<int>(fronthaul.size()) != num_relays()) throw ValidationError("fronthaul: expected one entry per relay");
  for (double c : fronthaul) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("fronthaul: capacities must be finite and nonnegative");
  }
  for (int s : input_sizes) {
    if (s < 1) throw ValidationError("alphabets.X: sizes must be positive");
  }
  for (int s : output_sizes) {
    if (s < 1) throw ValidationError("alphabets.Y: sizes must be positive");
  }
  if (static_cast<int>(input_pmf.size()) != num_users()) throw ValidationError("px: expected one table per user");
  for (int l = 0; l < num_users(); ++l) {
    if (input_pmf[l].size() != static_cast<std::size_t>(num_q()) * input_sizes[l]) {
      throw ValidationError("px: table of user " + std::to_string(l + 1) + " has the wrong size");
    }
    check_pmf_rows(input_pmf[l], static_cast<std::size_t>(input_sizes[l]), "px[" + std::to_string(l) + "]");
  }
  auto rows = bounded_product(input_sizes, 1, kMaxJointEntries);
  auto total = rows ? bounded_product(output_sizes, *rows, kMaxJointEntries) : std::nullopt;
  if (!total) throw CapacityError("channel: tensor exceeds 1e7 entries");
  if (channel.size() != *total) throw ValidationError("channel: tensor has the wrong size");
  check_pmf_rows(channel, output_tuples(), "channel");
}

void validate_aux(const DiscreteScenario& sc, const AuxChannels& aux) {
  if (static_cast<int>(aux.sizes.size()) != sc.num_relays() || static_cast<int>(aux.table.size()) != sc.num_relays()) {
    throw ValidationError("aux: expected one table per relay");
  }
  for (int k = 0; k < sc.num_relays(); ++k) {
    if (aux.sizes[k] < 1) throw ValidationError("aux: |U_" + std::to_string(k + 1) + "| must be at least 1");
    if (aux.table[k].size() != static_cast<std::size_t>(sc.num_q()) * sc.output_sizes[k] * aux.sizes[k]) {
      throw ValidationError("aux: table of relay " + std::to_string(k + 1) + " has the wrong size");
    }
    check_pmf_rows(aux.table[k], static_cast<std::size_t>(aux.sizes[k]), "aux[" + std::to_string(k) + "]");
  }
}

void validate_witness(const DiscreteScenario& sc, const OuterBoundWitness& witness) {
  if (witness.w_size < 1) throw ValidationError("witness: |W| must be at least 1");
  if (witness.pw.size() != static_cast<std::size_t>(sc.num_q()) * witness.w_size) {
    throw ValidationError("witness: p(w|q) has the wrong size");
  }
  check_pmf_rows(witness.pw, static_cast<std::size_t>(witness.w_size), "witness.pw");
  if (static_cast<int>(witness.u_sizes.size()) != sc.num_relays() ||
      static_cast<int>(witness.map.size()) != sc.num_relays()) {
    throw ValidationError("witness: expected one map per relay");
  }
  for (int k = 0; k < sc.num_relays(); ++k) {
    if (witness.map[k].size() != static_cast<std::size_t>(sc.num_q()) * witness.w_size * sc.output_sizes[k]) {
      throw ValidationError("witness: map of relay " + std::to_string(k + 1) + " is not total");
    }
    for (int u : witness.map[k]) {
      if (u < 0 || u >= witness.u_sizes[k]) {
        throw ValidationError("witness: map of relay " + std::to_string(k + 1) + " leaves its alphabet");
      }
    }
  }
}

AxisSet CranLayout::x(Mask m) const {
  AxisSet s = 0;
  for (int l : members(m)) s |= axis(x_axis(l));
  return s;
}

AxisSet CranLayout::y(Mask m) const {
  AxisSet s = 0;
  for (int k : members(m)) s |= axis(y_axis(k));
  return s;
}

AxisSet CranLayout::u(Mask m) const {
  AxisSet s = 0;
  for (int k : members(m)) s |= axis(u_axis(k));
  return s;
}

double factorization_deviation(const DiscreteScenario& sc) {
  const std::size_t xt = sc.input_tuples();
  const std::size_t yt = sc.output_tuples();
  const int relays = sc.num_relays();
  std::vector<int> y_digits;
  double worst = 0.0;
  for (std::size_t xi = 0; xi < xt; ++xi) {
    const double* row = sc.channel.data() + xi * yt;
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(relays));
    for (int k = 0; k < relays; ++k) marg[k].assign(static_cast<std::size_t>(sc.output_sizes[k]), 0.0);
    for (std::size_t yi = 0; yi < yt; ++yi) {
      decode(yi, sc.output_sizes, y_digits);
      for (int k = 0; k < relays; ++k) marg[k][y_digits[k]] += row[yi];
    }
    for (std::size_t yi = 0; yi < yt; ++yi) {
      decode(yi, sc.output_sizes, y_digits);
      double prod = 1.0;
      for (int k = 0; k < relays; ++k) prod *= marg[k][y_digits[k]];
      worst = std::max(worst, std::abs(row[yi] - prod));
    }
  }
  return worst;
}

bool check_conditional_independence(const DiscreteScenario& sc, double tol) {
  return factorization_deviation(sc) <= tol;
}

JointPmf build_joint(const DiscreteScenario& sc, const AuxChannels& aux) {
  validate_aux(sc, aux);
  return assemble_joint(sc, aux.sizes, [&](int q, std::span<const int> y, std::vector<double>& uvec) {
    std::vector<int> u_digits;
    for (std::size_t ui = 0; ui < uvec.size(); ++ui) {
      decode(ui, aux.sizes, u_digits);
      double p = 1.0;
      for (int k = 0; k < sc.num_relays() && p != 0.0; ++k) p *= aux.prob(sc, k, q, y[k], u_digits[k]);
      uvec[ui] = p;
    }
  });
}

JointPmf build_joint(const DiscreteScenario& sc, const OuterBoundWitness& witness) {
  validate_witness(sc, witness);
  std::vector<std::size_t> stride(static_cast<std::size_t>(sc.num_relays()));
  std::size_t acc = 1;
  for (int k = sc.num_relays() - 1; k >= 0; --k) {
    stride[k] = acc;
    acc *= static_cast<std::size_t>(witness.u_sizes[k]);
  }
  return assemble_joint(sc, witness.u_sizes, [&](int q, std::span<const int> y, std::vector<double>& uvec) {
    std::fill(uvec.begin(), uvec.end(), 0.0);
    for (int w = 0; w < witness.w_size; ++w) {
      std::size_t ui = 0;
      for (int k = 0; k < sc.num_relays(); ++k) ui += stride[k] * witness.apply(sc, k, w, y[k], q);
      uvec[ui] += witness.pw[static_cast<std::size_t>(q) * witness.w_size + w];
    }
  });
}

OuterBoundWitness witness_from_aux(const DiscreteScenario& sc, const AuxChannels& aux) {
  validate_aux(sc, aux);
  // One digit per (k, y): digits ordered k-major, y-minor, last fastest.
  std::vector<int> radix;
  for (int k = 0; k < sc.num_relays(); ++k) {
    for (int y = 0; y < sc.output_sizes[k]; ++y) radix.push_back(aux.sizes[k]);
  }
  auto w_count = bounded_product(radix, 1, 1'000'000);
  if (!w_count) throw CapacityError("witness_from_aux: |W| would exceed 1e6");
  OuterBoundWitness out;
  out.w_size = static_cast<int>(*w_count);
  out.u_sizes = aux.sizes;
  out.pw.assign(static_cast<std::size_t>(sc.num_q()) * out.w_size, 0.0);
  out.map.resize(static_cast<std::size_t>(sc.num_relays()));
  for (int k = 0; k < sc.num_relays(); ++k) {
    out.map[k].assign(static_cast<std::size_t>(sc.num_q()) * out.w_size * sc.output_sizes[k], 0);
  }
  std::vector<int> digits;
  for (int w = 0; w < out.w_size; ++w) {
    decode(static_cast<std::size_t>(w), radix, digits);
    for (int q = 0; q < sc.num_q(); ++q) {
      double p = 1.0;
      std::size_t d = 0;
      for (int k = 0; k < sc.num_relays(); ++k) {
        for (int y = 0; y < sc.output_sizes[k]; ++y, ++d) {
          p *= aux.prob(sc, k, q, y, digits[d]);
          out.map[k][(static_cast<std::size_t>(q) * out.w_size + w) * sc.output_sizes[k] + y] = digits[d];
        }
      }
      out.pw[static_cast<std::size_t>(q) * out.w_size + w] = p;
    }
  }
  return out;
}

AuxChannels aux_from_witness(const DiscreteScenario& sc, const OuterBoundWitness& witness) {
  validate_witness(sc, witness);
  AuxChannels aux;
  aux.sizes = witness.u_sizes;
  aux.table.resize(static_cast<std::size_t>(sc.num_relays()));
  for (int k = 0; k < sc.num_relays(); ++k) {
    const auto ys = static_cast<std::size_t>(sc.output_sizes[k]);
    const auto us = static_cast<std::size_t>(aux.sizes[k]);
    aux.table[k].assign(static_cast<std::size_t>(sc.num_q()) * ys * us, 0.0);
    for (int q = 0; q < sc.num_q(); ++q) {
      for (int w = 0; w < witness.w_size; ++w) {
        double pw = witness.pw[static_cast<std::size_t>(q) * witness.w_size + w];
        for (std::size_t y = 0; y < ys; ++y) {
          int u = witness.apply(sc, k, w, static_cast<int>(y), q);
          aux.table[k][(q * ys + y) * us + static_cast<std::size_t>(u)] += pw;
        }
      }
    }
  }
  return aux;
}

DiscreteEvaluator::DiscreteEvaluator(const DiscreteScenario& sc, const JointPmf& joint)
    : sc_(&sc), layout_{sc.num_users(), sc.num_relays()}, cache_(joint) {}

double DiscreteEvaluator::ci(SubsetPair pair) {
  const auto& lay = layout_;
  const Mask all_relays = full_mask(lay.relays);
  const Mask all_users = full_mask(lay.users);
  double value = 0.0;
  for (int s : members(pair.relays)) {
    value += sc_->fronthaul[s] - info(lay.y(Mask{1} << s), lay.u(Mask{1} << s), lay.all_x() | lay.q());
  }
  const Mask rest = all_relays & ~pair.relays;
  value += info(lay.x(pair.users), lay.u(rest), lay.x(all_users & ~pair.users) | lay.q());
  return value;
}

double DiscreteEvaluator::inner(SubsetPair pair) {
  const auto& lay = layout_;
  const Mask all_relays = full_mask(lay.relays);
  const Mask all_users = full_mask(lay.users);
  const Mask rest = all_relays & ~pair.relays;
  double value = 0.0;
  for (int s : members(pair.relays)) value += sc_->fronthaul[s];
  value -= info(lay.y(pair.relays), lay.u(pair.relays), lay.all_x() | lay.u(rest) | lay.q());
  value += info(lay.x(pair.users), lay.u(rest), lay.x(all_users & ~pair.users) | lay.q());
  return value;
}

double ci_constraint(const DiscreteScenario& sc, const AuxChannels& aux, SubsetPair pair) {
  JointPmf joint = build_joint(sc, aux);
  return DiscreteEvaluator(sc, joint).ci(pair);
}

double inner_constraint(const DiscreteScenario& sc, const AuxChannels& aux, SubsetPair pair) {
  JointPmf joint = build_joint(sc, aux);
  return DiscreteEvaluator(sc, joint).inner(pair);
}

double outer_constraint(const DiscreteScenario& sc, const OuterBoundWitness& witness, SubsetPair pair) {
  JointPmf joint = build_joint(sc, witness);
  return DiscreteEvaluator(sc, joint).inner(pair);
}

namespace {

RateRegion evaluate_region(const DiscreteScenario& sc, const JointPmf& joint, InnerBound which, int threads) {
  RateRegion region;
  region.num_users = sc.num_users();
  region.num_relays = sc.num_relays();
  auto pairs = enumerate_constraint_pairs(sc.num_users(), sc.num_relays());
  region.constraints.resize(pairs.size());
  auto eval = [&](DiscreteEvaluator& ev, SubsetPair p) { return which == InnerBound::ci ? ev.ci(p) : ev.inner(p); };
  if (resolve_threads(threads) <= 1) {
    DiscreteEvaluator ev(sc, joint);
    for (std::size_t i = 0; i < pairs.size(); ++i) region.constraints[i] = {pairs[i], eval(ev, pairs[i])};
  } else {
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
      DiscreteEvaluator ev(sc, joint);
      region.constraints[i] = {pairs[i], eval(ev, pairs[i])};
    });
  }
  return region;
}

}  // namespace

RateRegion region_discrete(const DiscreteScenario& sc, const AuxChannels& aux, InnerBound which, int threads) {
  JointPmf joint = build_joint(sc, aux);
  RateRegion region = evaluate_region(sc, joint, which, threads);
  if (which == InnerBound::ci) {
    double dev = factorization_deviation(sc);
    if (dev > 1e-9) {
      region.warnings.push_back("channel outputs are not conditionally independent given the inputs (max deviation " +
                                std::to_string(dev) + "); the conditionally independent bound is not the capacity region here");
    }
  }
  return region;
}

RateRegion region_outer(const DiscreteScenario& sc, const OuterBoundWitness& witness, int threads) {
  JointPmf joint = build_joint(sc, witness);
  return evaluate_region(sc, joint, InnerBound::general, threads);
}

}  // namespace ocran
