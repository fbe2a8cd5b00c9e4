#include "ocran/codebook.hpp"

#include <cmath>

#include "ocran/error.hpp"
#include "ocran/random.hpp"

namespace ocran {

std::size_t CodebookEnsemble::codebook_size() const {
  const double bits = blocklength * rate_bits;
  if (bits > 24.0) throw CapacityError("codebook: n*R exceeds 24 bits");
  return static_cast<std::size_t>(std::ceil(std::exp2(bits) - 1e-9));
}

namespace {

void validate(const CodebookEnsemble& ens, std::size_t trials) {
  if (ens.blocklength < 1) throw ValidationError("codebook: blocklength must be positive");
  if (!(ens.rate_bits >= 0.0)) throw ValidationError("codebook: rate must be nonnegative");
  if (trials < 1) throw ValidationError("codebook: at least one trial is required");
  if (ens.input_pmf.empty() || ens.input_pmf[0].empty()) throw ValidationError("codebook: empty input pmf");
  const std::size_t alphabet = ens.input_pmf[0].size();
  for (const auto& row : ens.input_pmf) {
    if (row.size() != alphabet) throw ValidationError("codebook: input pmf rows differ in size");
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw ValidationError("codebook: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("codebook: input pmf row does not sum to 1");
  }
  if (static_cast<int>(ens.time_sequence.size()) != ens.blocklength) {
    throw ValidationError("codebook: time sequence length must equal the blocklength");
  }
  for (int q : ens.time_sequence) {
    if (q < 0 || q >= static_cast<int>(ens.input_pmf.size())) throw ValidationError("codebook: time symbol out of range");
  }
}

}  // namespace

CodebookMarginal sample_codebook_marginal(const CodebookEnsemble& ens, std::size_t trials) {
  validate(ens, trials);
  const auto n = static_cast<std::size_t>(ens.blocklength);
  const std::size_t alphabet = ens.input_pmf[0].size();
  const std::size_t words = ens.codebook_size();

  std::size_t tuples = 1;
  bool track_joint = true;
  for (std::size_t i = 0; i < n && track_joint; ++i) {
    if (tuples > 65536 / alphabet) track_joint = false;
    tuples *= alphabet;
  }

  CodebookMarginal out;
  out.codebook_size = words;
  out.trials = trials;
  out.empirical.assign(n, std::vector<double>(alphabet, 0.0));
  std::vector<double> joint_counts(track_joint ? tuples : 0, 0.0);

  Rng rng(ens.seed);
  std::vector<int> codebook(words * n);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t w = 0; w < words; ++w) {
      for (std::size_t i = 0; i < n; ++i) {
        codebook[w * n + i] = static_cast<int>(sample_index(ens.input_pmf[ens.time_sequence[i]], rng));
      }
    }
    const std::size_t message = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(words));
    std::size_t tuple = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int x = codebook[message * n + i];
      out.empirical[i][x] += 1.0;
      tuple = tuple * alphabet + static_cast<std::size_t>(x);
    }
    if (track_joint) joint_counts[tuple] += 1.0;
  }

  const double inv = 1.0 / static_cast<double>(trials);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& law = ens.input_pmf[ens.time_sequence[i]];
    double tv = 0.0;
    for (std::size_t x = 0; x < alphabet; ++x) {
      out.empirical[i][x] *= inv;
      tv += std::abs(out.empirical[i][x] - law[x]);
    }
    out.tv_per_position.push_back(0.5 * tv);
    out.max_tv = std::max(out.max_tv, 0.5 * tv);
  }
  if (track_joint) {
    double tv = 0.0;
    for (std::size_t tuple = 0; tuple < tuples; ++tuple) {
      double p = 1.0;
      std::size_t rest = tuple;
      for (std::size_t i = n; i-- > 0;) {
        p *= ens.input_pmf[ens.time_sequence[i]][rest % alphabet];
        rest /= alphabet;
      }
      tv += std::abs(joint_counts[tuple] * inv - p);
    }
    out.joint_tv = 0.5 * tv;
  }
  return out;
}

}  // namespace ocran
