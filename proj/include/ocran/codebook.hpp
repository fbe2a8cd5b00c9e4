#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ocran {

// Random (n, R) codebook ensemble with entries drawn independently per
// position from p(x | q_i).
struct CodebookEnsemble {
  double rate_bits = 0.0;
  int blocklength = 1;
  std::vector<std::vector<double>> input_pmf;  // [q][x]
  std::vector<int> time_sequence;              // q_1..q_n
  std::uint64_t seed = 0;

  // ceil(2^{nR}); throws CapacityError when nR > 24.
  std::size_t codebook_size() const;
};

struct CodebookMarginal {
  std::vector<std::vector<double>> empirical;  // [i][x], per-position frequencies
  std::vector<double> tv_per_position;         // TV to p(x | q_i)
  double max_tv = 0.0;
  std::optional<double> joint_tv;  // TV of the n-tuple law to prod_i p(x|q_i), when |X|^n <= 65536
  std::size_t codebook_size = 0;
  std::size_t trials = 0;
};

// Per trial: draw a fresh codebook, pick a uniform message, record its codeword.
// Deterministic in ens.seed.
CodebookMarginal sample_codebook_marginal(const CodebookEnsemble& ens, std::size_t trials);

}  // namespace ocran
