#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ocran {

// The single generator used by every stochastic operation.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `stream` derived from `master`: splitmix64(master + stream).
// Used for per-restart, per-instance and per-weight streams.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

// Uniform on [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng);

// Index drawn from a (normalized) pmf by inversion.
std::size_t sample_index(std::span<const double> pmf, Rng& rng);

std::vector<double> dirichlet(std::size_t n, double concentration, Rng& rng);

// Circularly-symmetric complex normal with unit total variance.
std::complex<double> complex_normal(Rng& rng);

}  // namespace ocran
