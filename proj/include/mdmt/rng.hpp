#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mdmt {

// Deterministic draw helpers layered on mt19937_64. All distributions are
// hand-rolled so that generated streams are identical across platforms and
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller, one spare cached.
  double gaussian();

  // Unbiased uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n);

  // First k entries of a Fisher-Yates pass over 0..n-1 (k distinct indices).
  std::vector<int> sample_without_replacement(int n, int k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed from (seed, purpose, index) so that
// runs differing only in one switch still share every unrelated stream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t purpose,
                       std::uint64_t index);

}  // namespace mdmt
