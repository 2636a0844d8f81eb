#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "faqir/error.hpp"

namespace faqir {

// xoshiro256** (Blackman & Vigna), state expanded from a 64-bit seed with
// splitmix64. Every draw is defined on integers only, so sequences are
// identical on all platforms and in any language that follows the same steps.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound). Rejects draws below 2^64 mod bound.
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound == 0) throw validation_error("bounded(): bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

/// Fisher-Yates, walking from the last element down to index 1.
template <typename T>
void seeded_shuffle(std::vector<T>& items, Xoshiro256& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

/// Largest-remainder (Hamilton) apportionment of `total` over `weights`.
/// Leftover seats go to the largest fractional parts; ties to the lower index.
inline std::vector<std::size_t> apportion(std::size_t total,
                                          std::span<const double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw validation_error("apportion(): weights must be finite and non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw validation_error("apportion(): weights must sum to a positive value");

  std::vector<std::size_t> seats(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    const double whole = std::floor(exact);
    seats[i] = static_cast<std::size_t>(whole);
    remainder[i] = exact - whole;
    assigned += seats[i];
  }
  // Rounding in `exact` can overshoot by a seat at most in pathological inputs.
  while (assigned > total) {
    std::size_t victim = 0;
    for (std::size_t i = 1; i < seats.size(); ++i)
      if (seats[i] > 0 && (seats[victim] == 0 || remainder[i] < remainder[victim])) victim = i;
    --seats[victim];
    --assigned;
  }

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    if (weights[order[k]] > 0.0) {
      ++seats[order[k]];
      ++assigned;
    }
  }
  return seats;
}

}  // namespace faqir
