#ifndef BAP_RANDOM_H_
#define BAP_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace bap {

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Key derivation for per-subsystem streams:
//   DeriveSeed(seed, tag, k) = Mix64(Mix64(seed ^ Fnv1a(tag)) + k)
// so a stream depends only on (master seed, subsystem tag, index).
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view tag,
                         std::int64_t index = 0);

// Portable random source: std::mt19937_64 has a fixed output sequence on
// every platform; the distributions below are implemented here because the
// standard library's are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform integer in [lo, hi], unbiased (rejection sampling).
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  // Uniform index in [0, n).
  std::size_t Index(std::size_t n) {
    return static_cast<std::size_t>(UniformInt(0, static_cast<std::int64_t>(n) - 1));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double UniformReal() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return UniformReal() < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t k = Index(i);
      using std::swap;
      swap(items[i - 1], items[k]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bap

#endif  // BAP_RANDOM_H_
