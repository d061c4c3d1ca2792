#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace raildemand {

// Error with a stable category code. The CLI prints these as
// "error[<category>]: <message>" on stderr and exits nonzero.
class RdError : public std::runtime_error {
public:
  RdError(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}
  const std::string& category() const noexcept { return category_; }

private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw RdError(category, message);
}

// Self-contained 64-bit generator (splitmix64). All randomness in the
// project flows through this so results do not depend on the standard
// library's distribution implementations.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x, r;
    do {
      x = next();
      r = x % n;
    } while (x - r > std::uint64_t(0) - n);
    return r;
  }

  // Standard normal via Box-Muller; deterministic draw order.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Draws k distinct indices from [0, n), returned sorted ascending.
std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k,
                                                      SplitMix64& rng);

// Draws k indices from [0, n) with replacement, returned sorted ascending.
std::vector<std::uint32_t> sample_with_replacement(std::uint32_t n, std::uint32_t k,
                                                   SplitMix64& rng);

// FNV-1a over raw bytes; used for input/output fingerprints in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t hash_file(const std::string& path);
std::string hex64(std::uint64_t value);

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Work items are independent; callers own determinism by
// writing results into per-index slots.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Fixed-precision formatting (printf "%.*f"); deterministic across runs.
std::string format_fixed(double value, int decimals);
// Shortest-ish general formatting for report values ("%.12g").
std::string format_general(double value);

inline int effective_threads(int requested) {
  return requested;  // resolved in parallel_for; kept for readability at call sites
}

}  // namespace raildemand
