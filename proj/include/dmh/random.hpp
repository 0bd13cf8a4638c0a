#pragma once

// Counter-based random streams.
//
// A RandomStream is a key. Every random quantity a chain consumes is addressed
// by (key, step, purpose) and read from a short-lived DrawStream seeded by a
// hash of that address. Two chains reading the same (step, purpose) see the
// same numbers, which is how common random numbers are realized, and adding
// or removing consumers of one purpose never shifts the draws of another.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace dmh {

namespace detail {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

enum class Purpose : std::uint64_t {
  general = 0,
  proposal = 1,
  accept = 2,
  prune = 3,
  coupling = 4,
  alt_proposal = 5,
};

/// Sequential generator for one address. Satisfies UniformRandomBitGenerator.
class DrawStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit DrawStream(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform on the open interval (0, 1).
  constexpr double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; always consumes exactly two draws.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n), n > 0. Lemire's nearly-divisionless method.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

class RandomStream {
 public:
  constexpr explicit RandomStream(std::uint64_t seed) : key_(detail::mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// Independent stream for replication `index`.
  [[nodiscard]] constexpr RandomStream substream(std::uint64_t index) const {
    RandomStream s(0);
    s.key_ = detail::mix64(key_ ^ detail::mix64(index * detail::kGolden + 0x3c6ef372fe94f82bULL));
    return s;
  }

  [[nodiscard]] constexpr DrawStream draws(std::uint64_t step, Purpose purpose) const {
    std::uint64_t h = detail::mix64(key_ + detail::mix64(step + 1) * detail::kGolden);
    h = detail::mix64(h ^ (static_cast<std::uint64_t>(purpose) * 0xa54ff53a5f1d36f1ULL));
    return DrawStream(h);
  }

  /// One long sequential stream for consumers that are not step-indexed.
  [[nodiscard]] constexpr DrawStream sequential() const { return draws(0, Purpose::general); }

  [[nodiscard]] constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

/// All draws available to one chain transition.
class StepDraws {
 public:
  constexpr StepDraws(const RandomStream& stream, std::uint64_t step) : stream_(stream), step_(step) {}

  [[nodiscard]] constexpr DrawStream proposal() const { return stream_.draws(step_, Purpose::proposal); }
  [[nodiscard]] constexpr DrawStream accept() const { return stream_.draws(step_, Purpose::accept); }
  [[nodiscard]] constexpr DrawStream prune() const { return stream_.draws(step_, Purpose::prune); }
  [[nodiscard]] constexpr DrawStream coupling() const { return stream_.draws(step_, Purpose::coupling); }
  [[nodiscard]] constexpr DrawStream alt_proposal() const { return stream_.draws(step_, Purpose::alt_proposal); }
  [[nodiscard]] constexpr std::uint64_t step() const { return step_; }

 private:
  RandomStream stream_;
  std::uint64_t step_;
};

}  // namespace dmh
