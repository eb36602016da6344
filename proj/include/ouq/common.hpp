#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ouq {

inline constexpr const char* kVersion = "0.1.0";

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid construction or argument (violated precondition).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// Mathematical domain violation during evaluation (log of non-positive,
/// division by zero, cos(theta) <= 0, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// Failure while evaluating a user-supplied function; carries the offending
/// point in the message.
class EvalError : public Error {
 public:
  explicit EvalError(const std::string& what) : Error(what) {}
};

namespace detail {

inline std::string format_point(const std::vector<double>& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(x[i]);
  }
  s += ")";
  return s;
}

}  // namespace detail

/// Positive part, (x)_+.
inline double pos(double x) { return x > 0.0 ? x : 0.0; }

/// Deterministic 64-bit PRNG (xoshiro-free: splitmix-seeded mt19937_64 gives
/// identical streams across standard library implementations only for the
/// engine itself, so uniforms are derived from raw engine output).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

 private:
  std::uint64_t state_;
};

}  // namespace ouq
