#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ooc {

/// splitmix64 finalizer.  Used for seed whitening and stream derivation.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and a path of
/// indices.  Hash-chaining the path keeps streams for distinct
/// (level, trial, attempt) tuples from colliding.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

/// Deterministic random source.  std::mt19937_64 supplies raw bits; every
/// value transform is written out explicitly so that sequences are identical
/// across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller; the second deviate of each pair is
  /// cached, so draws come in a fixed sequence regardless of usage pattern.
  double normal();

  /// Uniform integer in {0, ..., bound-1}, rejection-debiased.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ooc
