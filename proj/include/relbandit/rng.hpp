#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace relbandit {

// splitmix64 step; used to derive per-stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ b);
}

// Wrapper around mt19937_64 with fully specified draw primitives, so a run is
// reproducible bit-for-bit and tests can re-derive the exact draw sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); unbiased (Lemire with rejection).
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t r = gen_();
      const unsigned __int128 m = static_cast<unsigned __int128>(r) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<int>(static_cast<std::uint64_t>(m >> 64));
      }
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // +1 or -1 with equal probability.
  int rademacher() { return uniform_int(2) == 0 ? 1 : -1; }

  // Categorical draw by CDF scan; probs must be a (near-)normalized vector.
  int categorical(std::span<const double> probs) {
    const double u = uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

// Named per-run streams. Two runs with the same (master, run) seed share every
// stream, which gives common random numbers across learners and adversaries.
enum class StreamId : std::uint64_t {
  kContext = 1,
  kRollout = 2,
  kAction = 3,
  kEstimatorCoin = 4,
  kAdversary = 5,
};

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t run_seed, StreamId id) {
  return Rng(mix_seed(mix_seed(master_seed, run_seed), static_cast<std::uint64_t>(id)));
}

struct RunStreams {
  Rng context;
  Rng rollout;
  Rng action;
  Rng estimator;
  Rng adversary;

  RunStreams(std::uint64_t master_seed, std::uint64_t run_seed)
      : context(make_stream(master_seed, run_seed, StreamId::kContext)),
        rollout(make_stream(master_seed, run_seed, StreamId::kRollout)),
        action(make_stream(master_seed, run_seed, StreamId::kAction)),
        estimator(make_stream(master_seed, run_seed, StreamId::kEstimatorCoin)),
        adversary(make_stream(master_seed, run_seed, StreamId::kAdversary)) {}
};

}  // namespace relbandit
