#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace hetbias {

// Deterministic random source. All randomness in the library flows
// through this class so that a (master seed, stream, index) triple pins
// every generated sequence across platforms and runs.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the
// standard. uniform01 and normal are implemented here, NOT via
// std::uniform_real_distribution / std::normal_distribution, because
// those adapters are implementation-defined and would break byte-stable
// golden files across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derive an independent generator for a named substream. Identical
  // (master, stream, index) triples always yield identical generators.
  static Rng derive(std::uint64_t master, std::uint64_t stream,
                    std::uint64_t index);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution: (next_u64() >> 11) * 2^-53.
  double uniform01();

  // Standard normal deviate via the Marsaglia polar method. Keeps one
  // cached spare, so draw order matters to reproducibility.
  double normal();

  // Vector of n standard normal deviates.
  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// splitmix64 step; used for seed derivation and exposed for tests.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace hetbias
