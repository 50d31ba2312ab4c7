#pragma once

#include <cstdint>
#include <string_view>

namespace netdiff::numerics {

// Splittable, reproducible random stream.  A (seed, stream) pair fully
// determines the draw sequence: the 256-bit xoshiro256++ state is derived
// from both words with SplitMix64, so streams with the same seed are
// decorrelated.  Normal draws use Box-Muller with a cached spare, keeping
// the sequence identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();
  double uniform(double lo, double hi);
  // Uniform integer on the inclusive range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal draw.
  double normal();

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t s_[4] = {};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// FNV-1a hash used to derive named parameter-init streams.
std::uint64_t stream_id(std::string_view name);

// Fixed stream ids for the pipeline loops; trajectory k uses
// kStreamTrajectoryBase + k.
inline constexpr std::uint64_t kStreamTrainLoop = 0x7261696e01ULL;
inline constexpr std::uint64_t kStreamSplit = 0x73706c697401ULL;
inline constexpr std::uint64_t kStreamSynthData = 0x73796e746801ULL;
inline constexpr std::uint64_t kStreamTrajectoryBase = 0x74726a0000000000ULL;

}  // namespace netdiff::numerics
