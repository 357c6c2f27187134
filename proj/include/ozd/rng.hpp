#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace ozd {

/// Philox4x32-10 block function (Salmon et al., SC'11).  Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.  The seed is the Philox key, the stream id
/// occupies the upper 64 bits of the counter and the draw index the lower 64,
/// so equal (seed, stream) pairs reproduce the same sequence everywhere.
///
/// Gaussian variates use the Box-Muller transform of two uniform draws; the
/// second variate of each pair is cached.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream.  Depends only on (seed, stream, child), not on
  /// how many values have been drawn from *this.
  RngStream split(std::uint64_t child) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index dim);
  /// Uniform on the unit sphere S^{dim-1} (normalized Gaussian).
  Eigen::VectorXd unit_sphere(Eigen::Index dim);
  /// Uniform in the unit ball: sphere point scaled by U^{1/dim}.
  Eigen::VectorXd unit_ball(Eigen::Index dim);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  std::optional<double> cached_normal_;
};

/// SplitMix64 finalizer, used for deriving child stream ids and hashing names.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a hash of a label, for deriving stable stream ids from method names.
std::uint64_t stream_id_for(std::string_view label);

}  // namespace ozd
