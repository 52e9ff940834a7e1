#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace atypia {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit seed is the key; the stream index occupies the upper half of the
/// 128-bit counter, so distinct streams never overlap.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream_index);

  /// Block for the given position within the stream.
  Block operator()(std::uint64_t position) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
};

/// Reproducible source of uniforms and Gaussians keyed on (seed, stream_index).
///
/// Identical keys give bit-identical sequences. Streams are cheap to create,
/// so parallel workers each construct their own instead of sharing one.
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::uint64_t stream_index)
      : seed_(seed), stream_index_(stream_index), philox_(seed, stream_index) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Uniform in the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// X + iY with X, Y independent standard normals (Box-Muller on one Philox block).
  std::complex<double> complex_normal();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  Philox4x32 philox_;
  std::uint64_t position_ = 0;
  Philox4x32::Block block_{};
  int used_ = 4;  // 32-bit words consumed from block_
  bool has_spare_ = false;
  double spare_ = 0.0;

  std::uint64_t next_u64();
};

}  // namespace atypia
