#pragma once

#include <array>
#include <cstdint>

namespace cmplq {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3", SC'11). Maps a 128-bit counter and a 64-bit key to
/// 128 random bits. The algorithm is fixed: changing it changes every
/// stored seed's meaning.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// A reproducible random stream identified by (seed, stream_id).
///
/// Block b of the stream is philox4x32_10({b_lo, b_hi, id_lo, id_hi},
/// {seed_lo, seed_hi}). Each block yields four 32-bit words; doubles take
/// the top 53 bits of two consecutive words. Since blocks are addressed
/// directly, any block range can be produced out of order (and in
/// parallel) with bit-identical results.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  /// Index of the next unconsumed block.
  std::uint64_t block_position() const { return block_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal (Box-Muller on one fresh block).
  double normal();
  /// Uniform integer on [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Drops any partially consumed block and returns the index of the
  /// first block of a reserved range of `n_blocks`.
  std::uint64_t reserve_blocks(std::uint64_t n_blocks);

  /// Independent stream sharing this seed, keyed by (this stream, tag).
  RngStream substream(std::uint64_t tag) const;
  RngStream substream(std::uint64_t tag, std::uint64_t index) const;

  /// Raw block access; does not advance the stream.
  PhiloxCounter block(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
};

/// Top 53 bits of (hi:lo) as a double on [0, 1).
inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Two standard normals from one Philox block (Box-Muller).
std::array<double, 2> block_to_normals(const PhiloxCounter& block);
/// Two uniforms on [0, 1) from one Philox block.
std::array<double, 2> block_to_uniforms(const PhiloxCounter& block);

/// SplitMix64 finalizer; used to derive substream ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace cmplq
