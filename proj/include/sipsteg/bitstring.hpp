#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

#include "sipsteg/errors.hpp"

namespace sipsteg {

/// An ordered sequence of bits. This is the covert-payload currency of the
/// whole toolkit: every channel consumes and produces BitStrings, always in
/// big-endian order (the first bit is the most significant bit of the first
/// byte).
class BitString {
 public:
  BitString() = default;

  /// Bits of `bytes`, MSB first.
  static BitString from_bytes(std::span<const std::uint8_t> bytes) {
    BitString out;
    out.bits_.reserve(bytes.size() * 8);
    for (std::uint8_t byte : bytes) {
      for (int i = 7; i >= 0; --i) out.bits_.push_back((byte >> i) & 1u);
    }
    return out;
  }

  /// The low `width` bits of `value`, most significant first.
  static BitString from_uint(std::uint64_t value, unsigned width) {
    if (width > 64) throw IndexOutOfRange("bit width > 64");
    BitString out;
    out.bits_.reserve(width);
    for (unsigned i = 0; i < width; ++i) {
      out.bits_.push_back((value >> (width - 1 - i)) & 1u);
    }
    return out;
  }

  static BitString zeros(std::size_t n) {
    BitString out;
    out.bits_.assign(n, false);
    return out;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool at(std::size_t i) const {
    if (i >= bits_.size()) throw IndexOutOfRange("bit index past end");
    return bits_[i];
  }

  /// Reads past the end as zero. Embedding uses this so that short payloads
  /// are implicitly zero-padded into the carrier.
  bool bit_or_zero(std::size_t i) const {
    return i < bits_.size() ? static_cast<bool>(bits_[i]) : false;
  }

  void push_back(bool bit) { bits_.push_back(bit); }

  BitString& append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    return *this;
  }

  BitString slice(std::size_t pos, std::size_t len) const {
    if (pos + len > bits_.size()) throw IndexOutOfRange("slice past end");
    BitString out;
    out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                     bits_.begin() + static_cast<std::ptrdiff_t>(pos + len));
    return out;
  }

  /// `len` bits starting at `pos`, zero-padded where the string ends early.
  BitString slice_padded(std::size_t pos, std::size_t len) const {
    BitString out;
    out.bits_.reserve(len);
    for (std::size_t i = 0; i < len; ++i) out.bits_.push_back(bit_or_zero(pos + i));
    return out;
  }

  std::uint64_t read_uint(std::size_t pos, unsigned width) const {
    if (width > 64) throw IndexOutOfRange("bit width > 64");
    if (pos + width > bits_.size()) throw IndexOutOfRange("read past end");
    std::uint64_t value = 0;
    for (unsigned i = 0; i < width; ++i) value = (value << 1) | (bits_[pos + i] ? 1u : 0u);
    return value;
  }

  std::uint64_t read_uint_padded(std::size_t pos, unsigned width) const {
    if (width > 64) throw IndexOutOfRange("bit width > 64");
    std::uint64_t value = 0;
    for (unsigned i = 0; i < width; ++i) value = (value << 1) | (bit_or_zero(pos + i) ? 1u : 0u);
    return value;
  }

  /// Packs into bytes MSB-first; the final byte is zero-padded on the right.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
    }
    return out;
  }

  bool operator==(const BitString&) const = default;

 private:
  std::vector<bool> bits_;
};

inline constexpr std::size_t kFrameLengthBits = 16;

/// Prepends a 16-bit big-endian length (in bits), so a receiver walking a
/// multi-message schedule knows where the payload ends.
inline BitString frame_payload(const BitString& payload) {
  if (payload.size() >= (1u << kFrameLengthBits)) {
    throw PayloadTooLong("framed payload limited to 2^16-1 bits");
  }
  BitString out = BitString::from_uint(payload.size(), kFrameLengthBits);
  out.append(payload);
  return out;
}

/// Inverse of frame_payload. Trailing padding bits are ignored.
inline BitString deframe_payload(const BitString& stream) {
  if (stream.size() < kFrameLengthBits) {
    throw TruncatedStream("stream shorter than length prefix");
  }
  const std::uint64_t declared = stream.read_uint(0, kFrameLengthBits);
  if (kFrameLengthBits + declared > stream.size()) {
    throw TruncatedStream("stream shorter than declared payload length");
  }
  return stream.slice(kFrameLengthBits, declared);
}

}  // namespace sipsteg
