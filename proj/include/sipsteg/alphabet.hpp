#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "sipsteg/bitstring.hpp"
#include "sipsteg/errors.hpp"

namespace sipsteg {

/// A constrained output alphabet for text-valued carrier fields. Only
/// power-of-two sizes are useful (each symbol then carries an exact number
/// of bits and extraction is unambiguous), so bits_per_symbol is
/// floor(log2(|symbols|)) and only the first 2^bits_per_symbol symbols take
/// part in the bijection.
class Alphabet {
 public:
  Alphabet(std::string name, std::string symbols)
      : name_(std::move(name)), symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) throw AlphabetTooSmall("alphabet needs >= 2 symbols");
    bits_per_symbol_ = static_cast<unsigned>(std::bit_width(symbols_.size()) - 1);
    lookup_.fill(-1);
    for (std::size_t i = 0; i < (std::size_t{1} << bits_per_symbol_); ++i) {
      lookup_[static_cast<unsigned char>(symbols_[i])] = static_cast<int>(i);
    }
  }

  const std::string& name() const { return name_; }
  unsigned bits_per_symbol() const { return bits_per_symbol_; }

  char symbol(std::uint64_t index) const { return symbols_.at(index); }

  bool contains(char c) const { return lookup_[static_cast<unsigned char>(c)] >= 0; }

  unsigned index_of(char c) const {
    const int idx = lookup_[static_cast<unsigned char>(c)];
    if (idx < 0) {
      throw SymbolNotInAlphabet("'" + std::string(1, c) + "' not in alphabet " + name_);
    }
    return static_cast<unsigned>(idx);
  }

  /// Lowercase hexadecimal, 4 bits per character.
  static const Alphabet& hex() {
    static const Alphabet a("hex", "0123456789abcdef");
    return a;
  }

  /// 64 characters legal in SIP token grammar, 6 bits per character.
  static const Alphabet& token64() {
    static const Alphabet a(
        "token64",
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-.");
    return a;
  }

 private:
  std::string name_;
  std::string symbols_;
  unsigned bits_per_symbol_ = 0;
  std::array<int, 256> lookup_{};
};

/// Renders the first n_chars * bits_per_symbol payload bits as text, zero
/// padding on the right when the payload is shorter.
inline std::string encode_text(const BitString& payload, const Alphabet& alphabet,
                               std::size_t n_chars) {
  std::string out;
  out.reserve(n_chars);
  const unsigned bps = alphabet.bits_per_symbol();
  for (std::size_t i = 0; i < n_chars; ++i) {
    out.push_back(alphabet.symbol(payload.read_uint_padded(i * bps, bps)));
  }
  return out;
}

/// Inverse of encode_text over the same alphabet.
inline BitString decode_text(std::string_view s, const Alphabet& alphabet) {
  BitString out;
  const unsigned bps = alphabet.bits_per_symbol();
  for (char c : s) {
    out.append(BitString::from_uint(alphabet.index_of(c), bps));
  }
  return out;
}

/// How many payload bits an n-digit decimal field carries. floor(n*log2(10)),
/// capped at 32 so the rendered value always fits a 32-bit integer (the shape
/// session identifiers take in the wild).
inline unsigned decimal_payload_bits(std::size_t n_digits) {
  std::uint64_t pow10 = 1;
  unsigned bits = 0;
  for (std::size_t i = 0; i < n_digits && bits < 32; ++i) {
    if (pow10 > UINT64_MAX / 10) break;
    pow10 *= 10;
    bits = static_cast<unsigned>(std::bit_width(pow10) - 1);
  }
  return bits > 32 ? 32u : bits;
}

/// Zero-padded decimal rendering of `value` in exactly `n_digits` digits.
inline std::string decimal_render(std::uint64_t value, std::size_t n_digits) {
  std::string digits = std::to_string(value);
  if (digits.size() < n_digits) {
    digits.insert(0, n_digits - digits.size(), '0');
  }
  return digits;
}

/// Parses a decimal token that must fit in `bits` bits.
inline std::uint64_t decimal_parse(std::string_view token, unsigned bits) {
  if (token.empty()) throw SymbolNotInAlphabet("empty decimal field");
  std::uint64_t value = 0;
  for (char c : token) {
    if (c < '0' || c > '9') throw SymbolNotInAlphabet("non-digit in decimal field");
    if (value > (UINT64_MAX - 9) / 10) throw SymbolNotInAlphabet("decimal field overflow");
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (bits < 64 && value >= (std::uint64_t{1} << bits)) {
    throw SymbolNotInAlphabet("decimal field out of range for channel");
  }
  return value;
}

}  // namespace sipsteg
