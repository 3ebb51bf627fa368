#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sipsteg/errors.hpp"

namespace sipsteg {

inline constexpr std::string_view kBase64Symbols =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) |
                            (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
    out.push_back(kBase64Symbols[(v >> 18) & 63]);
    out.push_back(kBase64Symbols[(v >> 12) & 63]);
    out.push_back(kBase64Symbols[(v >> 6) & 63]);
    out.push_back(kBase64Symbols[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = std::uint32_t{bytes[i]} << 16;
    out.push_back(kBase64Symbols[(v >> 18) & 63]);
    out.push_back(kBase64Symbols[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) |
                            (std::uint32_t{bytes[i + 1]} << 8);
    out.push_back(kBase64Symbols[(v >> 18) & 63]);
    out.push_back(kBase64Symbols[(v >> 12) & 63]);
    out.push_back(kBase64Symbols[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

/// Lenient decoder: whitespace is skipped and a missing final padding group
/// is tolerated, since signature blobs arrive wrapped across lines.
inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
  static const auto lookup = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kBase64Symbols[i])] = i;
    return t;
  }();

  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int have = 0;
  for (char c : text) {
    if (c == '\r' || c == '\n' || c == ' ' || c == '\t') continue;
    if (c == '=') break;
    const int v = lookup[static_cast<unsigned char>(c)];
    if (v < 0) throw SymbolNotInAlphabet("invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    if (++have == 4) {
      out.push_back(static_cast<std::uint8_t>(acc >> 16));
      out.push_back(static_cast<std::uint8_t>(acc >> 8));
      out.push_back(static_cast<std::uint8_t>(acc));
      acc = 0;
      have = 0;
    }
  }
  if (have == 2) {
    out.push_back(static_cast<std::uint8_t>(acc >> 4));
  } else if (have == 3) {
    acc <<= 6;
    out.push_back(static_cast<std::uint8_t>(acc >> 16));
    out.push_back(static_cast<std::uint8_t>(acc >> 8));
  } else if (have == 1) {
    throw SymbolNotInAlphabet("dangling base64 character");
  }
  return out;
}

}  // namespace sipsteg
