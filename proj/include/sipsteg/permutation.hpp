#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "sipsteg/errors.hpp"

namespace sipsteg {

/// A bijection on {0..n-1}, written as the image list.
using Permutation = std::vector<unsigned>;

inline std::uint64_t factorial(unsigned n) {
  if (n > 20) throw ConfigViolation("factorial overflows past n=20");
  std::uint64_t f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

/// floor(log2(n!)): the number of whole bits a reordering of n items carries.
inline unsigned permutation_capacity_bits(unsigned n) {
  const std::uint64_t f = factorial(n);
  return static_cast<unsigned>(std::bit_width(f) - 1);
}

/// index -> the index-th permutation of {0..n-1} in lexicographic order
/// (factorial number system).
inline Permutation lehmer_encode(std::uint64_t index, unsigned n) {
  if (index >= factorial(n)) throw IndexOutOfRange("permutation index >= n!");
  std::vector<unsigned> pool;
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.push_back(i);

  Permutation out;
  out.reserve(n);
  for (unsigned i = n; i > 0; --i) {
    const std::uint64_t f = factorial(i - 1);
    const auto digit = static_cast<std::size_t>(index / f);
    index %= f;
    out.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return out;
}

/// Lexicographic rank of a permutation; inverse of lehmer_encode.
inline std::uint64_t lehmer_decode(const Permutation& perm) {
  const auto n = static_cast<unsigned>(perm.size());
  std::vector<bool> seen(n, false);
  for (unsigned v : perm) {
    if (v >= n || seen[v]) throw NotAPermutation("mapping is not a bijection on 0..n-1");
    seen[v] = true;
  }

  std::uint64_t rank = 0;
  for (unsigned i = 0; i < n; ++i) {
    std::uint64_t smaller_after = 0;
    for (unsigned j = i + 1; j < n; ++j) {
      if (perm[j] < perm[i]) ++smaller_after;
    }
    rank += smaller_after * factorial(n - i - 1);
  }
  return rank;
}

}  // namespace sipsteg
