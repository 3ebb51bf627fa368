#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sipsteg {

/// Base class for every error this library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes are not a usable carrier message.
class MalformedMessage : public Error {
 public:
  using Error::Error;
};

/// The carrier field a channel needs is missing from the message.
class ChannelAbsent : public Error {
 public:
  using Error::Error;
};

/// A field's content is not shaped like this channel's output; extraction
/// cannot proceed (wrong config, or the message carries no covert data).
class SymbolNotInAlphabet : public Error {
 public:
  using Error::Error;
};

/// A configuration value violates a channel's stated constraints.
class ConfigViolation : public Error {
 public:
  using Error::Error;
};

class AlphabetTooSmall : public Error {
 public:
  using Error::Error;
};

/// Payload does not fit the 16-bit framed length prefix.
class PayloadTooLong : public Error {
 public:
  using Error::Error;
};

/// A framed stream declares more bits than it contains.
class TruncatedStream : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotAPermutation : public Error {
 public:
  using Error::Error;
};

class DuplicateReorderableHeader : public Error {
 public:
  using Error::Error;
};

/// Raised by flow embedding when the framed payload is larger than the
/// total capacity of the scheduled slots.
class PayloadExceedsCapacity : public Error {
 public:
  PayloadExceedsCapacity(std::size_t needed_bits, std::size_t available_bits)
      : Error("payload needs " + std::to_string(needed_bits) +
              " bits but only " + std::to_string(available_bits) +
              " are available"),
        needed(needed_bits),
        available(available_bits) {}

  std::size_t needed = 0;
  std::size_t available = 0;
};

}  // namespace sipsteg
