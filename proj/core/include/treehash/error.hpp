#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treehash {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent mode parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The operation is not available for the selected mode (e.g. streaming a
// stored-only mode without a known length).
class ModeError : public Error {
 public:
  using Error::Error;
};

// API misuse, such as absorbing into a finalized sponge.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Values that cannot be represented by the node coding (I2OSP overflow,
// unrepresentable interleaving block size, zero arity).
class CodingError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t bit_position)
      : Error(what + " (at bit " + std::to_string(bit_position) + ")"),
        bit_position_(bit_position) {}

  std::size_t bit_position() const noexcept { return bit_position_; }

 private:
  std::size_t bit_position_;
};

}  // namespace treehash
