#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lienard {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a character index into the input.
struct ParseError : Error {
  ParseError(std::size_t position, const std::string& message)
      : Error("parse error at position " + std::to_string(position) + ": " + message),
        position(position),
        detail(message) {}

  std::size_t position;
  std::string detail;
};

/// A partial result of an evaluation was not finite.
struct DomainError : Error {
  using Error::Error;
};

/// |f_n| stays below the margin everywhere on the sampled interval.
struct NoIntervalError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  using Error::Error;
};

/// No integration offset makes the candidate constant `a` constant.
struct NoConstantA : Error {
  using Error::Error;
};

/// More than one integration offset passes every condition.
struct AmbiguousOffset : Error {
  AmbiguousOffset(std::vector<double> offsets, const std::string& message)
      : Error(message), offsets(std::move(offsets)) {}

  std::vector<double> offsets;
};

struct NMustBeAtLeast4 : Error {
  using Error::Error;
};

struct SpecError : Error {
  using Error::Error;
};

struct NonMonotoneImage : Error {
  using Error::Error;
};

struct BlowUp : Error {
  using Error::Error;
};

}  // namespace lienard
