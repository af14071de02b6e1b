#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lops {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Division left a nonzero remainder; `remainder` is its canonical text.
struct NotDivisible : Error {
  NotDivisible(const std::string& what, std::string rem) : Error(what), remainder(std::move(rem)) {}
  std::string remainder;
};

struct MissingAtom : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(std::size_t line_, std::size_t column_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ", column " + std::to_string(column_) + ": " + msg),
        line(line_),
        column(column_) {}
  std::size_t line;
  std::size_t column;
};

struct DuplicateEntry : ParseError {
  using ParseError::ParseError;
};

struct UnknownAtom : ParseError {
  using ParseError::ParseError;
};

struct DegreeMismatch : Error {
  using Error::Error;
};

struct DegeneracyDetected : Error {
  using Error::Error;
};

struct NotPerfectSquare : Error {
  NotPerfectSquare(const std::string& what, std::string rem) : Error(what), remainder(std::move(rem)) {}
  std::string remainder;
};

struct LeadingCoefficientZero : Error {
  using Error::Error;
};

struct LeadingCoefficientVanishes : Error {
  using Error::Error;
};

struct NotAllHyperbolic : Error {
  using Error::Error;
};

struct PatchTooSmall : Error {
  using Error::Error;
};

}  // namespace lops
