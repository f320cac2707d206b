#pragma once

#include <stdexcept>
#include <string>

namespace cascsym {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value (overflow, NaN).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document.
class ParseError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool cond, const char* what) {
  if (!cond) throw DomainError(what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

inline double finite_or_throw(double v, const char* what) {
  if (!(v - v == 0.0)) throw NumericError(std::string(what) + ": non-finite value");
  return v;
}

}  // namespace detail
}  // namespace cascsym
