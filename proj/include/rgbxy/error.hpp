#pragma once

#include <stdexcept>
#include <string>

namespace rgbxy {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input points span fewer dimensions than the construction needs.
class DegenerateInput : public Error {
 public:
  DegenerateInput(const std::string& what, int rank)
      : Error(what), rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

/// Floating-point roundoff left a hull construction inconsistent.
class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class OutsideHull : public Error {
 public:
  using Error::Error;
};

class NoValidTemplate : public Error {
 public:
  using Error::Error;
};

class InvalidAngle : public Error {
 public:
  using Error::Error;
};

/// Malformed file or message payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace rgbxy
