#pragma once

#include <stdexcept>
#include <string>

namespace mmwnc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A series did not converge within its term budget, or was asked to
/// evaluate outside its disc of convergence.
class SeriesError : public Error {
public:
  using Error::Error;
};

/// max_i V_i(theta) >= 1 at the requested theta.
class InstabilityError : public Error {
public:
  using Error::Error;
};

/// No theta > 0 satisfies the stability condition.
class UnstableSystemError : public Error {
public:
  using Error::Error;
};

/// Two hop classes have (numerically) coincident V values.
class DegenerateClassError : public Error {
public:
  using Error::Error;
};

class CapExceededError : public Error {
public:
  using Error::Error;
};

class BracketError : public Error {
public:
  using Error::Error;
};

/// The equal-spacing root coincides with the excluded double root.
class DegenerateError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace mmwnc
