#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ktoda {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes, indices or parameters was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The finite truncation is too small for the requested order or index.
class TruncationTooSmall : public Error {
 public:
  using Error::Error;
};

/// Some |c_n| fell below the configured floor while integrating.
class CNearZero : public Error {
 public:
  CNearZero(double time, std::size_t index, double magnitude);

  double time() const noexcept { return time_; }
  /// 1-based index n of the offending c_n.
  std::size_t index() const noexcept { return index_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  double time_;
  std::size_t index_;
  double magnitude_;
};

/// |z| is inside the safety margin around the norm bound.
class ZTooSmall : public Error {
 public:
  using Error::Error;
};

/// A 2x2 block that must be inverted is (numerically) singular.
class SingularBlock : public Error {
 public:
  using Error::Error;
};

/// A series did not reach its tolerance within the term cap.
class SeriesCapExceeded : public Error {
 public:
  using Error::Error;
};

/// A functional was applied to a polynomial beyond its stored moment order.
class OrderOverflow : public Error {
 public:
  using Error::Error;
};

/// The integrated state became non-finite.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// A finite-difference evaluation was requested at an unusable time.
class GridError : public Error {
 public:
  using Error::Error;
};

}  // namespace ktoda
