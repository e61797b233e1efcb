#pragma once

#include <stdexcept>
#include <string>

namespace obbreg {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument (sizes, ranges, finiteness) does not hold.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Four points that do not form a strictly convex quadrilateral.
class DegenerateQuad : public Error {
 public:
  using Error::Error;
};

class NotARectangle : public Error {
 public:
  using Error::Error;
};

// Decoding produced a non-finite width or height.
class Overflow : public Error {
 public:
  using Error::Error;
};

// Two encodings compared by a loss were built against different anchors.
class AnchorMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace obbreg
