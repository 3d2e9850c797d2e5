#pragma once

#include <stdexcept>
#include <string>

namespace ricci {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violation: bad index, degenerate cell, out-of-range parameter.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Optimal transport between measures whose supports are not mutually reachable.
class TransportError : public Error {
 public:
  using Error::Error;
};

// A per-node physical field required by the operation is absent.
class MissingField : public Error {
 public:
  using Error::Error;
};

// The operation needs a connected graph (or two nodes in one component).
class Disconnected : public Error {
 public:
  using Error::Error;
};

}  // namespace ricci
