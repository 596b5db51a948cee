#pragma once

#include <stdexcept>
#include <string>

namespace seqrec {

// Fatal errors surface as exceptions; the CLI maps them to a nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a candidate pool would contain a sequence that is also scored.
class LeakageError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqrec
