#pragma once

#include <stdexcept>
#include <string>

namespace infgrand {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied malformed or inconsistent arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// A requested computation exceeds a configured size limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// File-system or parse failure; messages name the file and, when known, the line.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace infgrand
