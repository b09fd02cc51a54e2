#pragma once

#include <stdexcept>
#include <string>

namespace evochain {

// Base of every error the engine raises. The CLI maps each subclass to an
// exit code (see tools/evochain.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

// A well-formed query that cannot be answered (no shared community, no chain).
class QueryError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace evochain
