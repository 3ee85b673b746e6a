#pragma once

#include <stdexcept>
#include <string>

namespace cvtomo {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class UnsupportedError : public Error {
public:
  using Error::Error;
};

// State construction lost more norm than allowed by the Fock cutoff.
class TruncationError : public Error {
public:
  using Error::Error;
};

class DegenerateDataError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// Input sampled too coarsely for the requested accuracy.
class AccuracyError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace cvtomo
