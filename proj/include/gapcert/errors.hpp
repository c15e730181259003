#pragma once

#include <stdexcept>
#include <string>

namespace gapcert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed words, measures, actions or configs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A support, state or enumeration cap was hit. Never silently truncated.
class CostCapExceeded : public Error {
 public:
  using Error::Error;
};

class NonSymmetric : public Error {
 public:
  using Error::Error;
};

class InfiniteIndex : public Error {
 public:
  using Error::Error;
};

/// No even n <= n_max satisfied the witness inequality. Inconclusive, not a disproof.
class NoWitnessFound : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace gapcert
