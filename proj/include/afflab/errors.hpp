#pragma once

#include <stdexcept>
#include <string>

namespace afflab {

/// Two objects built over different primes were combined.
class PrimeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A membership query was made below the resolution at which a point was sampled.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw step pieces assign different values to the same region.
class InconsistentPieces : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation that needs a bijective point map got an element that is not one.
class NonBijectiveElement : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The exact expectation engine was asked for a functional outside its closed class.
class NotInExactClass : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// window_for was given nothing to cover.
class EmptyScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace afflab
