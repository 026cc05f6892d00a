#ifndef BAP_ERRORS_H_
#define BAP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace bap {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed instance data (recipe out of range, duplicate ids, bad shapes).
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

// Bad generator / scenario / solver configuration.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// No allocation satisfies capacity and eligibility.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration refused because the search space is too large.
class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

// Arithmetic domain errors in metrics (zero denominators, shape mismatch).
class MetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bap

#endif  // BAP_ERRORS_H_
