#pragma once

#include <stdexcept>
#include <string>

namespace melab {

enum class ErrorKind {
  InvalidArgument,  // parameter or config violates its invariants
  Domain,           // estimator undefined at this sample (division hazard, bad power)
  Singular,         // closed-form optimum has a vanishing determinant
  Data,             // malformed input dataset
  AllSkipped,       // every Monte Carlo replicate hit the domain guard
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace melab
