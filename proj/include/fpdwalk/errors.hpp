#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fpdwalk {

/// Parameters that violate a model invariant (misconfiguration).
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A state value outside the diffusion's state space.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An integer chain state outside {0, ..., n}.
class RangeError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// The floor embedding of a starting point does not land in {0, ..., n};
/// the chain size is too small for this starting point.
class EmbeddingOutOfRange : public std::out_of_range {
public:
  EmbeddingOutOfRange(const std::string& what, long index)
      : std::out_of_range(what), index_(index) {}
  long index() const noexcept { return index_; }

private:
  long index_;
};

/// A chain path is shorter than the step index a time change asks for.
class PathExhausted : public std::out_of_range {
public:
  PathExhausted(const std::string& what, std::size_t required_steps)
      : std::out_of_range(what), required_(required_steps) {}
  std::size_t required_steps() const noexcept { return required_; }

private:
  std::size_t required_;
};

/// A subordinator path does not cover the requested time.
class PathTooShort : public std::out_of_range {
public:
  PathTooShort(const std::string& what, double deficit)
      : std::out_of_range(what), deficit_(deficit) {}
  double deficit() const noexcept { return deficit_; }

private:
  double deficit_;
};

class HorizonExceeded : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

class UnsupportedArgument : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class NumericalDegeneracy : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InsufficientSampling : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class EmptyResult : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Per-path failures collected by an ensemble run, keyed by path index.
class EnsembleError : public std::runtime_error {
public:
  using Failure = std::pair<std::size_t, std::string>;

  explicit EnsembleError(std::vector<Failure> failures);
  const std::vector<Failure>& failures() const noexcept { return failures_; }

private:
  std::vector<Failure> failures_;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fpdwalk
