#pragma once

#include <stdexcept>
#include <string>

namespace metacov {

/// Argument outside a function's mathematical domain, or a violated type
/// invariant (bad sign, bad count, correlation out of range, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A moment that does not exist (diverges) at the given degrees of freedom.
class SingularityError : public std::domain_error {
 public:
  explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// The covariance of two pooled variances needs a scale constant that is
/// neither supplied nor implied by the overlap structure.
class KFactorRequired : public std::runtime_error {
 public:
  explicit KFactorRequired(const std::string& what) : std::runtime_error(what) {}
};

/// An assembled matrix failed an integrity check (positive diagonal,
/// positive semidefiniteness within tolerance).
class MatrixIntegrityError : public std::runtime_error {
 public:
  explicit MatrixIntegrityError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested estimate is not identifiable under the given design.
class UnidentifiableError : public std::runtime_error {
 public:
  explicit UnidentifiableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace metacov
