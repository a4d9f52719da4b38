#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace infogeo {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A function was evaluated outside its domain (log/sqrt of a non-positive
/// value, division by zero) either directly or while propagating a jet.
struct DomainError : Error {
  using Error::Error;
};

/// A derivative of order > 4 was requested.
struct OrderError : Error {
  using Error::Error;
};

/// Matrix inversion failed: the spectrum is not safely positive definite.
struct SingularError : Error {
  using Error::Error;
};

/// A matrix expected to be positive semi-definite has a clearly negative
/// eigenvalue. Usually signals a quadrature or modeling error upstream.
struct NotPSDError : Error {
  using Error::Error;
};

/// A candidate potential does not define a metric at the given point
/// (its Hessian is not positive definite). Carries the spectrum so the
/// caller can inspect how it failed.
struct NotMetricError : Error {
  std::vector<double> spectrum;
  NotMetricError(const std::string& msg, std::vector<double> eigs)
      : Error(msg), spectrum(std::move(eigs)) {}
};

/// Two independent computation routes for the same tensor disagree beyond
/// tolerance. This is a designed self-check, not a user error.
struct RouteMismatchError : Error {
  double residual = 0.0;
  RouteMismatchError(const std::string& msg, double res) : Error(msg), residual(res) {}
};

/// The numerical rank of a Fisher matrix changed inside a finite-difference
/// stencil or along an integrated leaf.
struct RankDriftError : Error {
  using Error::Error;
};

/// A direction argument that must be nonzero was zero.
struct ZeroTensorError : Error {
  using Error::Error;
};

struct ZeroVectorError : Error {
  using Error::Error;
};

/// Expression text failed to parse. `offset` is the byte offset of the
/// first character that could not be consumed.
struct SyntaxError : Error {
  std::size_t offset = 0;
  SyntaxError(const std::string& msg, std::size_t off) : Error(msg), offset(off) {}
};

/// An identifier in an expression does not resolve against the declared
/// variable list.
struct UnknownIdentifierError : Error {
  std::string name;
  UnknownIdentifierError(const std::string& msg, std::string ident)
      : Error(msg), name(std::move(ident)) {}
};

/// Numerical integration did not converge or was asked for an unsupported
/// sample space.
struct IntegrationError : Error {
  using Error::Error;
};

/// Tensor/matrix dimensions do not match.
struct DimensionError : Error {
  using Error::Error;
};

}  // namespace infogeo
