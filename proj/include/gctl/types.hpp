#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace gctl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or dimension disagreement between arguments.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A finite-size cap (lattice, tree, state) would be exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Time step violates the monotonicity bound of the explicit scheme.
class CflError : public Error {
 public:
  CflError(const std::string& what, double max_dt) : Error(what), max_dt_(max_dt) {}
  double max_dt() const { return max_dt_; }

 private:
  double max_dt_;
};

/// A coefficient or update produced a NaN/inf.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gctl
