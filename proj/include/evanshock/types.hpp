#ifndef EVANSHOCK_TYPES_HPP
#define EVANSHOCK_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace evanshock {

using Complex = std::complex<double>;

// Dense fixed-size types for the 3x3 eigenvalue system.
template <typename Scalar> using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar> using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using RowVector3 = Eigen::Matrix<Scalar, 1, 3>;

using Matrix3c = Matrix3<Complex>;
using Vector3c = Vector3<Complex>;
using RowVector3c = RowVector3<Complex>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non-convergence, splitting loss, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace evanshock

#endif  // EVANSHOCK_TYPES_HPP
