#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qchain {

using cdouble = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Default cap on dense state vectors (number of complex entries).
inline constexpr long long kDenseBudget = 1LL << 26;

// Error taxonomy. Everything derives from Error so callers can catch coarsely.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct ResourceError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct InsufficientDataError : ValidationError {
  using ValidationError::ValidationError;
};
struct BoundUndefinedError : ValidationError {
  using ValidationError::ValidationError;
};
struct ConfigError : Error {
  using Error::Error;
};

// Closed interval of sites, 1-based. Contiguity is by construction.
struct Interval {
  int a = 1;
  int b = 1;

  int length() const { return b - a + 1; }
  bool contains(int site) const { return a <= site && site <= b; }
  Interval clipped(int lo, int hi) const {
    return Interval{std::max(a, lo), std::min(b, hi)};
  }
  bool valid() const { return a <= b; }
  bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
};

// Largest singular value via the Hermitian square; robust for complex input.
double operator_norm(const MatrixXcd& m);

double vector_norm(const VectorXcd& v);

// Fixed-format double for CSV output: shortest round-trip representation,
// identical bytes for identical values on a given platform.
std::string format_double(double x);

std::string format_interval(const Interval& iv);

}  // namespace qchain
