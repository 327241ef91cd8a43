#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace otcpd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad caller input: shapes, parameter ranges, malformed configuration.
class ArgumentError : public std::invalid_argument {
public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed data content (CSV cells, label files, non-PD covariance, ...).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure that cannot be represented in the result itself.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace otcpd
