#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace uavcf {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;
using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 3.0e8;  // link-budget convention
inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a channel matrix is too ill-conditioned to invert.
class SingularChannelError : public std::runtime_error {
 public:
  explicit SingularChannelError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a requested configuration violates a model precondition.
class UnsupportedConfigError : public std::invalid_argument {
 public:
  explicit UnsupportedConfigError(const std::string& what) : std::invalid_argument(what) {}
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace uavcf
