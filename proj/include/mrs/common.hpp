#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mrs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Points are stored one per row.
using PointSet = Eigen::MatrixXd;

using Rng = std::mt19937_64;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization cannot be repaired by the jitter ladder, or a
/// computed quantity leaves its valid range by more than rounding.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box domain.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);

  static Box unit(int dim);

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] bool contains(const Eigen::Ref<const Vector>& x, double tol = 0.0) const;
  [[nodiscard]] Vector clamp(const Eigen::Ref<const Vector>& x) const;
  [[nodiscard]] Vector width() const { return upper - lower; }

  /// Uniform draw inside the box.
  [[nodiscard]] Vector sample(Rng& rng) const;
  /// `n` uniform draws, one per row.
  [[nodiscard]] PointSet sample(Rng& rng, int n) const;
  /// Maps points from the unit cube (rows) into the box.
  [[nodiscard]] PointSet from_unit(const PointSet& unit_points) const;
};

/// Standard normal density and distribution function.
double normal_pdf(double z);
double normal_cdf(double z);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// Fills a matrix with independent standard-normal draws.
Matrix standard_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Deterministic child seed from a parent seed and a stream path.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace mrs
