// Shared types for the radar time-allocation library.
//
// Units are fixed across the whole library: kilometres for distances,
// milliseconds for durations, radians for angles. Field and parameter names
// carry the unit suffix wherever the value is dimensional.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace radalloc {

/// Argument outside the domain of a closed-form model.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Nothing can be allocated (every weight is zero, every direction empty, ...).
class NoAllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combinatorial guard tripped (too many targets in a direction, too many sensors).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Optimal elementary-detection exponent for the single-target model: -ln(P_de) = ln 2.
inline constexpr double kGammaR = std::numbers::ln2;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  double norm() const { return std::hypot(x, y); }
  double bearing() const { return std::atan2(y, x); }
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double> row(std::size_t r) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
  }
  std::vector<double> col(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  double sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace radalloc
