#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace camtt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

// ---- Error types ----

/// Invalid or inconsistent configuration value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Array or transform size does not fit the operation.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Tensor/layer shapes do not chain.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical failure at run time (diverged training, I/O, ...).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

// ---- Dense row-major 2-D grid ----

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// ---- Random streams ----

using Rng = std::mt19937_64;

/// Independent, reproducible generator for (seed, stream) pairs.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

// ---- Small numerics ----

inline Mat3 symmetrize(const Mat3& m) { return 0.5 * (m + m.transpose()); }

/// Symmetrize and, if the Cholesky factorization fails, add diagonal jitter
/// until it succeeds.
inline Mat3 make_positive_definite(const Mat3& m, double jitter = 1e-9) {
  Mat3 s = symmetrize(m);
  double eps = jitter;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Eigen::LLT<Mat3> llt(s);
    if (llt.info() == Eigen::Success) return s;
    s.diagonal().array() += eps;
    eps *= 10.0;
  }
  return s;
}

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
inline double power_to_db(double p, double floor_db) {
  if (!(p > 0.0)) return floor_db;
  return std::max(10.0 * std::log10(p), floor_db);
}

}  // namespace camtt
