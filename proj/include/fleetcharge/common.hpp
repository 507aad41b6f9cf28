#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fleetcharge {

using Vec = std::vector<double>;

// ---------------------------------------------------------------- errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user-supplied configuration (counts, bounds, limits).
struct ConfigError : Error {
  using Error::Error;
};

/// A well-formed file whose contents violate a domain invariant.
struct ValidationError : Error {
  using Error::Error;
};

/// A file that cannot be parsed at all.
struct ParseError : Error {
  using Error::Error;
};

/// Missing or unwritable files.
struct IoError : Error {
  using Error::Error;
};

/// Empty feasible set, stranded fleet, failed matching.
struct InfeasibleError : Error {
  using Error::Error;
};

/// Numerical contract violations (step size out of bounds, singular systems).
struct NumericError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------- vectors

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sum(const Vec& a) { return std::accumulate(a.begin(), a.end(), 0.0); }

inline double inf_norm(const Vec& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

inline double inf_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

inline double two_norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec add(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec sub(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec scaled(Vec a, double t) {
  for (double& v : a) v *= t;
  return a;
}

/// a + t*b
inline Vec axpy(Vec a, double t, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += t * b[i];
  return a;
}

/// Element-wise product (diagonal matrix times vector).
inline Vec hadamard(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return a;
}

// ---------------------------------------------------------------- matrices

/// Dense row-major matrix; small sizes only (game maps are (m*C)^2).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline Vec mul(const Matrix& a, const Vec& x) {
  if (x.size() != a.cols()) throw std::invalid_argument("matrix-vector size mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

namespace detail {

/// Solves A z = b by Gaussian elimination with partial pivoting. A is
/// destroyed. Throws NumericError on (near-)singular systems.
inline Vec solve_linear(Matrix a, Vec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_linear: not square");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(perm[k], k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(a(perm[r], k));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-14) throw NumericError("solve_linear: singular system");
    std::swap(perm[k], perm[piv]);
    const double d = a(perm[k], k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a(perm[r], k) / d;
      if (f == 0.0) continue;
      a(perm[r], k) = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) a(perm[r], c) -= f * a(perm[k], c);
      b[perm[r]] -= f * b[perm[k]];
    }
  }
  Vec z(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[perm[ri]];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a(perm[ri], c) * z[c];
    z[ri] = s / a(perm[ri], ri);
  }
  return z;
}

}  // namespace detail

}  // namespace fleetcharge
