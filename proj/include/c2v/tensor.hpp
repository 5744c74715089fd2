// Dense row-major matrix / vector storage and the handful of BLAS-1/2
// kernels the models are built from. Everything is double precision so the
// finite-difference checks run against the production code path.
#pragma once

#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "c2v/common.hpp"

namespace c2v {

using Vec = std::vector<double>;

struct Mat {
  size_t rows = 0;
  size_t cols = 0;
  Vec a;

  Mat() = default;
  Mat(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(size_t r, size_t c) { return a[r * cols + c]; }
  double operator()(size_t r, size_t c) const { return a[r * cols + c]; }

  double* row(size_t r) { return a.data() + r * cols; }
  const double* row(size_t r) const { return a.data() + r * cols; }

  size_t size() const { return a.size(); }
  void zero() { std::memset(a.data(), 0, a.size() * sizeof(double)); }
};

// Flat view of one trainable tensor plus its gradient, used by the
// optimizer and the gradient checker.
struct TensorRef {
  std::string name;
  double* value = nullptr;
  double* grad = nullptr;
  size_t size = 0;
};

inline void check_shape(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("shape mismatch: " + what);
}

inline double dot(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

inline void axpy(double a, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline void scal(double a, double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= a;
}

// y += M x
inline void gemv(const Mat& m, const double* x, double* y) {
  for (size_t r = 0; r < m.rows; ++r) y[r] += dot(m.row(r), x, m.cols);
}

// y += M^T x
inline void gemv_t(const Mat& m, const double* x, double* y) {
  for (size_t r = 0; r < m.rows; ++r) axpy(x[r], m.row(r), y, m.cols);
}

// G += u v^T
inline void add_outer(Mat& g, const double* u, const double* v) {
  for (size_t r = 0; r < g.rows; ++r) axpy(u[r], v, g.row(r), g.cols);
}

inline double norm2(const double* x, size_t n) { return std::sqrt(dot(x, x, n)); }

inline bool all_finite(const double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

inline bool all_finite(const Vec& v) { return all_finite(v.data(), v.size()); }
inline bool all_finite(const Mat& m) { return all_finite(m.a.data(), m.size()); }

}  // namespace c2v
