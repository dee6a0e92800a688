#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "rgbxy/geom/point_set.hpp"

namespace rgbxy::geom {

/// Dense n x n matrix with n <= kMaxDim, row-major.
using SmallMatrix = std::array<double, kMaxDim * kMaxDim>;

/// In-place LU with partial pivoting. Returns the determinant; `perm` holds
/// the row permutation. A zero return means the matrix is singular.
inline double lu_decompose(SmallMatrix& a, int n, std::array<int, kMaxDim>& perm) {
  double det = 1.0;
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    double best = std::abs(a[c * n + c]);
    for (int r = c + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + c]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != c) {
      for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      std::swap(perm[c], perm[pivot]);
      det = -det;
    }
    const double diag = a[c * n + c];
    det *= diag;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / diag;
      a[r * n + c] = f;
      for (int k = c + 1; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

inline double determinant(SmallMatrix a, int n) {
  std::array<int, kMaxDim> perm{};
  return lu_decompose(a, n, perm);
}

/// Solves A x = b given the output of lu_decompose.
inline Vec lu_solve(const SmallMatrix& lu, int n, const std::array<int, kMaxDim>& perm,
                    const Vec& b) {
  Vec x{};
  for (int i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (int k = 0; k < i; ++k) s -= lu[i * n + k] * x[k];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= lu[i * n + k] * x[k];
    x[i] = s / lu[i * n + i];
  }
  return x;
}

/// Inverse of a; returns false when singular.
inline bool invert(const SmallMatrix& a, int n, SmallMatrix& inv, double* det_out = nullptr) {
  SmallMatrix lu = a;
  std::array<int, kMaxDim> perm{};
  const double det = lu_decompose(lu, n, perm);
  if (det_out) *det_out = det;
  if (det == 0.0) return false;
  for (int c = 0; c < n; ++c) {
    Vec e{};
    e[c] = 1.0;
    const Vec col = lu_solve(lu, n, perm, e);
    for (int r = 0; r < n; ++r) inv[r * n + c] = col[r];
  }
  return true;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Volume of the simplex with the given dim+1 vertices.
template <typename PointAt>
double simplex_volume(int dim, PointAt&& point_at) {
  SmallMatrix m{};
  const auto last = point_at(dim);
  for (int r = 0; r < dim; ++r) {
    const auto p = point_at(r);
    for (int c = 0; c < dim; ++c) m[r * dim + c] = p[c] - last[c];
  }
  return std::abs(determinant(m, dim)) / factorial(dim);
}

}  // namespace rgbxy::geom
