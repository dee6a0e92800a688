#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rgbxy::geom {

// Largest ambient dimension handled: 5D RGBXY points lifted by one for
// Delaunay construction.
inline constexpr int kMaxDim = 6;

using Vec = std::array<double, kMaxDim>;

/// Flat N x dim coordinate array.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int dim) : dim_(dim) {}
  PointSet(int dim, std::vector<double> coords);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<double> mutable_point(std::size_t i) {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& coords() const { return coords_; }

  /// Largest absolute coordinate, used to scale tolerances.
  double max_abs() const;

 private:
  int dim_ = 0;
  std::vector<double> coords_;
};

/// Orthonormal frame of the affine hull of a point set. When the points are
/// full rank the frame is the identity so coordinates pass through exactly.
class AffineFrame {
 public:
  /// Greedy farthest-point Gram-Schmidt; a direction counts only if some
  /// point sits farther than `rel_tol * extent` from the current flat.
  static AffineFrame fit(const PointSet& points, double rel_tol = 1e-9);
  static AffineFrame identity(int dim);

  int ambient_dim() const { return ambient_; }
  int rank() const { return rank_; }
  bool is_identity() const { return identity_; }

  /// Indices of the points that spanned the frame (rank + 1 of them).
  const std::vector<std::size_t>& spanning_points() const { return spanning_; }

  Vec to_local(std::span<const double> p) const;
  Vec to_ambient(std::span<const double> local) const;
  PointSet to_local(const PointSet& points) const;

  /// Unit vectors orthogonal to the frame (ambient - rank of them).
  std::vector<Vec> complement() const;

 private:
  int ambient_ = 0;
  int rank_ = 0;
  bool identity_ = false;
  Vec origin_{};
  std::array<Vec, kMaxDim> basis_{};
  std::vector<std::size_t> spanning_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace rgbxy::geom
