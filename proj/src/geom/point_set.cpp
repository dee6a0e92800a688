#include "rgbxy/geom/point_set.hpp"

#include <algorithm>
#include <cmath>

#include "rgbxy/error.hpp"

namespace rgbxy::geom {

PointSet::PointSet(int dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim <= 0 || dim > kMaxDim) throw Error("PointSet: unsupported dimension");
  if (coords_.size() % dim != 0) throw Error("PointSet: ragged coordinates");
}

void PointSet::push_back(std::span<const double> p) {
  coords_.insert(coords_.end(), p.begin(), p.begin() + dim_);
}

double PointSet::max_abs() const {
  double m = 0.0;
  for (double c : coords_) m = std::max(m, std::abs(c));
  return m;
}

AffineFrame AffineFrame::identity(int dim) {
  AffineFrame f;
  f.ambient_ = dim;
  f.rank_ = dim;
  f.identity_ = true;
  for (int i = 0; i < dim; ++i) f.basis_[i][i] = 1.0;
  return f;
}

AffineFrame AffineFrame::fit(const PointSet& points, double rel_tol) {
  const int d = points.dim();
  AffineFrame f;
  f.ambient_ = d;
  const std::size_t n = points.size();
  if (n == 0) return f;

  Vec lo{}, hi{};
  for (int k = 0; k < d; ++k) {
    lo[k] = hi[k] = points[0][k];
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], points[i][k]);
      hi[k] = std::max(hi[k], points[i][k]);
    }
  }
  double extent = 0.0;
  for (int k = 0; k < d; ++k) extent = std::max(extent, hi[k] - lo[k]);
  const double tol = rel_tol * std::max(extent, 1e-300);

  // Start at the lexicographically smallest point along the widest axis.
  int axis = 0;
  for (int k = 1; k < d; ++k) {
    if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
  }
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (points[i][axis] < points[start][axis]) start = i;
  }
  for (int k = 0; k < d; ++k) f.origin_[k] = points[start][k];
  f.spanning_.push_back(start);

  std::vector<double> residual(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) residual[i * d + k] = points[i][k] - f.origin_[k];
  }

  while (f.rank_ < d) {
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += residual[i * d + k] * residual[i * d + k];
      if (s > best) {
        best = s;
        best_i = i;
      }
    }
    if (std::sqrt(best) <= tol) break;
    Vec u{};
    const double norm = std::sqrt(best);
    for (int k = 0; k < d; ++k) u[k] = residual[best_i * d + k] / norm;
    // Re-orthogonalize against the existing basis to limit drift.
    for (int b = 0; b < f.rank_; ++b) {
      double proj = 0.0;
      for (int k = 0; k < d; ++k) proj += u[k] * f.basis_[b][k];
      for (int k = 0; k < d; ++k) u[k] -= proj * f.basis_[b][k];
    }
    double un = 0.0;
    for (int k = 0; k < d; ++k) un += u[k] * u[k];
    un = std::sqrt(un);
    for (int k = 0; k < d; ++k) u[k] /= un;
    f.basis_[f.rank_++] = u;
    f.spanning_.push_back(best_i);
    for (std::size_t i = 0; i < n; ++i) {
      double proj = 0.0;
      for (int k = 0; k < d; ++k) proj += residual[i * d + k] * u[k];
      for (int k = 0; k < d; ++k) residual[i * d + k] -= proj * u[k];
    }
  }

  if (f.rank_ == d) {
    auto spanning = f.spanning_;
    f = identity(d);
    f.spanning_ = std::move(spanning);
  }
  return f;
}

Vec AffineFrame::to_local(std::span<const double> p) const {
  Vec out{};
  if (identity_) {
    for (int k = 0; k < ambient_; ++k) out[k] = p[k];
    return out;
  }
  for (int b = 0; b < rank_; ++b) {
    double s = 0.0;
    for (int k = 0; k < ambient_; ++k) s += (p[k] - origin_[k]) * basis_[b][k];
    out[b] = s;
  }
  return out;
}

Vec AffineFrame::to_ambient(std::span<const double> local) const {
  Vec out{};
  if (identity_) {
    for (int k = 0; k < ambient_; ++k) out[k] = local[k];
    return out;
  }
  for (int k = 0; k < ambient_; ++k) {
    double s = origin_[k];
    for (int b = 0; b < rank_; ++b) s += local[b] * basis_[b][k];
    out[k] = s;
  }
  return out;
}

PointSet AffineFrame::to_local(const PointSet& points) const {
  if (identity_) return points;
  if (rank_ == 0) throw DegenerateInput("AffineFrame: rank-0 point set", 0);
  std::vector<double> coords;
  coords.reserve(points.size() * rank_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec l = to_local(points[i]);
    coords.insert(coords.end(), l.begin(), l.begin() + rank_);
  }
  return PointSet(rank_, std::move(coords));
}

std::vector<Vec> AffineFrame::complement() const {
  std::vector<Vec> out;
  std::vector<Vec> basis(basis_.begin(), basis_.begin() + rank_);
  for (int axis = 0; axis < ambient_ && static_cast<int>(basis.size()) < ambient_; ++axis) {
    Vec u{};
    u[axis] = 1.0;
    for (const auto& b : basis) {
      double proj = 0.0;
      for (int k = 0; k < ambient_; ++k) proj += u[k] * b[k];
      for (int k = 0; k < ambient_; ++k) u[k] -= proj * b[k];
    }
    double un = 0.0;
    for (int k = 0; k < ambient_; ++k) un += u[k] * u[k];
    un = std::sqrt(un);
    if (un < 1e-6) continue;
    for (int k = 0; k < ambient_; ++k) u[k] /= un;
    basis.push_back(u);
    out.push_back(u);
  }
  return out;
}

}  // namespace rgbxy::geom
