#pragma once

// Hot loops, each in a serial reference form and an OpenMP form. Both forms
// produce bit-identical results: work is split into fixed chunks whose
// boundaries do not depend on the thread count.

#include <cstddef>
#include <functional>
#include <vector>

#include "rgbxy/geom/tessellation.hpp"
#include "rgbxy/image.hpp"
#include "rgbxy/palette.hpp"
#include "rgbxy/weights.hpp"

namespace rgbxy::kernels {

inline constexpr std::size_t kChunk = 4096;

HistogramAccumulator bin_pixels_serial(const Image& img);
HistogramAccumulator bin_pixels_omp(const Image& img);

/// Writes point i's coordinates (tessellation dimension) into the buffer.
using PointFn = std::function<void(std::size_t, double*)>;

struct LocateStats {
  std::size_t outside = 0;      // points beyond the 1e-9 tolerance
  double worst_bary = 0.0;      // most negative barycentric coordinate seen
};

/// Barycentric weights of n points in a tessellation; row i holds
/// tessellation vertex ids.
SparseRows locate_serial(const geom::PointLocator& loc, std::size_t n, const PointFn& point,
                         LocateStats* stats = nullptr);
SparseRows locate_omp(const geom::PointLocator& loc, std::size_t n, const PointFn& point,
                      LocateStats* stats = nullptr);

/// out = a * b, dense. a is N x Q, b is Q x P.
void compose_serial(const SparseRows& a, const SparseRows& b, LayerWeights& out);
void compose_omp(const SparseRows& a, const SparseRows& b, LayerWeights& out);

/// Per-pixel weighted sum of colors, clamped to the unit cube.
void reconstruct_serial(const LayerWeights& w, const std::vector<Rgb>& colors, Image& out);
void reconstruct_omp(const LayerWeights& w, const std::vector<Rgb>& colors, Image& out);

}  // namespace rgbxy::kernels
