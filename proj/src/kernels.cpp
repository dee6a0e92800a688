#include "rgbxy/kernels.hpp"

#include <algorithm>
#include <array>

#include <omp.h>

namespace rgbxy::kernels {

namespace {

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

void bin_chunk(const Image& img, std::size_t c, HistogramAccumulator& acc) {
  const std::size_t end = std::min(img.pixel_count(), (c + 1) * kChunk);
  for (std::size_t i = c * kChunk; i < end; ++i) acc.add(img.pixel(i));
}

// Fixed-stride scratch rows; compacted into CSR afterwards.
struct RowScratch {
  explicit RowScratch(std::size_t n) : count(n), index(n * geom::kMaxDim), value(n * geom::kMaxDim) {}
  std::vector<std::uint8_t> count;
  std::vector<std::uint32_t> index;
  std::vector<float> value;
};

struct ChunkStats {
  std::size_t outside = 0;
  double worst = 0.0;
};

void locate_chunk(const geom::PointLocator& loc, std::size_t n, const PointFn& point,
                  std::size_t c, RowScratch& rows, ChunkStats& st) {
  const auto& tess = loc.tessellation();
  const std::size_t begin = c * kChunk;
  const std::size_t end = std::min(n, begin + kChunk);
  geom::Vec q{};
  const std::span<const double> qs(q.data(), static_cast<std::size_t>(tess.dim()));
  int hint = -1;
  for (std::size_t i = begin; i < end; ++i) {
    point(i, q.data());
    const geom::Location l = loc.locate(qs, hint);
    if (!l.inside) ++st.outside;
    st.worst = std::min(st.worst, l.min_bary);
    hint = l.simplex;
    const geom::SparseWeights w = geom::to_weights(tess, l);
    // Keep each row sorted by column so CSR rows are canonical.
    std::array<int, geom::kMaxDim> order{};
    for (int k = 0; k < w.count; ++k) order[k] = k;
    std::sort(order.begin(), order.begin() + w.count,
              [&](int a, int b) { return w.index[a] < w.index[b]; });
    rows.count[i] = static_cast<std::uint8_t>(w.count);
    for (int k = 0; k < w.count; ++k) {
      rows.index[i * geom::kMaxDim + k] = static_cast<std::uint32_t>(w.index[order[k]]);
      rows.value[i * geom::kMaxDim + k] = static_cast<float>(w.weight[order[k]]);
    }
  }
}

SparseRows compact(const RowScratch& rows, std::size_t cols) {
  SparseRows out;
  out.cols = cols;
  const std::size_t n = rows.count.size();
  out.offsets.resize(n + 1);
  out.offsets[0] = 0;
  for (std::size_t i = 0; i < n; ++i) out.offsets[i + 1] = out.offsets[i] + rows.count[i];
  out.indices.resize(out.offsets[n]);
  out.values.resize(out.offsets[n]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rows.count[i]; ++k) {
      out.indices[out.offsets[i] + k] = rows.index[i * geom::kMaxDim + k];
      out.values[out.offsets[i] + k] = rows.value[i * geom::kMaxDim + k];
    }
  }
  return out;
}

void finish_stats(const std::vector<ChunkStats>& chunks, LocateStats* stats) {
  if (!stats) return;
  *stats = {};
  for (const auto& c : chunks) {
    stats->outside += c.outside;
    stats->worst_bary = std::min(stats->worst_bary, c.worst);
  }
}

inline void compose_row(const SparseRows& a, const SparseRows& b, std::size_t r, float* out) {
  const std::size_t p = b.cols;
  double acc[64];
  std::vector<double> wide;
  double* sum = acc;
  if (p > 64) {
    wide.assign(p, 0.0);
    sum = wide.data();
  } else {
    std::fill_n(acc, p, 0.0);
  }
  const auto ai = a.row_indices(r);
  const auto av = a.row_values(r);
  for (std::size_t k = 0; k < ai.size(); ++k) {
    const double w = av[k];
    const auto bi = b.row_indices(ai[k]);
    const auto bv = b.row_values(ai[k]);
    for (std::size_t j = 0; j < bi.size(); ++j) sum[bi[j]] += w * bv[j];
  }
  for (std::size_t c = 0; c < p; ++c) out[c] = static_cast<float>(sum[c]);
}

inline void reconstruct_pixel(const LayerWeights& w, const std::vector<Rgb>& colors,
                              std::size_t i, Image& out) {
  const auto row = w.row(i);
  double r = 0.0, g = 0.0, b = 0.0;
  for (std::size_t c = 0; c < row.size(); ++c) {
    const double v = row[c];
    r += v * colors[c].r;
    g += v * colors[c].g;
    b += v * colors[c].b;
  }
  out.set(i, clamp_unit({r, g, b}));
}

}  // namespace

HistogramAccumulator bin_pixels_serial(const Image& img) {
  HistogramAccumulator acc;
  for (std::size_t c = 0; c < chunk_count(img.pixel_count()); ++c) bin_chunk(img, c, acc);
  return acc;
}

HistogramAccumulator bin_pixels_omp(const Image& img) {
  const std::size_t chunks = chunk_count(img.pixel_count());
  const int threads = std::max(1, std::min<int>(omp_get_max_threads(), static_cast<int>(chunks)));
  std::vector<HistogramAccumulator> partial(threads);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::size_t c = 0; c < chunks; ++c) bin_chunk(img, c, partial[omp_get_thread_num()]);
  HistogramAccumulator acc;
  for (const auto& p : partial) acc.merge(p);
  return acc;
}

SparseRows locate_serial(const geom::PointLocator& loc, std::size_t n, const PointFn& point,
                         LocateStats* stats) {
  RowScratch rows(n);
  std::vector<ChunkStats> chunks(chunk_count(n));
  for (std::size_t c = 0; c < chunks.size(); ++c) locate_chunk(loc, n, point, c, rows, chunks[c]);
  finish_stats(chunks, stats);
  return compact(rows, loc.tessellation().vertices().size());
}

SparseRows locate_omp(const geom::PointLocator& loc, std::size_t n, const PointFn& point,
                      LocateStats* stats) {
  RowScratch rows(n);
  std::vector<ChunkStats> chunks(chunk_count(n));
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(chunks.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < count; ++c) {
    locate_chunk(loc, n, point, static_cast<std::size_t>(c), rows, chunks[c]);
  }
  finish_stats(chunks, stats);
  return compact(rows, loc.tessellation().vertices().size());
}

void compose_serial(const SparseRows& a, const SparseRows& b, LayerWeights& out) {
  out.rows = a.rows();
  out.cols = b.cols;
  out.values.assign(out.rows * out.cols, 0.0f);
  for (std::size_t r = 0; r < out.rows; ++r) compose_row(a, b, r, out.values.data() + r * out.cols);
}

void compose_omp(const SparseRows& a, const SparseRows& b, LayerWeights& out) {
  out.rows = a.rows();
  out.cols = b.cols;
  out.values.resize(out.rows * out.cols);
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(out.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    compose_row(a, b, static_cast<std::size_t>(r), out.values.data() + r * out.cols);
  }
}

void reconstruct_serial(const LayerWeights& w, const std::vector<Rgb>& colors, Image& out) {
  for (std::size_t i = 0; i < w.rows; ++i) reconstruct_pixel(w, colors, i, out);
}

void reconstruct_omp(const LayerWeights& w, const std::vector<Rgb>& colors, Image& out) {
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(w.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) reconstruct_pixel(w, colors, static_cast<std::size_t>(i), out);
}

}  // namespace rgbxy::kernels
