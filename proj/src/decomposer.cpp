#include "rgbxy/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <functional>
#include <memory>
#include <numeric>

#include "json.hpp"

#include "rgbxy/error.hpp"
#include "rgbxy/geom/distance.hpp"
#include "rgbxy/geom/hull.hpp"
#include "rgbxy/geom/tessellation.hpp"
#include "rgbxy/kernels.hpp"

namespace rgbxy {

namespace {

using nlohmann::json;

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void append_f32(std::vector<std::uint8_t>& out, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  append_u32(out, v);
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float read_f32(const std::uint8_t* p) {
  const std::uint32_t v = read_u32(p);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

std::vector<std::uint8_t> with_header(const json& header, std::size_t triplets) {
  const std::string h = header.dump() + "\n";
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.reserve(out.size() + 12 * triplets);
  return out;
}

struct Container {
  json header;
  const std::uint8_t* body = nullptr;
  std::size_t body_size = 0;
};

Container split_container(std::span<const std::uint8_t> bytes) {
  const auto nl = std::find(bytes.begin(), bytes.end(), std::uint8_t{'\n'});
  if (nl == bytes.end()) throw FormatError("weights file: missing header line");
  Container c;
  try {
    c.header = json::parse(std::string(bytes.begin(), nl));
  } catch (const json::exception& e) {
    throw FormatError(std::string("weights file header: ") + e.what());
  }
  c.body = &*nl + 1;
  c.body_size = static_cast<std::size_t>(bytes.end() - nl - 1);
  return c;
}

template <typename T>
T header_field(const json& h, const char* key) {
  if (!h.contains(key)) throw FormatError(std::string("weights file header: missing ") + key);
  try {
    return h.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("weights file header: bad ") + key);
  }
}

// Palette hull in its own affine frame plus a star tessellation at the
// darkest hull vertex.
struct PaletteGeometry {
  geom::ReducedHull reduced;
  geom::SimplicialTessellation tess;
  std::vector<std::uint32_t> palette_index;  // hull vertex -> palette index
};

PaletteGeometry palette_geometry(const Palette& pal) {
  if (pal.size() == 0) throw Error("palette is empty");
  geom::PointSet pts(3);
  for (const auto& c : pal.colors) {
    const double p[3] = {c.r, c.g, c.b};
    pts.push_back(p);
  }
  PaletteGeometry g;
  g.reduced = geom::reduced_convex_hull(pts);
  const auto& hull = g.reduced.hull;
  for (std::size_t s : hull.source) g.palette_index.push_back(static_cast<std::uint32_t>(s));
  if (g.reduced.frame.rank() == 0) return g;

  int star = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < hull.vertex_count(); ++v) {
    const double l = rgb_to_lab(pal.colors[hull.source[v]]).L;
    if (l < best) {
      best = l;
      star = static_cast<int>(v);
    }
  }
  g.tess = geom::star_tessellate(hull, star);
  return g;
}

// Delaunay of the hull vertices. On near-degenerate clouds where it breaks
// down, the hull is starred from the vertex nearest its centroid instead:
// still a valid tessellation, with less local weights.
geom::SimplicialTessellation tessellate_rgbxy(const geom::HullMesh& hull, bool* fallback) {
  try {
    return geom::delaunay_tessellate(hull.vertices);
  } catch (const NumericalBreakdown&) {
    *fallback = true;
  }
  const int d = hull.dim;
  const std::size_t q = hull.vertex_count();
  geom::Vec mean{};
  for (std::size_t v = 0; v < q; ++v)
    for (int k = 0; k < d; ++k) mean[k] += hull.vertices[v][k] / static_cast<double>(q);
  int star = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < q; ++v) {
    double dist = 0.0;
    for (int k = 0; k < d; ++k) dist += (hull.vertices[v][k] - mean[k]) * (hull.vertices[v][k] - mean[k]);
    if (dist < best) {
      best = dist;
      star = static_cast<int>(v);
    }
  }
  return geom::star_tessellate(hull, star);
}

// Closest point of the reduced palette hull to a local-frame point.
geom::Vec clamp_to_hull(const geom::HullMesh& hull, const geom::Vec& local) {
  const int d = hull.dim;
  if (d == 1) {
    double lo = hull.vertices[0][0], hi = lo;
    for (std::size_t v = 1; v < hull.vertex_count(); ++v) {
      lo = std::min(lo, hull.vertices[v][0]);
      hi = std::max(hi, hull.vertices[v][0]);
    }
    geom::Vec out{};
    out[0] = std::clamp(local[0], lo, hi);
    return out;
  }
  return geom::distance_to_hull(hull, std::span<const double>(local.data(), d)).closest;
}

void weights_row(const PaletteGeometry& g, const geom::PointLocator* loc, const Rgb& c,
                 std::vector<std::pair<std::uint32_t, float>>& row) {
  row.clear();
  const int k = g.reduced.frame.rank();
  if (k == 0) {
    row.emplace_back(g.palette_index[0], 1.0f);
    return;
  }
  const double p[3] = {c.r, c.g, c.b};
  geom::Vec local = g.reduced.frame.to_local(p);
  std::span<const double> q(local.data(), static_cast<std::size_t>(k));
  geom::Location l = loc->locate(q);
  if (!l.inside) {
    local = clamp_to_hull(g.reduced.hull, local);
    l = loc->locate(q);
  }
  const geom::SparseWeights w = geom::to_weights(g.tess, l);
  for (int j = 0; j < w.count; ++j) {
    row.emplace_back(g.palette_index[w.index[j]], static_cast<float>(w.weight[j]));
  }
  std::sort(row.begin(), row.end());
}

SparseRows weights_for_colors(const Palette& pal, std::size_t n,
                              const std::function<Rgb(std::size_t)>& color) {
  const PaletteGeometry g = palette_geometry(pal);
  std::unique_ptr<geom::PointLocator> loc;
  if (g.reduced.frame.rank() > 0) loc = std::make_unique<geom::PointLocator>(g.tess);

  std::vector<std::vector<std::pair<std::uint32_t, float>>> rows(n);
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) weights_row(g, loc.get(), color(i), rows[i]);

  SparseRows out;
  out.cols = pal.size();
  out.offsets.assign(1, 0);
  for (const auto& r : rows) {
    for (const auto& [c, v] : r) {
      out.indices.push_back(c);
      out.values.push_back(v);
    }
    out.offsets.push_back(static_cast<std::uint32_t>(out.indices.size()));
  }
  return out;
}

}  // namespace

std::vector<double> LayerWeights::column_means() const {
  std::vector<double> m(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m[c] += values[r * cols + c];
  }
  if (rows > 0) {
    for (auto& v : m) v /= static_cast<double>(rows);
  }
  return m;
}

void rgbxy_point(const Image& img, std::size_t i, double xy_scale, double* out) {
  const double extent = static_cast<double>(std::max(img.width(), img.height()));
  const Rgb c = img.pixel(i);
  out[0] = c.r;
  out[1] = c.g;
  out[2] = c.b;
  out[3] = xy_scale * static_cast<double>(i % img.width()) / extent;
  out[4] = xy_scale * static_cast<double>(i / img.width()) / extent;
}

DecompositionState precompute_rgbxy(const Image& img, const DecomposeOptions& opts,
                                    PrecomputeReport* report) {
  if (img.empty()) throw Error("precompute: empty image");
  if (!(opts.xy_scale >= 0.0) || !std::isfinite(opts.xy_scale)) {
    throw Error("precompute: xy_scale must be finite and non-negative");
  }
  const std::size_t n = img.pixel_count();
  geom::PointSet pts(5);
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p[5];
    rgbxy_point(img, i, opts.xy_scale, p);
    pts.push_back(p);
  }

  const geom::ReducedHull rh = geom::reduced_convex_hull(pts);
  const int rank = rh.frame.rank();

  DecompositionState state;
  state.width = img.width();
  state.height = img.height();
  state.xy_scale = opts.xy_scale;
  for (std::size_t s : rh.hull.source) state.vertices.push_back(pts[s]);

  PrecomputeReport rep;
  rep.rank = rank;
  if (rank == 0) {
    state.w_rgbxy.cols = 1;
    state.w_rgbxy.offsets.resize(n + 1);
    std::iota(state.w_rgbxy.offsets.begin(), state.w_rgbxy.offsets.end(), 0u);
    state.w_rgbxy.indices.assign(n, 0);
    state.w_rgbxy.values.assign(n, 1.0f);
  } else {
    const geom::SimplicialTessellation tess = tessellate_rgbxy(rh.hull, &rep.star_fallback);
    const geom::PointLocator loc(tess);
    kernels::LocateStats stats;
    state.w_rgbxy = kernels::locate_omp(
        loc, n,
        [&](std::size_t i, double* out) {
          const geom::Vec l = rh.frame.to_local(pts[i]);
          std::copy(l.begin(), l.begin() + rank, out);
        },
        &stats);
    rep.simplices = tess.simplex_count();
    rep.outside = stats.outside;
    rep.worst_bary = stats.worst_bary;
  }
  if (report) *report = rep;
  return state;
}

SparseRows palette_weights(const Palette& pal, std::span<const Rgb> colors) {
  return weights_for_colors(pal, colors.size(), [&](std::size_t i) { return colors[i]; });
}

SparseRows compute_w_rgb(const Palette& pal, const DecompositionState& state) {
  return weights_for_colors(pal, state.q(), [&](std::size_t i) {
    const auto v = state.vertices[i];
    return Rgb{v[0], v[1], v[2]};
  });
}

LayerWeights compose_weights(const DecompositionState& state, const SparseRows& w_rgb) {
  if (w_rgb.rows() != state.q()) throw Error("compose: W_RGB rows must match Q");
  LayerWeights w;
  kernels::compose_omp(state.w_rgbxy, w_rgb, w);
  return w;
}

LayerWeights relayer(const DecompositionState& state, const Palette& pal) {
  return compose_weights(state, compute_w_rgb(pal, state));
}

Image reconstruct(const LayerWeights& w, const Palette& pal, int width, int height) {
  if (w.cols != pal.size()) throw Error("reconstruct: palette size does not match weights");
  if (w.rows != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error("reconstruct: weights do not match image size");
  }
  Image out(width, height);
  kernels::reconstruct_omp(w, pal.colors, out);
  return out;
}

std::vector<Rgba8Image> export_layers(const LayerWeights& w, const Palette& pal, int width,
                                      int height) {
  if (w.cols != pal.size()) throw Error("export_layers: palette size does not match weights");
  const std::size_t n = w.rows;
  const std::size_t p = w.cols;
  std::vector<Rgba8Image> layers(p);
  for (std::size_t c = 0; c < p; ++c) {
    layers[c].width = width;
    layers[c].height = height;
    layers[c].data.resize(4 * n);
  }
  std::vector<std::uint8_t> rgb(3 * p);
  for (std::size_t c = 0; c < p; ++c) {
    const Rgb k = clamp_unit(pal.colors[c]);
    rgb[3 * c] = static_cast<std::uint8_t>(std::lround(k.r * 255.0));
    rgb[3 * c + 1] = static_cast<std::uint8_t>(std::lround(k.g * 255.0));
    rgb[3 * c + 2] = static_cast<std::uint8_t>(std::lround(k.b * 255.0));
  }
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    std::vector<int> alpha(p);
    std::vector<double> frac(p);
    std::vector<std::size_t> order(p);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
      const auto row = w.row(static_cast<std::size_t>(i));
      double total = 0.0;
      for (std::size_t c = 0; c < p; ++c) total += std::max(0.0f, row[c]);
      int used = 0;
      for (std::size_t c = 0; c < p; ++c) {
        const double a = total > 0.0 ? 255.0 * std::max(0.0f, row[c]) / total : 0.0;
        alpha[c] = static_cast<int>(std::floor(a));
        frac[c] = a - alpha[c];
        used += alpha[c];
      }
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
      for (std::size_t k = 0; total > 0.0 && used < 255 && k < p; ++k, ++used) ++alpha[order[k]];
      for (std::size_t c = 0; c < p; ++c) {
        auto* px = layers[c].data.data() + 4 * static_cast<std::size_t>(i);
        px[0] = rgb[3 * c];
        px[1] = rgb[3 * c + 1];
        px[2] = rgb[3 * c + 2];
        px[3] = static_cast<std::uint8_t>(alpha[c]);
      }
    }
  }
  return layers;
}

std::vector<std::uint8_t> serialize_state(const DecompositionState& state) {
  json h;
  h["kind"] = "rgbxy_state";
  h["dims"] = {state.width, state.height};
  h["N"] = state.pixel_count();
  h["Q"] = state.q();
  h["nnz"] = state.w_rgbxy.nnz();
  h["xy_scale"] = state.xy_scale;
  json verts = json::array();
  for (std::size_t v = 0; v < state.q(); ++v) {
    const auto p = state.vertices[v];
    verts.push_back({p[0], p[1], p[2], p[3], p[4]});
  }
  h["vertices"] = std::move(verts);
  auto out = with_header(h, state.w_rgbxy.nnz());
  const auto& w = state.w_rgbxy;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t k = w.offsets[r]; k < w.offsets[r + 1]; ++k) {
      append_u32(out, static_cast<std::uint32_t>(r));
      append_u32(out, w.indices[k]);
      append_f32(out, w.values[k]);
    }
  }
  return out;
}

DecompositionState deserialize_state(std::span<const std::uint8_t> bytes) {
  const Container c = split_container(bytes);
  if (header_field<std::string>(c.header, "kind") != "rgbxy_state") {
    throw FormatError("not a decomposition state file");
  }
  DecompositionState s;
  const auto dims = header_field<std::vector<int>>(c.header, "dims");
  if (dims.size() != 2 || dims[0] <= 0 || dims[1] <= 0) throw FormatError("state: bad dims");
  s.width = dims[0];
  s.height = dims[1];
  s.xy_scale = header_field<double>(c.header, "xy_scale");
  const auto n = header_field<std::size_t>(c.header, "N");
  const auto q = header_field<std::size_t>(c.header, "Q");
  const auto nnz = header_field<std::size_t>(c.header, "nnz");
  if (n != static_cast<std::size_t>(s.width) * static_cast<std::size_t>(s.height)) {
    throw FormatError("state: N does not match dims");
  }
  const auto verts = header_field<std::vector<std::vector<double>>>(c.header, "vertices");
  if (verts.size() != q) throw FormatError("state: vertex count does not match Q");
  for (const auto& v : verts) {
    if (v.size() != 5) throw FormatError("state: vertices must have 5 coordinates");
    s.vertices.push_back(v);
  }
  if (c.body_size != 12 * nnz) throw FormatError("state: body size does not match nnz");
  s.w_rgbxy.cols = q;
  s.w_rgbxy.offsets.assign(n + 1, 0);
  s.w_rgbxy.indices.resize(nnz);
  s.w_rgbxy.values.resize(nnz);
  std::size_t prev_row = 0;
  for (std::size_t k = 0; k < nnz; ++k) {
    const std::uint8_t* p = c.body + 12 * k;
    const std::uint32_t row = read_u32(p);
    const std::uint32_t col = read_u32(p + 4);
    if (row >= n || col >= q || row < prev_row) throw FormatError("state: bad triplet");
    prev_row = row;
    ++s.w_rgbxy.offsets[row + 1];
    s.w_rgbxy.indices[k] = col;
    s.w_rgbxy.values[k] = read_f32(p + 8);
  }
  for (std::size_t r = 0; r < n; ++r) s.w_rgbxy.offsets[r + 1] += s.w_rgbxy.offsets[r];
  return s;
}

std::vector<std::uint8_t> serialize_weights(const LayerWeights& w, int width, int height) {
  std::size_t nnz = 0;
  for (float v : w.values) nnz += v != 0.0f;
  json h;
  h["kind"] = "layer_weights";
  h["dims"] = {width, height};
  h["N"] = w.rows;
  h["P"] = w.cols;
  h["nnz"] = nnz;
  auto out = with_header(h, nnz);
  for (std::size_t r = 0; r < w.rows; ++r) {
    for (std::size_t c = 0; c < w.cols; ++c) {
      const float v = w.values[r * w.cols + c];
      if (v == 0.0f) continue;
      append_u32(out, static_cast<std::uint32_t>(r));
      append_u32(out, static_cast<std::uint32_t>(c));
      append_f32(out, v);
    }
  }
  return out;
}

LayerWeights deserialize_weights(std::span<const std::uint8_t> bytes) {
  const Container c = split_container(bytes);
  if (header_field<std::string>(c.header, "kind") != "layer_weights") {
    throw FormatError("not a layer weights file");
  }
  LayerWeights w;
  w.rows = header_field<std::size_t>(c.header, "N");
  w.cols = header_field<std::size_t>(c.header, "P");
  const auto nnz = header_field<std::size_t>(c.header, "nnz");
  if (c.body_size != 12 * nnz) throw FormatError("weights: body size does not match nnz");
  w.values.assign(w.rows * w.cols, 0.0f);
  for (std::size_t k = 0; k < nnz; ++k) {
    const std::uint8_t* p = c.body + 12 * k;
    const std::uint32_t row = read_u32(p);
    const std::uint32_t col = read_u32(p + 4);
    if (row >= w.rows || col >= w.cols) throw FormatError("weights: bad triplet");
    w.values[row * w.cols + col] = read_f32(p + 8);
  }
  return w;
}

}  // namespace rgbxy
