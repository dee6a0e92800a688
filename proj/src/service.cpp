#include "rgbxy/service.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <set>
#include <thread>

#include <csignal>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "rgbxy/error.hpp"

namespace rgbxy {

using nlohmann::json;

namespace {

constexpr int kThumbnailEdge = 256;

/// Rejected request; `code` goes into the error frame.
struct RequestError : Error {
  RequestError(std::string code, const std::string& what) : Error(what), code(std::move(code)) {}
  std::string code;
};

Frame error_frame(const std::string& code, const std::string& message) {
  return Frame::text({{"type", "error"}, {"code", code}, {"message", message}});
}

template <class T>
T field(const json& msg, const char* key, T fallback) {
  if (!msg.contains(key) || msg[key].is_null()) return fallback;
  try {
    return msg[key].get<T>();
  } catch (const json::exception&) {
    throw RequestError("bad_request", std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T required(const json& msg, const char* key) {
  if (!msg.contains(key)) throw RequestError("bad_request", std::string("missing field '") + key + "'");
  return field<T>(msg, key, T{});
}

template <class Parse>
auto parse_name(const std::string& name, Parse parse) {
  try {
    return parse(name);
  } catch (const Error& e) {
    throw RequestError("bad_request", e.what());
  }
}

struct GateHold {
  explicit GateHold(PrecomputeGate& g) : gate(g) { gate.acquire(); }
  ~GateHold() { gate.release(); }
  GateHold(const GateHold&) = delete;
  GateHold& operator=(const GateHold&) = delete;
  PrecomputeGate& gate;
};

json with_type(json j, const char* type) {
  j["type"] = type;
  return j;
}

}  // namespace

Image preview_image(const Image& img, int max_edge) { return downscale(img, max_edge); }

Rgba8Image preview_layer(const Rgba8Image& layer, int max_edge) {
  const int long_edge = std::max(layer.width, layer.height);
  if (long_edge <= max_edge || max_edge <= 0) return layer;
  const double s = static_cast<double>(max_edge) / long_edge;
  Rgba8Image out;
  out.width = std::max(1, static_cast<int>(std::lround(layer.width * s)));
  out.height = std::max(1, static_cast<int>(std::lround(layer.height * s)));
  out.data.resize(static_cast<std::size_t>(out.width) * out.height * 4);
  for (int y = 0; y < out.height; ++y) {
    const int y0 = y * layer.height / out.height;
    const int y1 = std::max(y0 + 1, (y + 1) * layer.height / out.height);
    for (int x = 0; x < out.width; ++x) {
      const int x0 = x * layer.width / out.width;
      const int x1 = std::max(x0 + 1, (x + 1) * layer.width / out.width);
      unsigned acc[4] = {0, 0, 0, 0};
      for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) {
          const std::size_t i = (static_cast<std::size_t>(yy) * layer.width + xx) * 4;
          for (int k = 0; k < 4; ++k) acc[k] += layer.data[i + k];
        }
      }
      const unsigned n = static_cast<unsigned>((y1 - y0) * (x1 - x0));
      const std::size_t o = (static_cast<std::size_t>(y) * out.width + x) * 4;
      for (int k = 0; k < 4; ++k) out.data[o + k] = static_cast<std::uint8_t>((acc[k] + n / 2) / n);
    }
  }
  return out;
}

ProtocolHandler::ProtocolHandler(const ServiceOptions& opts, PrecomputeGate& gate) : opts_(opts), gate_(gate) {}

std::vector<Frame> ProtocolHandler::handle(const Frame& in) {
  try {
    if (in.binary) {
      if (!expect_png_) return {error_frame("unexpected_binary", "binary frame without a pending load")};
      expect_png_ = false;
      return load(in.data);
    }
    if (expect_png_) {
      expect_png_ = false;
      return {error_frame("bad_request", "load must be followed by a binary PNG frame")};
    }
    json msg;
    try {
      msg = json::parse(in.data);
    } catch (const json::parse_error& e) {
      return {error_frame("bad_json", e.what())};
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      return {error_frame("bad_request", "message needs a string 'type'")};
    }
    return dispatch(msg);
  } catch (const RequestError& e) {
    return {error_frame(e.code, e.what())};
  } catch (const FormatError& e) {
    return {error_frame("bad_request", e.what())};
  } catch (const Error& e) {
    return {error_frame("processing", e.what())};
  } catch (const std::exception& e) {
    return {error_frame("internal", e.what())};
  }
}

EditSession& ProtocolHandler::require_session() {
  if (!session_) throw RequestError("no_image", "load an image first");
  return *session_;
}

std::vector<Frame> ProtocolHandler::load(const std::string& png) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(png.data());
  Image img = decode_png({p, png.size()});
  if (img.pixel_count() > opts_.max_pixels) {
    throw RequestError("image_too_large", "image has " + std::to_string(img.pixel_count()) +
                                              " pixels; the limit is " + std::to_string(opts_.max_pixels));
  }
  DecompositionState state;
  {
    GateHold hold(gate_);
    state = precompute_rgbxy(img, opts_.decompose);
    ++precomputes_;
  }
  auto s = std::make_unique<EditSession>(std::move(img), std::move(state));
  const PaletteReport rep = s->auto_palette(opts_.palette);
  session_ = std::move(s);

  std::vector<Frame> out;
  out.push_back(Frame::text({{"type", "ready"},
                             {"palette", colors_json(session_->palette())},
                             {"q", session_->state().q()},
                             {"width", session_->image().width()},
                             {"height", session_->image().height()},
                             {"rmse", rep.rmse * 255.0}}));
  const std::vector<Rgba8Image> layers = session_->layers();
  out.push_back(Frame::text({{"type", "layers"}, {"count", layers.size()}, {"thumbnail", true}}));
  for (const auto& l : layers) out.push_back(Frame::bytes(encode_png(preview_layer(l, kThumbnailEdge), PngCompression::fast)));
  auto rest = palette_and_preview();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<Frame> ProtocolHandler::palette_and_preview() const {
  const Image preview = preview_image(session_->render(), opts_.preview_edge);
  return {Frame::text({{"type", "palette"},
                       {"colors", colors_json(session_->palette())},
                       {"weights", session_->color_weights()}}),
          Frame::text({{"type", "preview"}, {"width", preview.width()}, {"height", preview.height()}}),
          Frame::bytes(encode_png(preview, PngCompression::fast))};
}

std::vector<Frame> ProtocolHandler::layer_frames() const {
  const std::vector<Rgba8Image> layers = session_->layers();
  std::vector<Frame> out;
  out.push_back(Frame::text({{"type", "layers"}, {"count", layers.size()}, {"thumbnail", false}}));
  for (const auto& l : layers) {
    out.push_back(Frame::bytes(encode_png(preview_layer(l, opts_.preview_edge), PngCompression::fast)));
  }
  return out;
}

std::vector<Frame> ProtocolHandler::dispatch(const json& msg) {
  const std::string type = msg["type"].get<std::string>();
  if (type == "load") {
    expect_png_ = true;
    return {};
  }
  if (type == "debug") {
    json d{{"type", "debug"}, {"precomputes", precomputes_}};
    if (session_) d["q"] = session_->state().q();
    return {Frame::text(d)};
  }

  static const std::set<std::string> kKnown{"auto_palette", "set_palette", "add_color", "harmonize", "fit", "lc",
                                            "contrast", "transfer", "get_layers", "render"};
  if (!kKnown.contains(type)) throw RequestError("unknown_type", "unknown message type '" + type + "'");

  EditSession& s = require_session();

  if (type == "auto_palette") {
    PaletteOptions po = opts_.palette;
    po.rmse_tol = field<double>(msg, "rmse", po.rmse_tol * 255.0) / 255.0;
    if (!(po.rmse_tol >= 0.0)) throw RequestError("bad_request", "rmse must be non-negative");
    s.auto_palette(po);
    return palette_and_preview();
  }
  if (type == "set_palette") {
    s.set_palette(palette_from_colors_json(required<json>(msg, "colors")));
    return palette_and_preview();
  }
  if (type == "add_color") {
    Palette p = s.base_palette();
    p.colors.push_back(palette_from_colors_json(json::array({required<json>(msg, "rgb")})).colors.front());
    s.set_palette(std::move(p));
    return palette_and_preview();
  }

  const std::vector<double> w = s.color_weights();
  if (type == "harmonize") {
    const std::string kind = field<std::string>(msg, "kind", "auto");
    HarmonizeSpec spec;
    if (kind != "auto") spec.kind = parse_name(kind, template_kind_from_string);
    spec.beta = field<double>(msg, "beta", 1.0);
    const PaletteEdit e = harmonize_edit(s.base_palette(), w, spec);
    s.show(e.palette);
    json fr = e.report["template"];
    fr["type"] = "fit_report";
    fr["D"] = e.report["D"];
    std::vector<Frame> out{Frame::text(fr)};
    auto rest = palette_and_preview();
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
  if (type == "fit") {
    std::vector<TemplateKind> kinds(kAllTemplateKinds.begin(), kAllTemplateKinds.end());
    if (msg.contains("kinds") && !msg["kinds"].is_null()) {
      kinds.clear();
      for (const auto& k : required<std::vector<std::string>>(msg, "kinds")) {
        kinds.push_back(parse_name(k, template_kind_from_string));
      }
      if (kinds.empty()) throw RequestError("bad_request", "kinds is empty");
    }
    const TemplateFit f = fit_palette(s.base_palette(), w, kinds);
    return {Frame::text({{"type", "fit_report"},
                         {"kind", std::string(to_string(f.tmpl.kind))},
                         {"alpha1", f.tmpl.alpha1},
                         {"alpha2", f.tmpl.alpha2},
                         {"D", f.distance}})};
  }

  PaletteEdit e;
  const char* report_type = nullptr;
  if (type == "lc") {
    const std::string kind = field<std::string>(msg, "kind", "auto");
    std::optional<LcKind> k;
    if (kind != "auto") k = parse_name(kind, lc_kind_from_string);
    e = lc_edit(s.base_palette(), w, k, field<bool>(msg, "per_axis", false));
    report_type = "lc_report";
  } else if (type == "contrast") {
    const ContrastKind k = parse_name(required<std::string>(msg, "kind"), contrast_kind_from_string);
    e = contrast_edit(s.base_palette(), w, k, field<double>(msg, "beta", 1.0));
    report_type = "contrast_report";
  } else if (type == "transfer") {
    const TransferMode mode = parse_name(field<std::string>(msg, "mode", "transfer"), transfer_mode_from_string);
    const Palette ref = palette_from_colors_json(required<json>(msg, "ref_palette"));
    if (ref.size() == 0) throw RequestError("bad_request", "ref_palette is empty");
    std::vector<double> rw = field<std::vector<double>>(msg, "ref_weights", uniform_weights(ref.size()));
    if (rw.size() != ref.size()) throw RequestError("bad_request", "ref_weights size differs from ref_palette");
    e = transfer_edit(s.base_palette(), w, ref, rw, mode);
    report_type = "transfer_report";
  } else if (type == "get_layers") {
    return layer_frames();
  } else if (type == "render") {
    const Image full = s.render();
    return {Frame::text({{"type", "render"}, {"width", full.width()}, {"height", full.height()}}),
            Frame::bytes(encode_png(full))};
  } else {
    throw RequestError("unknown_type", "unknown message type '" + type + "'");
  }
  s.show(e.palette);
  std::vector<Frame> out{Frame::text(with_type(e.report, report_type))};
  auto rest = palette_and_preview();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// ---- transport ----

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct Server::Impl {
  struct Connection {
    std::shared_ptr<websocket::stream<tcp::socket>> ws;
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  explicit Impl(ServiceOptions o)
      : opts(std::move(o)), gate(std::clamp(opts.max_precomputes, 1, 64)), acceptor(ioc) {}

  void accept_next() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket sock) {
      if (ec) return;  // acceptor closed
      reap();
      auto ws = std::make_shared<websocket::stream<tcp::socket>>(std::move(sock));
      auto done = std::make_shared<std::atomic<bool>>(false);
      std::lock_guard lock(mu);
      conns.push_back({ws, std::thread([this, ws, done] {
                         serve(*ws);
                         done->store(true);
                       }),
                       done});
      accept_next();
    });
  }

  void serve(websocket::stream<tcp::socket>& ws) {
    beast::error_code ec;
    ws.read_message_max(512u << 20);
    ws.accept(ec);
    if (ec) return;
    ProtocolHandler handler(opts, gate);
    beast::flat_buffer buf;
    for (;;) {
      buf.clear();
      ws.read(buf, ec);
      if (ec) return;
      const Frame in{!ws.got_text(), beast::buffers_to_string(buf.data())};
      for (const Frame& out : handler.handle(in)) {
        ws.binary(out.binary);
        ws.write(net::buffer(out.data), ec);
        if (ec) return;
      }
    }
  }

  void reap() {
    std::lock_guard lock(mu);
    for (auto it = conns.begin(); it != conns.end();) {
      if (it->done->load()) {
        it->thread.join();
        it = conns.erase(it);
      } else {
        ++it;
      }
    }
  }

  ServiceOptions opts;
  PrecomputeGate gate;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::signal_set signals{ioc, SIGINT, SIGTERM};
  std::thread io_thread;
  std::mutex mu;
  std::list<Connection> conns;
  bool stopped = false;
};

Server::Server(ServiceOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  const tcp::endpoint ep(net::ip::make_address(impl_->opts.host), impl_->opts.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  impl_->accept_next();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
  return impl_->acceptor.local_endpoint().port();
}

void Server::stop_on_signals() {
  impl_->signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
}

void Server::wait() {
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
}

void Server::stop() {
  if (impl_->stopped) return;
  impl_->stopped = true;
  impl_->ioc.stop();
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
  beast::error_code ec;
  impl_->acceptor.close(ec);
  std::lock_guard lock(impl_->mu);
  for (auto& c : impl_->conns) {
    beast::error_code ec;
    beast::get_lowest_layer(*c.ws).shutdown(tcp::socket::shutdown_both, ec);
  }
  for (auto& c : impl_->conns) c.thread.join();
  impl_->conns.clear();
}

}  // namespace rgbxy
