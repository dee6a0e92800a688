#pragma once

// Interactive editing service: one EditSession per websocket connection.
//
// Client text frames are JSON objects with a "type" field. A `load` frame is
// followed by one binary frame holding the PNG. Server replies are JSON text
// frames; `preview`, `render` and `layers` headers are followed by their PNG
// binary frames (one, one and `count` respectively).

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "json.hpp"
#include "rgbxy/session.hpp"

namespace rgbxy {

struct Frame {
  bool binary = false;
  std::string data;

  static Frame text(const nlohmann::json& j) { return {false, j.dump()}; }
  static Frame bytes(const std::vector<std::uint8_t>& b) { return {true, std::string(b.begin(), b.end())}; }
  nlohmann::json json() const { return nlohmann::json::parse(data); }
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 9800;
  std::size_t max_pixels = 6'000'000;
  int max_precomputes = 1;  // concurrent precomputes across sessions
  int preview_edge = 1024;
  DecomposeOptions decompose;
  PaletteOptions palette;
};

/// Caps how many sessions precompute at once.
using PrecomputeGate = std::counting_semaphore<64>;

/// Protocol state machine for one connection, independent of the transport.
/// Messages are handled strictly in arrival order.
class ProtocolHandler {
 public:
  ProtocolHandler(const ServiceOptions& opts, PrecomputeGate& gate);

  std::vector<Frame> handle(const Frame& in);

  /// Number of RGBXY precomputes this session has run.
  std::size_t precomputes() const { return precomputes_; }
  const EditSession* session() const { return session_.get(); }

 private:
  std::vector<Frame> dispatch(const nlohmann::json& msg);
  std::vector<Frame> load(const std::string& png);
  std::vector<Frame> palette_and_preview() const;
  std::vector<Frame> layer_frames() const;
  EditSession& require_session();

  const ServiceOptions& opts_;
  PrecomputeGate& gate_;
  std::unique_ptr<EditSession> session_;
  bool expect_png_ = false;
  std::size_t precomputes_ = 0;
};

/// Downscales to the preview edge, leaving smaller images untouched.
Image preview_image(const Image& img, int max_edge);
Rgba8Image preview_layer(const Rgba8Image& layer, int max_edge);

/// Websocket server. Connections are served on their own threads.
class Server {
 public:
  explicit Server(ServiceOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting; returns the bound port (useful with port 0).
  unsigned short start();
  /// SIGINT or SIGTERM ends wait().
  void stop_on_signals();
  /// Blocks until the server stops.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rgbxy
