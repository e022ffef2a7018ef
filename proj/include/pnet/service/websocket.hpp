#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "pnet/service/session.hpp"

namespace pnet::service {

/// Sec-WebSocket-Accept value for a client key.
std::string websocket_accept_key(std::string_view client_key);

/// Text-frame WebSocket endpoint for a session. Each connection gets its own
/// reader thread; one JSON request per text message, responses and
/// subscribed events go back as text messages.
class WebSocketServer {
 public:
  /// Binds immediately; port 0 picks an ephemeral port. Throws IoError.
  WebSocketServer(Session& session, std::string host = "127.0.0.1", std::uint16_t port = 0);
  ~WebSocketServer();
  WebSocketServer(const WebSocketServer&) = delete;
  WebSocketServer& operator=(const WebSocketServer&) = delete;

  std::uint16_t port() const { return port_; }

  /// Accepts connections on a background thread.
  void start();
  /// Accepts on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Connection;
  void accept_loop();
  void serve(const std::shared_ptr<Connection>& conn);

  Session& session_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conns_mutex_;
  std::list<std::shared_ptr<Connection>> conns_;
};

/// Minimal blocking client, enough for tests and scripting.
class WebSocketClient {
 public:
  WebSocketClient() = default;
  ~WebSocketClient();
  WebSocketClient(const WebSocketClient&) = delete;
  WebSocketClient& operator=(const WebSocketClient&) = delete;

  /// Throws IoError on connection or handshake failure.
  void connect(const std::string& host, std::uint16_t port, const std::string& path = "/");
  void send_text(std::string_view text);
  /// Next text message; nullopt on timeout or closed connection.
  std::optional<std::string> receive(std::chrono::milliseconds timeout = std::chrono::seconds(10));
  void close();
  bool is_open() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace pnet::service
