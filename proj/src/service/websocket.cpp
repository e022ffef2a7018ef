#include "pnet/service/websocket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <random>

#include "pnet/core/error.hpp"

namespace pnet::service {

namespace {

constexpr std::string_view kGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
constexpr std::size_t kMaxMessage = 64u << 20;
constexpr std::size_t kMaxHandshake = 16u << 10;

enum Opcode : std::uint8_t { Continuation = 0, Text = 1, Binary = 2, Close = 8, Ping = 9, Pong = 10 };

[[noreturn]] void io_error(const std::string& what) {
  throw Error(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

std::string base64(const unsigned char* data, std::size_t n) {
  std::string out(4 * ((n + 2) / 3), '\0');
  int len = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data, static_cast<int>(n));
  out.resize(static_cast<std::size_t>(len));
  return out;
}

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

/// Appends whatever arrives within `timeout_ms` (-1 waits forever). False on
/// EOF, error or timeout.
bool read_some(int fd, std::string& buf, int timeout_ms) {
  pollfd p{fd, POLLIN, 0};
  for (;;) {
    int r = ::poll(&p, 1, timeout_ms);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    break;
  }
  char chunk[16384];
  for (;;) {
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buf.append(chunk, static_cast<std::size_t>(n));
    return true;
  }
}

std::string encode_frame(std::uint8_t opcode, std::string_view payload, bool masked) {
  std::string out;
  out.push_back(static_cast<char>(0x80 | opcode));
  const std::uint8_t mask_bit = masked ? 0x80 : 0;
  const std::size_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(mask_bit | n));
  } else if (n <= 0xffff) {
    out.push_back(static_cast<char>(mask_bit | 126));
    out.push_back(static_cast<char>(n >> 8));
    out.push_back(static_cast<char>(n & 0xff));
  } else {
    out.push_back(static_cast<char>(mask_bit | 127));
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  }
  if (!masked) {
    out.append(payload);
    return out;
  }
  static thread_local std::mt19937 rng{std::random_device{}()};
  std::array<char, 4> key;
  for (char& c : key) c = static_cast<char>(rng() & 0xff);
  out.append(key.data(), 4);
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>(payload[i] ^ key[i % 4]));
  return out;
}

struct Frame {
  bool fin = true;
  std::uint8_t opcode = 0;
  std::string payload;
};

/// Pops one complete frame off the front of `buf`. Throws on oversize frames.
std::optional<Frame> take_frame(std::string& buf) {
  if (buf.size() < 2) return std::nullopt;
  const auto* p = reinterpret_cast<const std::uint8_t*>(buf.data());
  Frame f;
  f.fin = (p[0] & 0x80) != 0;
  f.opcode = p[0] & 0x0f;
  const bool masked = (p[1] & 0x80) != 0;
  std::uint64_t len = p[1] & 0x7f;
  std::size_t off = 2;
  if (len == 126) {
    if (buf.size() < 4) return std::nullopt;
    len = (std::uint64_t{p[2]} << 8) | p[3];
    off = 4;
  } else if (len == 127) {
    if (buf.size() < 10) return std::nullopt;
    len = 0;
    for (int i = 0; i < 8; ++i) len = (len << 8) | p[2 + i];
    off = 10;
  }
  if (len > kMaxMessage) throw Error(ErrorCode::IoError, "websocket frame too large");
  const std::size_t key_at = off;
  if (masked) off += 4;
  if (buf.size() < off + len) return std::nullopt;
  f.payload.assign(buf, off, static_cast<std::size_t>(len));
  if (masked) {
    for (std::size_t i = 0; i < f.payload.size(); ++i) f.payload[i] ^= buf[key_at + i % 4];
  }
  buf.erase(0, off + static_cast<std::size_t>(len));
  return f;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Header value by case-insensitive name, from a raw HTTP head.
std::optional<std::string> header(std::string_view head, std::string_view name) {
  std::string want = lower(name);
  std::size_t pos = head.find("\r\n");
  while (pos != std::string_view::npos && pos + 2 < head.size()) {
    std::size_t start = pos + 2;
    std::size_t end = head.find("\r\n", start);
    if (end == std::string_view::npos) end = head.size();
    std::string_view line = head.substr(start, end - start);
    std::size_t colon = line.find(':');
    if (colon != std::string_view::npos && lower(line.substr(0, colon)) == want) {
      std::string_view v = line.substr(colon + 1);
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
      while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
      return std::string(v);
    }
    pos = end;
  }
  return std::nullopt;
}

}  // namespace

std::string websocket_accept_key(std::string_view client_key) {
  std::string input(client_key);
  input += kGuid;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha1(), nullptr);
  return base64(digest, len);
}

struct WebSocketServer::Connection {
  int fd = -1;
  std::mutex send_mutex;
  std::thread thread;
  std::atomic<bool> done{false};

  bool send(std::uint8_t opcode, std::string_view payload) {
    std::lock_guard lock(send_mutex);
    return send_all(fd, encode_frame(opcode, payload, false));
  }
};

WebSocketServer::WebSocketServer(Session& session, std::string host, std::uint16_t port)
    : session_(session) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw Error(ErrorCode::IoError, "cannot resolve '" + host + "': " + gai_strerror(rc));
  }
  listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (listen_fd_ < 0) {
    ::freeaddrinfo(res);
    io_error("socket");
  }
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, res->ai_addr, res->ai_addrlen) != 0) {
    int saved = errno;
    ::freeaddrinfo(res);
    ::close(listen_fd_);
    errno = saved;
    io_error("cannot bind " + host + ":" + service);
  }
  ::freeaddrinfo(res);
  if (::listen(listen_fd_, 16) != 0) {
    ::close(listen_fd_);
    io_error("listen");
  }
  sockaddr_in bound{};
  socklen_t blen = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &blen);
  port_ = ntohs(bound.sin_port);
}

WebSocketServer::~WebSocketServer() { stop(); }

void WebSocketServer::start() {
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void WebSocketServer::run() { accept_loop(); }

void WebSocketServer::stop() {
  if (stopping_.exchange(true)) return;
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  if (accept_thread_.joinable()) accept_thread_.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
  std::list<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(conns_mutex_);
    conns.swap(conns_);
  }
  for (auto& c : conns) {
    ::shutdown(c->fd, SHUT_RDWR);
    if (c->thread.joinable()) c->thread.join();
  }
}

void WebSocketServer::accept_loop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    int r = ::poll(&p, 1, 200);
    if (stopping_) break;
    if (r <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    std::lock_guard lock(conns_mutex_);
    for (auto it = conns_.begin(); it != conns_.end();) {
      if ((*it)->done) {
        if ((*it)->thread.joinable()) (*it)->thread.join();
        it = conns_.erase(it);
      } else {
        ++it;
      }
    }
    conns_.push_back(conn);
    conn->thread = std::thread([this, conn] { serve(conn); });
  }
}

void WebSocketServer::serve(const std::shared_ptr<Connection>& conn) {
  std::string buf;
  Client client;
  client.send = [conn](const json& event) { conn->send(Text, event.dump()); };
  try {
    std::size_t head_end;
    while ((head_end = buf.find("\r\n\r\n")) == std::string::npos) {
      if (buf.size() > kMaxHandshake || !read_some(conn->fd, buf, 10000)) throw 0;
    }
    std::string head = buf.substr(0, head_end + 2);
    buf.erase(0, head_end + 4);
    auto key = header(head, "Sec-WebSocket-Key");
    auto upgrade = header(head, "Upgrade");
    if (head.rfind("GET ", 0) != 0 || !key || !upgrade || lower(*upgrade) != "websocket") {
      send_all(conn->fd,
               "HTTP/1.1 400 Bad Request\r\nContent-Type: text/plain\r\nContent-Length: 23\r\n"
               "Connection: close\r\n\r\nwebsocket upgrade only\n");
      throw 0;
    }
    std::string reply =
        "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
        "Sec-WebSocket-Accept: " + websocket_accept_key(*key) + "\r\n\r\n";
    if (!send_all(conn->fd, reply)) throw 0;

    std::string message;
    bool in_message = false;
    for (;;) {
      std::optional<Frame> f;
      while (!(f = take_frame(buf))) {
        if (!read_some(conn->fd, buf, -1)) throw 0;
      }
      if (f->opcode == Close) {
        conn->send(Close, f->payload.substr(0, 2));
        break;
      }
      if (f->opcode == Ping) {
        conn->send(Pong, f->payload);
        continue;
      }
      if (f->opcode == Pong) continue;
      if (f->opcode == Text || f->opcode == Binary) {
        message = std::move(f->payload);
        in_message = true;
      } else if (f->opcode == Continuation && in_message) {
        message += f->payload;
        if (message.size() > kMaxMessage) throw 0;
      } else {
        break;
      }
      if (!f->fin) continue;
      in_message = false;
      json response = session_.handle_text(message, &client);
      if (!conn->send(Text, response.dump())) break;
    }
  } catch (...) {
    // connection dropped or protocol violation; just close
  }
  if (client.subscription) session_.unsubscribe(*client.subscription);
  ::shutdown(conn->fd, SHUT_RDWR);
  {
    std::lock_guard lock(conn->send_mutex);
    ::close(conn->fd);
    conn->fd = -1;
  }
  conn->done = true;
}

WebSocketClient::~WebSocketClient() { close(); }

void WebSocketClient::connect(const std::string& host, std::uint16_t port,
                              const std::string& path) {
  close();
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw Error(ErrorCode::IoError, "cannot resolve '" + host + "': " + gai_strerror(rc));
  }
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    int saved = errno;
    ::freeaddrinfo(res);
    close();
    errno = saved;
    io_error("cannot connect to " + host + ":" + service);
  }
  ::freeaddrinfo(res);

  std::random_device rd;
  unsigned char nonce[16];
  for (auto& b : nonce) b = static_cast<unsigned char>(rd() & 0xff);
  std::string key = base64(nonce, sizeof nonce);
  std::string request = "GET " + path + " HTTP/1.1\r\nHost: " + host + ":" + service +
                        "\r\nUpgrade: websocket\r\nConnection: Upgrade\r\nSec-WebSocket-Key: " +
                        key + "\r\nSec-WebSocket-Version: 13\r\n\r\n";
  if (!send_all(fd_, request)) {
    close();
    throw Error(ErrorCode::IoError, "websocket handshake failed");
  }
  std::size_t head_end;
  buffer_.clear();
  while ((head_end = buffer_.find("\r\n\r\n")) == std::string::npos) {
    if (buffer_.size() > kMaxHandshake || !read_some(fd_, buffer_, 10000)) {
      close();
      throw Error(ErrorCode::IoError, "websocket handshake failed");
    }
  }
  std::string head = buffer_.substr(0, head_end + 2);
  buffer_.erase(0, head_end + 4);
  auto accept = header(head, "Sec-WebSocket-Accept");
  if (head.rfind("HTTP/1.1 101", 0) != 0 || !accept || *accept != websocket_accept_key(key)) {
    close();
    throw Error(ErrorCode::IoError, "websocket handshake rejected");
  }
}

void WebSocketClient::send_text(std::string_view text) {
  if (fd_ < 0 || !send_all(fd_, encode_frame(Text, text, true))) {
    throw Error(ErrorCode::IoError, "websocket not connected");
  }
}

std::optional<std::string> WebSocketClient::receive(std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string message;
  for (;;) {
    if (fd_ < 0) return std::nullopt;
    std::optional<Frame> f = take_frame(buffer_);
    if (!f) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0 || !read_some(fd_, buffer_, static_cast<int>(left.count()))) {
        return std::nullopt;
      }
      continue;
    }
    if (f->opcode == Ping) {
      send_all(fd_, encode_frame(Pong, f->payload, true));
      continue;
    }
    if (f->opcode == Close) {
      send_all(fd_, encode_frame(Close, {}, true));
      close();
      return std::nullopt;
    }
    if (f->opcode == Pong) continue;
    message += f->payload;
    if (f->fin) return message;
  }
}

void WebSocketClient::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
  }
  fd_ = -1;
}

}  // namespace pnet::service
