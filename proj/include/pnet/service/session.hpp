#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pnet/pnsl/interp.hpp"
#include "pnet/pnsl/workspace.hpp"

namespace pnet::service {

using json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;

enum class EventKind : std::uint8_t { ModelChanged, SimProgress, SimFinished, SimFailed };

std::string_view event_name(EventKind kind);
std::optional<EventKind> parse_event(std::string_view text);

using EventSink = std::function<void(const json& event)>;
using SubscriptionId = std::uint64_t;

/// Per-connection state for streaming transports.
struct Client {
  EventSink send;
  std::optional<SubscriptionId> subscription;
};

struct SessionOptions {
  std::filesystem::path base_dir = ".";
  std::vector<std::filesystem::path> library_dirs;
  pnsl::Limits limits;
};

/// Single-document session. Requests are applied one at a time in a total
/// order; the session revision advances by the number of atomic model
/// mutations each request performed.
///
///   request  {"id": any, "verb": "...", "payload": {...}}
///   response {"type": "response", "id": same, "ok": true, "payload": {...}}
///            {"type": "response", "id": same, "ok": false,
///             "error": {"code", "message", "line"?, "column"?, "cause"?}}
///   event    {"type": "event", "event": kind, "revision": n, "payload": {...}}
class Session {
 public:
  explicit Session(SessionOptions options = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Never throws; failures become error responses. "subscribe" and
  /// "unsubscribe" need a client.
  json handle(const json& request, Client* client = nullptr);
  /// Parses one JSON text first (ParseError response on failure).
  json handle_text(std::string_view text, Client* client = nullptr);

  /// Events are queued per subscriber and delivered in publication order
  /// on a dedicated thread; a slow or failing sink never stalls the session.
  /// An empty kind list subscribes to every kind.
  SubscriptionId subscribe(std::vector<EventKind> kinds, EventSink sink);
  void unsubscribe(SubscriptionId id);

  std::uint64_t revision() const { return revision_.load(); }
  bool simulation_running() const { return running_.load(); }
  /// Blocks until no simulation is in flight and queued events are delivered.
  void wait_idle();

  /// Runs `fn` with the document locked.
  void with_workspace(const std::function<void(pnsl::Workspace&)>& fn);

 private:
  struct Subscriber;

  json dispatch(const std::string& verb, const json& payload, Client* client);
  void publish(EventKind kind, json payload);
  void note_mutations(const std::string& verb, std::uint64_t before, std::uint64_t generation);
  json start_simulation(const json& payload);
  void drain_events();

  json verb_model_load(const json& p);
  json verb_model_save(const json& p);
  json verb_edit_apply(const json& p);
  json verb_script_run(const json& p);
  json verb_result_wave(const json& p);
  json verb_result_trace(const json& p);
  json verb_info_stats();

  SessionOptions options_;
  std::mutex doc_mutex_;
  pnsl::Workspace ws_;
  std::unique_ptr<pnsl::Interpreter> interp_;
  std::string script_output_;
  std::atomic<std::uint64_t> revision_{0};

  std::atomic<bool> running_{false};
  std::atomic<bool> cancel_{false};
  std::thread sim_thread_;
  std::mutex sim_mutex_;
  std::condition_variable sim_done_;

  std::mutex subs_mutex_;
  std::vector<std::shared_ptr<Subscriber>> subs_;
  SubscriptionId next_sub_ = 1;
};

/// Batch transport: one JSON request per input line, one JSON message per
/// output line (responses and subscribed events, serialized). At end of
/// input waits for a running simulation before returning. Returns the number
/// of error responses.
int serve_stdio(Session& session, std::istream& in, std::ostream& out);

}  // namespace pnet::service
