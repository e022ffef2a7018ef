#include "pnet/service/session.hpp"

#include <chrono>
#include <deque>

#include "pnet/io/document.hpp"
#include "pnet/io/wav.hpp"
#include "pnet/sim/program.hpp"

namespace pnet::service {

namespace {

constexpr std::string_view kEventNames[] = {"model-changed", "sim-progress", "sim-finished",
                                            "sim-failed"};

[[noreturn]] void bad_payload(const std::string& what) {
  throw Error(ErrorCode::BadPayload, what);
}

const json& need(const json& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end()) bad_payload(std::string("payload needs '") + key + "'");
  return *it;
}

std::string need_string(const json& p, const char* key) {
  const json& v = need(p, key);
  if (!v.is_string()) bad_payload(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

double need_number(const json& p, const char* key) {
  const json& v = need(p, key);
  if (!v.is_number()) bad_payload(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

// Literal JSON built in code holds signed integers; parsed text holds unsigned.
bool is_id(const json& v) { return v.is_number_integer() && v.get<std::int64_t>() > 0; }

ModuleId need_id(const json& p, const char* key) {
  const json& v = need(p, key);
  if (!is_id(v)) bad_payload(std::string("'") + key + "' must be a module id");
  return ModuleId{v.get<std::uint64_t>()};
}

std::uint64_t opt_count(const json& p, const char* key, std::uint64_t fallback) {
  auto it = p.find(key);
  if (it == p.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
    bad_payload(std::string("'") + key + "' must be a count");
  }
  return it->get<std::uint64_t>();
}

json ids_json(std::span<const ModuleId> ids) {
  json out = json::array();
  for (ModuleId id : ids) out.push_back(to_u64(id));
  return out;
}

ModuleSet targets(const Model& model, const json& p) {
  const json& t = need(p, "targets");
  if (t.is_string()) return model.pick(t.get<std::string>());
  if (!t.is_array()) bad_payload("'targets' must be a picker or a list of ids");
  ModuleSet out;
  for (const auto& v : t) {
    if (!is_id(v)) bad_payload("'targets' must hold module ids");
    out.push_back(ModuleId{v.get<std::uint64_t>()});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

json error_json(const Error& e) {
  json err{{"code", std::string(error_name(e.code()))}, {"message", e.what()}};
  if (e.pos()) {
    err["line"] = e.pos()->line;
    err["column"] = e.pos()->column;
  }
  if (e.cause()) err["cause"] = std::string(error_name(*e.cause()));
  return err;
}

json stats_json(const sim::RunResult& r) {
  json channels = json::array();
  for (std::size_t i = 0; i < r.channels.size(); ++i) {
    channels.push_back(json{{"id", to_u64(r.channels[i].source)},
                            {"kind", std::string(kind_name(r.channels[i].kind))},
                            {"peak", i < r.stats.peak.size() ? r.stats.peak[i] : 0.0}});
  }
  std::string_view status = r.status == sim::RunStatus::Completed ? "completed"
                            : r.status == sim::RunStatus::Failed  ? "failed"
                                                                  : "cancelled";
  return json{{"status", status},
              {"steps", r.stats.steps},
              {"wall_seconds", r.stats.wall_seconds},
              {"steps_per_sec", r.stats.steps_per_sec},
              {"channels", channels},
              {"frames", r.trace.frame_count()}};
}

}  // namespace

std::string_view event_name(EventKind kind) { return kEventNames[static_cast<int>(kind)]; }

std::optional<EventKind> parse_event(std::string_view text) {
  for (int i = 0; i < 4; ++i) {
    if (kEventNames[i] == text) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

struct Session::Subscriber {
  SubscriptionId id = 0;
  bool kinds[4] = {false, false, false, false};
  EventSink sink;
  std::mutex m;
  std::condition_variable cv;
  std::deque<json> queue;
  bool busy = false;
  bool stop = false;
  std::thread thread;

  void loop() {
    std::unique_lock lock(m);
    for (;;) {
      cv.wait(lock, [&] { return stop || !queue.empty(); });
      if (stop) return;
      json ev = std::move(queue.front());
      queue.pop_front();
      busy = true;
      lock.unlock();
      try {
        sink(ev);
      } catch (...) {
        // a broken sink only loses its own events
      }
      lock.lock();
      busy = false;
      cv.notify_all();
    }
  }
};

Session::Session(SessionOptions options) : options_(std::move(options)) {
  ws_.base_dir = options_.base_dir;
  auto dirs = options_.library_dirs;
  if (dirs.empty()) dirs.push_back(pnsl::default_library_dir());
  ws_.library = pnsl::scan_library(dirs);
  ws_.print = [this](std::string_view text) { script_output_ += text; };
  ws_.cancel = &cancel_;
  interp_ = std::make_unique<pnsl::Interpreter>(options_.limits);
  pnsl::install_standard_packages(*interp_, ws_);
}

Session::~Session() {
  cancel_ = true;
  if (sim_thread_.joinable()) sim_thread_.join();
  std::vector<std::shared_ptr<Subscriber>> subs;
  {
    std::lock_guard lock(subs_mutex_);
    subs.swap(subs_);
  }
  for (auto& s : subs) {
    {
      std::lock_guard lock(s->m);
      s->stop = true;
    }
    s->cv.notify_all();
    if (s->thread.joinable()) s->thread.join();
  }
}

SubscriptionId Session::subscribe(std::vector<EventKind> kinds, EventSink sink) {
  auto sub = std::make_shared<Subscriber>();
  if (kinds.empty()) kinds = {EventKind::ModelChanged, EventKind::SimProgress,
                               EventKind::SimFinished, EventKind::SimFailed};
  for (EventKind k : kinds) sub->kinds[static_cast<int>(k)] = true;
  sub->sink = std::move(sink);
  std::lock_guard lock(subs_mutex_);
  sub->id = next_sub_++;
  // the thread keeps its subscriber alive; a sink may unsubscribe itself
  sub->thread = std::thread([sub] { sub->loop(); });
  subs_.push_back(sub);
  return sub->id;
}

void Session::unsubscribe(SubscriptionId id) {
  std::shared_ptr<Subscriber> sub;
  {
    std::lock_guard lock(subs_mutex_);
    auto it = std::find_if(subs_.begin(), subs_.end(), [&](const auto& s) { return s->id == id; });
    if (it == subs_.end()) return;
    sub = *it;
    subs_.erase(it);
  }
  {
    std::lock_guard lock(sub->m);
    sub->stop = true;
    sub->queue.clear();
  }
  sub->cv.notify_all();
  if (sub->thread.get_id() == std::this_thread::get_id()) {
    sub->thread.detach();
  } else if (sub->thread.joinable()) {
    sub->thread.join();
  }
}

void Session::publish(EventKind kind, json payload) {
  std::lock_guard lock(subs_mutex_);
  json ev{{"type", "event"},
          {"event", std::string(event_name(kind))},
          {"revision", revision_.load()},
          {"payload", std::move(payload)}};
  for (auto& s : subs_) {
    if (!s->kinds[static_cast<int>(kind)]) continue;
    {
      std::lock_guard sl(s->m);
      s->queue.push_back(ev);
    }
    s->cv.notify_all();
  }
}

void Session::drain_events() {
  std::vector<std::shared_ptr<Subscriber>> subs;
  {
    std::lock_guard lock(subs_mutex_);
    subs = subs_;
  }
  for (auto& s : subs) {
    std::unique_lock lock(s->m);
    s->cv.wait(lock, [&] { return s->stop || (s->queue.empty() && !s->busy); });
  }
}

void Session::wait_idle() {
  {
    std::unique_lock lock(sim_mutex_);
    sim_done_.wait(lock, [&] { return !running_.load(); });
  }
  drain_events();
}

void Session::with_workspace(const std::function<void(pnsl::Workspace&)>& fn) {
  std::lock_guard lock(doc_mutex_);
  fn(ws_);
}

void Session::note_mutations(const std::string& verb, std::uint64_t before,
                             std::uint64_t generation) {
  std::uint64_t now = ws_.model.revision();
  std::uint64_t delta = generation != ws_.generation ? 1 + now : now - before;
  if (delta == 0) return;
  revision_ += delta;
  publish(EventKind::ModelChanged, json{{"verb", verb}, {"mutations", delta}});
}

json Session::handle_text(std::string_view text, Client* client) {
  json request;
  try {
    request = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    return json{{"type", "response"},
                {"id", nullptr},
                {"ok", false},
                {"error", {{"code", "ParseError"}, {"message", e.what()}}}};
  }
  return handle(request, client);
}

json Session::handle(const json& request, Client* client) {
  json id = nullptr;
  try {
    if (!request.is_object()) bad_payload("a request must be a JSON object");
    if (auto it = request.find("id"); it != request.end()) id = *it;
    auto verb = request.find("verb");
    if (verb == request.end() || !verb->is_string()) {
      throw Error(ErrorCode::BadVerb, "request has no verb");
    }
    json payload = json::object();
    if (auto it = request.find("payload"); it != request.end() && !it->is_null()) {
      if (!it->is_object()) bad_payload("payload must be an object");
      payload = *it;
    }
    json result = dispatch(verb->get<std::string>(), payload, client);
    return json{{"type", "response"}, {"id", id}, {"ok", true}, {"payload", std::move(result)}};
  } catch (const Error& e) {
    return json{{"type", "response"}, {"id", id}, {"ok", false}, {"error", error_json(e)}};
  } catch (const json::exception& e) {
    return json{{"type", "response"},
                {"id", id},
                {"ok", false},
                {"error", {{"code", "BadPayload"}, {"message", e.what()}}}};
  } catch (const std::exception& e) {
    return json{{"type", "response"},
                {"id", id},
                {"ok", false},
                {"error", {{"code", "RuntimeError"}, {"message", e.what()}}}};
  }
}

json Session::dispatch(const std::string& verb, const json& p, Client* client) {
  // Verbs that must not wait for the document lock.
  if (verb == "session.hello") {
    return json{{"protocol", kProtocolVersion},
                {"verbs",
                 {"session.hello", "subscribe", "unsubscribe", "model.load", "model.save",
                  "edit.apply", "script.run", "picker.eval", "sim.start", "sim.cancel",
                  "sim.wait", "result.wave", "result.trace", "info.stats"}},
                {"events", {"model-changed", "sim-progress", "sim-finished", "sim-failed"}}};
  }
  if (verb == "subscribe") {
    if (!client) throw Error(ErrorCode::BadVerb, "subscribe needs a streaming transport");
    std::vector<EventKind> kinds;
    if (auto it = p.find("kinds"); it != p.end()) {
      if (!it->is_array()) bad_payload("'kinds' must be a list");
      for (const auto& k : *it) {
        auto kind = k.is_string() ? parse_event(k.get<std::string>()) : std::nullopt;
        if (!kind) bad_payload("unknown event kind " + k.dump());
        kinds.push_back(*kind);
      }
    } else {
      kinds = {EventKind::ModelChanged, EventKind::SimProgress, EventKind::SimFinished,
               EventKind::SimFailed};
    }
    if (client->subscription) unsubscribe(*client->subscription);
    client->subscription = subscribe(kinds, client->send);
    return json{{"subscription", *client->subscription}, {"revision", revision_.load()}};
  }
  if (verb == "unsubscribe") {
    if (client && client->subscription) {
      unsubscribe(*client->subscription);
      client->subscription.reset();
    }
    return json::object();
  }
  if (verb == "sim.cancel") {
    bool was_running = running_.load();
    if (was_running) cancel_ = true;
    return json{{"cancelled", was_running}};
  }
  if (verb == "sim.wait") {
    {
      std::unique_lock lock(sim_mutex_);
      sim_done_.wait(lock, [&] { return !running_.load(); });
    }
    std::lock_guard lock(doc_mutex_);
    if (!ws_.last_run) throw Error(ErrorCode::NoResult, "no simulation has been run");
    return stats_json(*ws_.last_run);
  }

  std::lock_guard lock(doc_mutex_);
  const std::uint64_t before = ws_.model.revision();
  const std::uint64_t generation = ws_.generation;
  json result;
  try {
    if (verb == "model.load") {
      result = verb_model_load(p);
    } else if (verb == "model.save") {
      result = verb_model_save(p);
    } else if (verb == "edit.apply") {
      result = verb_edit_apply(p);
    } else if (verb == "script.run") {
      result = verb_script_run(p);
    } else if (verb == "picker.eval") {
      result = json{{"ids", ids_json(ws_.model.pick(need_string(p, "picker")))}};
    } else if (verb == "sim.start") {
      result = start_simulation(p);
    } else if (verb == "result.wave") {
      result = verb_result_wave(p);
    } else if (verb == "result.trace") {
      result = verb_result_trace(p);
    } else if (verb == "info.stats") {
      result = verb_info_stats();
    } else {
      throw Error(ErrorCode::BadVerb, "unknown verb \"" + verb + "\"");
    }
  } catch (...) {
    note_mutations(verb, before, generation);
    throw;
  }
  note_mutations(verb, before, generation);
  if (result.is_object() && (verb == "script.run" || verb == "edit.apply")) {
    result["revision"] = revision_.load();
  }
  return result;
}

json Session::verb_model_load(const json& p) {
  Model loaded;
  if (auto it = p.find("document"); it != p.end()) {
    loaded = io::load(it->is_string() ? it->get<std::string>() : it->dump());
  } else {
    std::filesystem::path path = need_string(p, "path");
    if (path.is_relative()) path = ws_.base_dir / path;
    loaded = io::load_file(path);
  }
  ws_.model = std::move(loaded);
  ws_.last_run.reset();
  ++ws_.generation;
  return json{{"modules", ws_.model.network().size()}};
}

json Session::verb_model_save(const json& p) {
  if (auto it = p.find("path"); it != p.end()) {
    std::filesystem::path path = need_string(p, "path");
    if (path.is_relative()) path = ws_.base_dir / path;
    io::save_file(ws_.model, path);
    return json{{"path", path.string()}};
  }
  return json{{"document", json::parse(io::save(ws_.model))}};
}

json Session::verb_edit_apply(const json& p) {
  const json& ops = need(p, "ops");
  if (!ops.is_array()) bad_payload("'ops' must be a list");
  // The batch applies to a copy and lands only if every op succeeds.
  Model work = ws_.model;
  json results = json::array();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const json& op = ops[i];
    try {
      std::string name = need_string(op, "op");
      json r = nullptr;
      if (name == "add_module") {
        auto kind = parse_kind(need_string(op, "kind"));
        if (!kind) bad_payload("unknown module kind");
        Vec2 pos{op.value("x", 0.0), op.value("y", 0.0)};
        std::uint64_t n = opt_count(op, "count", 1);
        std::vector<ModuleId> ids;
        for (std::uint64_t k = 0; k < n; ++k) ids.push_back(work.add_module(*kind, pos));
        r = ids_json(ids);
      } else if (name == "remove_module") {
        work.remove_module(need_id(op, "id"));
      } else if (name == "connect") {
        work.connect(need_id(op, "link"), need_id(op, "a"), need_id(op, "b"));
      } else if (name == "attach") {
        work.attach(need_id(op, "module"), need_id(op, "target"));
      } else if (name == "disconnect") {
        work.disconnect(need_id(op, "id"));
      } else if (name == "set_param") {
        auto param = parse_param(need_string(op, "param"));
        if (!param) bad_payload("unknown parameter");
        ParamValue value;
        const json& v = need(op, "value");
        if (is_table_param(*param)) {
          value = Table{need(v, "x").get<std::vector<double>>(), need(v, "y").get<std::vector<double>>()};
        } else {
          value = need_number(op, "value");
        }
        SetMode mode = op.value("mode", std::string("strict")) == "lenient" ? SetMode::Lenient
                                                                            : SetMode::Strict;
        r = work.set_param(targets(work, op), *param, value, mode);
      } else if (name == "set_state") {
        auto var = parse_state(need_string(op, "var"));
        if (!var) bad_payload("unknown state variable");
        SetMode mode = op.value("mode", std::string("strict")) == "lenient" ? SetMode::Lenient
                                                                            : SetMode::Strict;
        r = work.set_state(targets(work, op), *var, need_number(op, "value"), mode);
      } else if (name == "move") {
        work.move(need_id(op, "id"), Vec2{need_number(op, "x"), need_number(op, "y")});
      } else if (name == "set_signal") {
        work.set_signal_ref(need_id(op, "id"), need_string(op, "name"));
      } else if (name == "declare_signal") {
        SignalSource src;
        if (auto s = op.find("samples"); s != op.end()) {
          src.samples = s->get<std::vector<double>>();
        } else {
          src.path = need_string(op, "path");
          src.declared_rate = op.value("rate", 0.0);
        }
        work.declare_signal(need_string(op, "name"), std::move(src));
      } else if (name == "set_sim") {
        SimConfig cfg = work.sim_config();
        cfg.sample_rate = op.value("sample_rate", cfg.sample_rate);
        cfg.duration = opt_count(op, "duration", cfg.duration);
        cfg.trace_decimation =
            static_cast<std::uint32_t>(opt_count(op, "trace_decimation", cfg.trace_decimation));
        cfg.thread_count = static_cast<unsigned>(opt_count(op, "threads", cfg.thread_count));
        if (auto t = op.find("trace"); t != op.end()) {
          std::string mode = t->get<std::string>();
          if (mode == "all") {
            cfg.trace_mode = TraceMode::All;
          } else if (mode == "none") {
            cfg.trace_mode = TraceMode::None;
          } else {
            cfg.trace_mode = TraceMode::Picker;
            cfg.trace_picker = mode;
          }
        }
        work.set_sim_config(cfg);
      } else if (name == "add_label") {
        work.add_label(need_id(op, "id"), need_string(op, "label"));
      } else if (name == "remove_label") {
        work.remove_label(need_string(op, "label"));
      } else if (name == "add_note") {
        r = work.add_note(Vec2{need_number(op, "x"), need_number(op, "y")},
                          need_string(op, "html"));
      } else if (name == "remove_note") {
        work.remove_note(opt_count(op, "id", 0));
      } else if (name == "edit_note") {
        work.edit_note(opt_count(op, "id", 0), need_string(op, "html"));
      } else {
        bad_payload("unknown edit op \"" + name + "\"");
      }
      results.push_back(std::move(r));
    } catch (const Error& e) {
      Error wrapped(e.code(), "op " + std::to_string(i) + ": " + e.what());
      if (e.cause()) wrapped.with_cause(*e.cause());
      throw wrapped;
    } catch (const json::exception& e) {
      bad_payload("op " + std::to_string(i) + ": " + e.what());
    }
  }
  ws_.model = std::move(work);
  return json{{"results", std::move(results)}};
}

json Session::verb_script_run(const json& p) {
  std::string source;
  if (auto it = p.find("source"); it != p.end()) {
    source = need_string(p, "source");
  } else if (auto lib = p.find("library"); lib != p.end()) {
    std::string name = need_string(p, "library");
    auto found = ws_.library.find(name);
    if (found == ws_.library.end()) {
      throw Error(ErrorCode::IoError, "no library script \"" + name + "\"");
    }
    source = io::read_text(found->second);
  } else {
    std::filesystem::path path = need_string(p, "path");
    if (path.is_relative()) path = ws_.base_dir / path;
    source = io::read_text(path);
  }
  script_output_.clear();
  if (!running_) cancel_ = false;
  interp_->set_cancel_flag(&cancel_);
  std::string value = interp_->eval(source);
  return json{{"result", value}, {"output", script_output_}};
}

json Session::start_simulation(const json& p) {
  if (running_) throw Error(ErrorCode::ConflictingSimulation, "a simulation is already running");
  SimConfig cfg = ws_.model.sim_config();
  if (auto it = p.find("duration"); it != p.end()) {
    double seconds = need_number(p, "duration");
    if (!(seconds >= 0)) bad_payload("'duration' must be non-negative seconds");
    cfg.duration = static_cast<std::uint64_t>(std::llround(seconds * cfg.sample_rate));
  }
  cfg.duration = opt_count(p, "steps", cfg.duration);
  cfg.thread_count = static_cast<unsigned>(opt_count(p, "threads", cfg.thread_count));
  cfg.check();
  auto program = std::make_shared<sim::SimProgram>(
      sim::compile(ws_.model, io::load_signal_files(ws_.model, ws_.base_dir)));

  if (sim_thread_.joinable()) sim_thread_.join();
  cancel_ = false;
  running_ = true;
  sim_thread_ = std::thread([this, program, cfg] {
    using clock = std::chrono::steady_clock;
    const std::uint64_t stride =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(cfg.sample_rate / 8));
    std::uint64_t last_step = 0;
    auto last_time = clock::now();
    sim::RunControl control;
    control.cancel = &cancel_;
    control.progress_every = std::min<std::uint64_t>(stride, 256);
    control.progress = [&](std::uint64_t step, std::uint64_t total) {
      auto now = clock::now();
      if (step - last_step >= stride || now - last_time >= std::chrono::milliseconds(200)) {
        publish(EventKind::SimProgress,
                json{{"step", step},
                     {"total", total},
                     {"fraction", total ? static_cast<double>(step) / total : 1.0}});
        last_step = step;
        last_time = now;
      }
    };
    sim::RunResult r = sim::run(*program, cfg, control);
    json stats = stats_json(r);
    sim::RunStatus status = r.status;
    json failure;
    if (status != sim::RunStatus::Completed) {
      failure = stats;
      failure["code"] = std::string(error_name(r.error));
      failure["message"] = r.message;
      failure["step"] = r.failed_step;
      failure["module"] = to_u64(r.failed_module);
    }
    {
      std::lock_guard lock(doc_mutex_);
      ws_.last_run = std::move(r);
    }
    if (status == sim::RunStatus::Completed) {
      publish(EventKind::SimFinished, stats);
    } else {
      publish(EventKind::SimFailed, failure);
    }
    {
      std::lock_guard lock(sim_mutex_);
      running_ = false;
    }
    sim_done_.notify_all();
  });
  return json{{"started", true}, {"steps", cfg.duration}, {"threads", cfg.thread_count}};
}

json Session::verb_result_wave(const json& p) {
  if (!ws_.last_run) throw Error(ErrorCode::NoResult, "no simulation has been run");
  ModuleId id = need_id(p, "channel");
  const sim::Channel* c = ws_.last_run->channel(id);
  if (!c) throw Error(ErrorCode::NoSuchChannel, "no output channel for module " + to_string(id));
  std::uint64_t start = std::min<std::uint64_t>(opt_count(p, "start", 0), c->samples.size());
  std::uint64_t count =
      std::min<std::uint64_t>(opt_count(p, "count", c->samples.size()), c->samples.size() - start);
  json samples(std::vector<double>(c->samples.begin() + static_cast<std::ptrdiff_t>(start),
                                   c->samples.begin() + static_cast<std::ptrdiff_t>(start + count)));
  return json{{"channel", to_u64(id)},
              {"sample_rate", ws_.model.sim_config().sample_rate},
              {"start", start},
              {"samples", std::move(samples)}};
}

json Session::verb_result_trace(const json& p) {
  if (!ws_.last_run) throw Error(ErrorCode::NoResult, "no simulation has been run");
  const sim::MotionTrace& t = ws_.last_run->trace;
  std::uint64_t total = t.frame_count();
  std::uint64_t start = std::min<std::uint64_t>(opt_count(p, "start", 0), total);
  std::uint64_t count = std::min<std::uint64_t>(opt_count(p, "count", total), total - start);
  json frames = json::array();
  for (std::uint64_t f = start; f < start + count; ++f) {
    auto fr = t.frame(f);
    frames.push_back(std::vector<double>(fr.begin(), fr.end()));
  }
  return json{{"modules", ids_json(t.modules)},
              {"decimation", t.decimation},
              {"start", start},
              {"frame_count", total},
              {"frames", std::move(frames)}};
}

json Session::verb_info_stats() {
  std::size_t mats = 0, lias = 0, observers = 0;
  for (const auto& [id, m] : ws_.model.network().modules()) {
    switch (family_of(m.kind)) {
      case Family::Mat: ++mats; break;
      case Family::Lia: ++lias; break;
      case Family::Observer: ++observers; break;
    }
  }
  json out{{"protocol", kProtocolVersion},
           {"revision", revision_.load()},
           {"modules", ws_.model.network().size()},
           {"mat", mats},
           {"lia", lias},
           {"observer", observers},
           {"labels", ws_.model.labels().user_label_count()},
           {"notes", ws_.model.notes().size()},
           {"running", running_.load()}};
  if (ws_.last_run) out["last_run"] = stats_json(*ws_.last_run);
  return out;
}

int serve_stdio(Session& session, std::istream& in, std::ostream& out) {
  std::mutex out_mutex;
  auto write = [&](const json& msg) {
    std::lock_guard lock(out_mutex);
    out << msg.dump() << '\n';
    out.flush();
  };
  Client client{write, std::nullopt};
  int errors = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json response = session.handle_text(line, &client);
    if (!response.value("ok", false)) ++errors;
    write(response);
  }
  session.wait_idle();
  if (client.subscription) session.unsubscribe(*client.subscription);
  return errors;
}

}  // namespace pnet::service
