#include "pnet/io/document.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pnet/core/error.hpp"

namespace pnet::io {

using nlohmann::json;

namespace {

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json table_json(const Table& t) { return json{{"x", t.x}, {"y", t.y}}; }

json module_json(const Module& m) {
  json j;
  j["id"] = to_u64(m.id);
  j["kind"] = std::string(kind_name(m.kind));
  j["bench"] = vec_json(m.bench_pos);
  json params = json::object();
  for (Param p : legal_params(m.kind)) {
    ParamValue v = m.param(p);
    if (is_table_param(p)) {
      params[std::string(param_name(p))] = table_json(std::get<Table>(v));
    } else {
      params[std::string(param_name(p))] = std::get<double>(v);
    }
  }
  j["params"] = std::move(params);
  if (has_initial_state(m.kind)) {
    j["init"] = json{{"X0", m.init.X0}, {"V0", m.init.V0}};
  }
  int slots = slot_count(m.kind);
  if (slots > 0) {
    json arr = json::array();
    for (int s = 0; s < slots; ++s) {
      ModuleId t = m.slots[static_cast<std::size_t>(s)];
      arr.push_back(t == kNoModule ? json(nullptr) : json(to_u64(t)));
    }
    j["slots"] = std::move(arr);
  }
  if (takes_signal(m.kind)) j["signal"] = m.signal_ref;
  return j;
}

std::string_view trace_mode_name(TraceMode mode) {
  switch (mode) {
    case TraceMode::All: return "all";
    case TraceMode::None: return "none";
    case TraceMode::Picker: return "picker";
  }
  return "all";
}

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::ParseError, "document: " + what);
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) bad(std::string("expected an object holding '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

std::uint64_t count(const json& j, const char* what) {
  if (!j.is_number_unsigned()) bad(std::string(what) + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string text(const json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " must be a string");
  return j.get<std::string>();
}

Vec2 vec(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("bench position must be [x, y]");
  return {number(j[0], "bench x"), number(j[1], "bench y")};
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Table table(const json& j) {
  return Table{numbers(field(j, "x"), "table x"), numbers(field(j, "y"), "table y")};
}

Module module_from(const json& j) {
  Module m;
  m.id = ModuleId{count(field(j, "id"), "module id")};
  auto kind = parse_kind(text(field(j, "kind"), "kind"));
  if (!kind) bad("unknown kind in module " + to_string(m.id));
  m.kind = *kind;
  m.bench_pos = vec(field(j, "bench"));
  const json& params = field(j, "params");
  if (!params.is_object()) bad("params must be an object");
  for (auto it = params.begin(); it != params.end(); ++it) {
    auto p = parse_param(it.key());
    if (!p || !is_legal(m.kind, *p)) {
      throw Error(ErrorCode::IntegrityError, "parameter '" + it.key() + "' is not legal for " +
                                                 std::string(kind_name(m.kind)));
    }
    switch (*p) {
      case Param::M: m.params.M = number(it.value(), "M"); break;
      case Param::K: m.params.K = number(it.value(), "K"); break;
      case Param::Z: m.params.Z = number(it.value(), "Z"); break;
      case Param::S: m.params.S = number(it.value(), "S"); break;
      case Param::gain: m.params.gain = number(it.value(), "gain"); break;
      case Param::fK: m.params.fK = table(it.value()); break;
      case Param::fZ: m.params.fZ = table(it.value()); break;
    }
  }
  if (has_initial_state(m.kind)) {
    const json& init = field(j, "init");
    m.init.X0 = number(field(init, "X0"), "X0");
    m.init.V0 = number(field(init, "V0"), "V0");
  } else if (j.contains("init")) {
    throw Error(ErrorCode::IntegrityError, "initial state on a non-MAT module");
  }
  int slots = slot_count(m.kind);
  if (slots > 0) {
    const json& arr = field(j, "slots");
    if (!arr.is_array() || static_cast<int>(arr.size()) != slots) {
      bad("module " + to_string(m.id) + " needs " + std::to_string(slots) + " slots");
    }
    for (int s = 0; s < slots; ++s) {
      const json& v = arr[static_cast<std::size_t>(s)];
      m.slots[static_cast<std::size_t>(s)] = v.is_null() ? kNoModule : ModuleId{count(v, "slot")};
    }
  }
  if (takes_signal(m.kind)) m.signal_ref = text(field(j, "signal"), "signal");
  return m;
}

SourcePos locate(std::string_view text, std::size_t byte) {
  SourcePos pos;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

}  // namespace

std::string save(const Model& model) {
  json doc;
  doc["format"] = std::string(kFormatName);
  doc["format_version"] = kFormatVersion;
  doc["next_id"] = to_u64(model.network().next_id());
  doc["next_note_id"] = model.next_note_id();

  json modules = json::array();
  for (const auto& [id, m] : model.network().modules()) modules.push_back(module_json(m));
  doc["modules"] = std::move(modules);

  std::vector<std::pair<std::string, ModuleId>> user_labels;
  model.labels().for_each_label([&](std::string_view label, ModuleId id, LabelOrigin origin) {
    if (origin == LabelOrigin::User) user_labels.emplace_back(std::string(label), id);
  });
  std::sort(user_labels.begin(), user_labels.end());
  json labels = json::array();
  for (const auto& [label, id] : user_labels) {
    labels.push_back(json{{"label", label}, {"module", to_u64(id)}});
  }
  doc["labels"] = std::move(labels);

  json notes = json::array();
  for (const auto& [id, note] : model.notes()) {
    notes.push_back(json{{"id", id}, {"bench", vec_json(note.pos)}, {"html", note.html}});
  }
  doc["notes"] = std::move(notes);

  json signals = json::object();
  for (const auto& [name, source] : model.signals()) {
    if (source.embedded()) {
      signals[name] = json{{"samples", source.samples}};
    } else {
      json s{{"path", source.path}};
      if (source.declared_rate > 0) s["rate"] = source.declared_rate;
      signals[name] = std::move(s);
    }
  }
  doc["signals"] = std::move(signals);

  const SimConfig& cfg = model.sim_config();
  json sim{{"sample_rate", cfg.sample_rate},
           {"duration", cfg.duration},
           {"trace_decimation", cfg.trace_decimation},
           {"trace", std::string(trace_mode_name(cfg.trace_mode))},
           {"threads", cfg.thread_count}};
  if (cfg.trace_mode == TraceMode::Picker) sim["trace_picker"] = cfg.trace_picker;
  doc["sim"] = std::move(sim);
  doc["scripts"] = model.script_refs();

  return doc.dump(2) + "\n";
}

Model load(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    SourcePos pos = locate(source, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::ParseError,
                "document: malformed JSON at line " + std::to_string(pos.line) + ", column " +
                    std::to_string(pos.column),
                pos);
  }
  if (!doc.is_object()) bad("top level must be an object");
  if (text(field(doc, "format"), "format") != kFormatName) bad("not a pnet model document");
  const json& version = field(doc, "format_version");
  if (!version.is_number_integer() || version.get<long long>() != kFormatVersion) {
    throw Error(ErrorCode::VersionUnsupported,
                "document format_version " + version.dump() + " is not supported (expected " +
                    std::to_string(kFormatVersion) + ")");
  }

  const json& modules_json = field(doc, "modules");
  if (!modules_json.is_array()) bad("modules must be an array");
  std::vector<Module> modules;
  modules.reserve(modules_json.size());
  for (const auto& mj : modules_json) modules.push_back(module_from(mj));
  std::vector<std::pair<ModuleId, ModuleKind>> kinds;
  kinds.reserve(modules.size());
  for (const auto& m : modules) kinds.emplace_back(m.id, m.kind);
  Network network =
      Network::restore(std::move(modules), ModuleId{count(field(doc, "next_id"), "next_id")});

  LabelIndex labels;
  for (const auto& [id, kind] : kinds) labels.add_system(id, kind);
  const json& labels_json = field(doc, "labels");
  if (!labels_json.is_array()) bad("labels must be an array");
  for (const auto& lj : labels_json) {
    ModuleId id{count(field(lj, "module"), "label module")};
    if (!network.contains(id)) {
      throw Error(ErrorCode::IntegrityError, "label targets missing module " + to_string(id));
    }
    std::string label = text(field(lj, "label"), "label");
    try {
      if (labels.target(label)) {
        throw Error(ErrorCode::IntegrityError, "duplicate label '" + label + "'");
      }
      labels.add_label(id, label);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IntegrityError) throw;
      throw Error(ErrorCode::IntegrityError, e.what());
    }
  }

  std::map<std::uint64_t, BenchNote> notes;
  const json& notes_json = field(doc, "notes");
  if (!notes_json.is_array()) bad("notes must be an array");
  for (const auto& nj : notes_json) {
    BenchNote note{count(field(nj, "id"), "note id"), vec(field(nj, "bench")),
                   text(field(nj, "html"), "note html")};
    if (!notes.emplace(note.id, note).second) {
      throw Error(ErrorCode::IntegrityError, "duplicate note id " + std::to_string(note.id));
    }
  }

  std::map<std::string, SignalSource> signals;
  const json& signals_json = field(doc, "signals");
  if (!signals_json.is_object()) bad("signals must be an object");
  for (auto it = signals_json.begin(); it != signals_json.end(); ++it) {
    SignalSource source;
    if (it.value().contains("samples")) {
      source.samples = numbers(it.value()["samples"], "signal samples");
    } else {
      source.path = text(field(it.value(), "path"), "signal path");
      if (source.path.empty()) bad("signal path is empty");
      if (it.value().contains("rate")) source.declared_rate = number(it.value()["rate"], "rate");
    }
    signals.emplace(it.key(), std::move(source));
  }

  const json& sim = field(doc, "sim");
  SimConfig cfg;
  cfg.sample_rate = number(field(sim, "sample_rate"), "sample_rate");
  cfg.duration = count(field(sim, "duration"), "duration");
  cfg.trace_decimation = static_cast<std::uint32_t>(count(field(sim, "trace_decimation"),
                                                          "trace_decimation"));
  cfg.thread_count = static_cast<unsigned>(count(field(sim, "threads"), "threads"));
  std::string mode = text(field(sim, "trace"), "trace");
  if (mode == "all") {
    cfg.trace_mode = TraceMode::All;
  } else if (mode == "none") {
    cfg.trace_mode = TraceMode::None;
  } else if (mode == "picker") {
    cfg.trace_mode = TraceMode::Picker;
    cfg.trace_picker = text(field(sim, "trace_picker"), "trace_picker");
  } else {
    bad("unknown trace mode '" + mode + "'");
  }
  try {
    cfg.check();
  } catch (const Error& e) {
    bad(e.what());
  }

  std::vector<std::string> scripts;
  const json& scripts_json = field(doc, "scripts");
  if (!scripts_json.is_array()) bad("scripts must be an array");
  for (const auto& s : scripts_json) scripts.push_back(text(s, "script reference"));

  return Model::restore(std::move(network), std::move(labels), std::move(notes),
                        count(field(doc, "next_note_id"), "next_note_id"), std::move(signals),
                        std::move(cfg), std::move(scripts));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "': " + ec.message());
}

void save_file(const Model& model, const std::filesystem::path& path) {
  write_text(path, save(model));
}

Model load_file(const std::filesystem::path& path) { return load(read_text(path)); }

}  // namespace pnet::io
