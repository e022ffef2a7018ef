#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "pnet/io/app_url.hpp"
#include "pnet/io/document.hpp"
#include "pnet/io/wav.hpp"
#include "pnet/labels/picker.hpp"
#include "pnet/pnsl/workspace.hpp"
#include "pnet/sim/program.hpp"
#include "pnet/sim/stability.hpp"

#ifndef PNET_BUNDLED_LIBRARY
#define PNET_BUNDLED_LIBRARY "scripts"
#endif

namespace pnet::pnsl {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void runtime(const std::string& what) { throw Error(ErrorCode::RuntimeError, what); }

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

std::string ids_text(std::span<const ModuleId> ids) {
  std::string out;
  for (ModuleId id : ids) {
    if (!out.empty()) out.push_back(' ');
    out += to_string(id);
  }
  return out;
}

// A single module: numeric id or an exact label.
ModuleId one(const Workspace& ws, const std::string& ref) {
  if (all_digits(ref)) {
    ModuleId id{std::strtoull(ref.c_str(), nullptr, 10)};
    if (!ws.model.network().contains(id)) {
      throw Error(ErrorCode::UnknownId, "no module with id " + ref);
    }
    return id;
  }
  auto target = ws.model.labels().target(ref);
  if (!target) throw Error(ErrorCode::UnknownLabel, "no module labelled \"" + ref + "\"");
  return *target;
}

// A module set: a list of ids, or a picker expression.
ModuleSet many(const Workspace& ws, const std::string& ref) {
  auto items = split_list(ref);
  if (!items.empty() && std::all_of(items.begin(), items.end(), [](const std::string& s) {
        return all_digits(s);
      })) {
    ModuleSet out;
    for (const auto& s : items) out.push_back(one(ws, s));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  return ws.model.pick(ref);
}

ModuleKind kind_arg(const std::string& text) {
  auto k = parse_kind(text);
  if (!k) runtime("unknown module kind \"" + text + "\"");
  return *k;
}

Param param_arg(const std::string& text) {
  auto p = parse_param(text);
  if (!p) runtime("unknown parameter \"" + text + "\"");
  return *p;
}

StateVar state_arg(const std::string& text) {
  auto v = parse_state(text);
  if (!v) runtime("unknown state variable \"" + text + "\"");
  return *v;
}

std::vector<double> number_list(const std::string& text, std::string_view what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number(item, what));
  return out;
}

std::string numbers_text(std::span<const double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out.push_back(' ');
    out += format_number(v);
  }
  return out;
}

ParamValue param_value(Param p, const std::string& text) {
  if (!is_table_param(p)) return parse_number(text, param_name(p));
  auto halves = split_list(text);
  if (halves.size() != 2) runtime("a table is a list of two lists: {x...} {y...}");
  return Table{number_list(halves[0], "table x"), number_list(halves[1], "table y")};
}

std::string param_text(const ParamValue& v) {
  if (const double* d = std::get_if<double>(&v)) return format_number(*d);
  const Table& t = std::get<Table>(v);
  std::string xs = numbers_text(t.x), ys = numbers_text(t.y);
  return "{" + xs + "} {" + ys + "}";
}

// Leading "-flag" options; returns the remaining positional arguments.
std::vector<std::string> take_flags(Args args, std::initializer_list<std::string_view> known,
                                    std::vector<std::string>& flags) {
  std::vector<std::string> rest;
  bool options = true;
  for (const auto& a : args) {
    if (options && a.size() > 1 && a[0] == '-' && !std::isdigit(static_cast<unsigned char>(a[1]))) {
      if (a == "--") {
        options = false;
        continue;
      }
      if (std::find(known.begin(), known.end(), a) == known.end()) {
        runtime("unknown option \"" + a + "\"");
      }
      flags.push_back(a);
      continue;
    }
    options = false;
    rest.push_back(a);
  }
  return rest;
}

bool has_flag(const std::vector<std::string>& flags, std::string_view f) {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

fs::path resolve(const Workspace& ws, const std::string& p) {
  fs::path path(p);
  return path.is_relative() ? ws.base_dir / path : path;
}

std::size_t count_arg(const std::string& text, std::string_view what) {
  std::int64_t n = parse_integer(text, what);
  if (n < 0) runtime(std::string(what) + " must not be negative");
  return static_cast<std::size_t>(n);
}

const sim::RunResult& last_run(const Workspace& ws) {
  if (!ws.last_run) throw Error(ErrorCode::NoResult, "no simulation has been run");
  return *ws.last_run;
}

std::string trace_mode_text(TraceMode m) {
  switch (m) {
    case TraceMode::All: return "all";
    case TraceMode::None: return "none";
    case TraceMode::Picker: return "picker";
  }
  return "all";
}

// sprintf-like with %d %i %f %g %e %s %x %%, one argument per directive.
std::string format_text(const std::string& fmt, Args args) {
  std::string out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out.push_back(fmt[i]);
      continue;
    }
    std::size_t start = i++;
    while (i < fmt.size() && std::strchr("-+ #0123456789.", fmt[i])) ++i;
    if (i >= fmt.size()) runtime("format string ends inside a directive");
    char conv = fmt[i];
    if (conv == '%') {
      out.push_back('%');
      continue;
    }
    if (next >= args.size()) runtime("not enough arguments for format string");
    std::string spec = fmt.substr(start, i - start);
    const std::string& arg = args[next++];
    char buf[512];
    switch (conv) {
      case 'd': case 'i': case 'x': {
        long long v = parse_integer(arg, "format argument");
        std::string f = spec + "ll" + conv;
        std::snprintf(buf, sizeof buf, f.c_str(), v);
        out += buf;
        break;
      }
      case 'f': case 'g': case 'e': {
        double v = parse_number(arg, "format argument");
        std::string f = spec + conv;
        std::snprintf(buf, sizeof buf, f.c_str(), v);
        out += buf;
        break;
      }
      case 's': {
        std::string f = spec + "s";
        if (arg.size() < 400) {
          std::snprintf(buf, sizeof buf, f.c_str(), arg.c_str());
          out += buf;
        } else {
          out += arg;
        }
        break;
      }
      default:
        runtime(std::string("bad format directive %") + conv);
    }
  }
  return out;
}

CommandSpec cmd(std::string name, int min, int max, std::string usage, Handler fn) {
  return CommandSpec{std::move(name), min, max, std::move(usage), std::move(fn)};
}

Package module_package(Workspace& ws) {
  return {"module",
          {
              cmd("create", 1, 2, "KIND ?count?",
                  [&ws](Interpreter&, Args a) {
                    ModuleKind kind = kind_arg(a[0]);
                    std::size_t n = a.size() > 1 ? count_arg(a[1], "count") : 1;
                    std::vector<ModuleId> ids;
                    ids.reserve(n);
                    for (std::size_t i = 0; i < n; ++i) ids.push_back(ws.model.add_module(kind));
                    return ids_text(ids);
                  }),
              cmd("delete", 1, 1, "modules",
                  [&ws](Interpreter&, Args a) {
                    ModuleSet set = many(ws, a[0]);
                    for (ModuleId id : set) ws.model.remove_module(id);
                    return std::to_string(set.size());
                  }),
              cmd("list", 0, 1, "?modules?",
                  [&ws](Interpreter&, Args a) {
                    if (!a.empty()) return ids_text(many(ws, a[0]));
                    std::vector<ModuleId> ids;
                    for (const auto& [id, m] : ws.model.network().modules()) ids.push_back(id);
                    return ids_text(ids);
                  }),
              cmd("count", 0, 1, "?modules?",
                  [&ws](Interpreter&, Args a) {
                    return std::to_string(a.empty() ? ws.model.network().size()
                                                    : many(ws, a[0]).size());
                  }),
              cmd("kind", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    return std::string(kind_name(ws.model.network().at(one(ws, a[0])).kind));
                  }),
              cmd("exists", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    try {
                      one(ws, a[0]);
                      return std::string("1");
                    } catch (const Error&) {
                      return std::string("0");
                    }
                  }),
          }};
}

Package link_package(Workspace& ws) {
  return {"link",
          {
              cmd("create", 3, 3, "KIND a b",
                  [&ws](Interpreter&, Args a) {
                    ModuleKind kind = kind_arg(a[0]);
                    if (family_of(kind) != Family::Lia) {
                      throw Error(ErrorCode::KindMismatch,
                                  std::string(kind_name(kind)) + " is not an interaction");
                    }
                    ModuleId x = one(ws, a[1]), y = one(ws, a[2]);
                    // validate the endpoints before creating anything
                    for (ModuleId end : {x, y}) {
                      if (!has_position(ws.model.network().at(end).kind)) {
                        throw Error(ErrorCode::KindMismatch,
                                    "module " + to_string(end) + " has no position to link");
                      }
                    }
                    if (x == y) throw Error(ErrorCode::SelfLink, "a link needs two distinct ends");
                    ModuleId id = ws.model.add_module(kind);
                    ws.model.connect(id, x, y);
                    return to_string(id);
                  }),
              cmd("connect", 3, 3, "link a b",
                  [&ws](Interpreter&, Args a) {
                    ws.model.connect(one(ws, a[0]), one(ws, a[1]), one(ws, a[2]));
                    return std::string{};
                  }),
              cmd("attach", 2, 2, "module target",
                  [&ws](Interpreter&, Args a) {
                    ws.model.attach(one(ws, a[0]), one(ws, a[1]));
                    return std::string{};
                  }),
              cmd("disconnect", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    ws.model.disconnect(one(ws, a[0]));
                    return std::string{};
                  }),
              cmd("ends", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    const Module& m = ws.model.network().at(one(ws, a[0]));
                    std::vector<ModuleId> ends;
                    for (int s = 0; s < slot_count(m.kind); ++s) {
                      ModuleId t = m.slots[static_cast<std::size_t>(s)];
                      if (t != kNoModule) ends.push_back(t);
                    }
                    return ids_text(ends);
                  }),
              cmd("of", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    return ids_text(ws.model.network().referrers(one(ws, a[0])));
                  }),
          }};
}

Package label_package(Workspace& ws) {
  return {"label",
          {
              cmd("add", 2, 2, "module label",
                  [&ws](Interpreter&, Args a) {
                    ws.model.add_label(one(ws, a[0]), a[1]);
                    return std::string{};
                  }),
              cmd("remove", 1, 1, "label",
                  [&ws](Interpreter&, Args a) {
                    ws.model.remove_label(a[0]);
                    return std::string{};
                  }),
              cmd("of", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    auto labels = ws.model.labels().labels_of(one(ws, a[0]));
                    return join_list(labels);
                  }),
              cmd("target", 1, 1, "label",
                  [&ws](Interpreter&, Args a) { return to_string(one(ws, a[0])); }),
              cmd("radical", 1, 1, "radical",
                  [&ws](Interpreter&, Args a) {
                    return ids_text(ws.model.labels().resolve_radical(a[0]));
                  }),
          }};
}

Package picker_package(Workspace& ws) {
  return {"picker",
          {
              cmd("eval", 1, 1, "expression",
                  [&ws](Interpreter&, Args a) { return ids_text(ws.model.pick(a[0])); }),
              cmd("count", 1, 1, "expression",
                  [&ws](Interpreter&, Args a) { return std::to_string(ws.model.pick(a[0]).size()); }),
              cmd("check", 1, 1, "expression",
                  [](Interpreter&, Args a) { return Picker::parse(a[0]).to_string(); }),
          }};
}

Package param_package(Workspace& ws) {
  return {"param",
          {
              cmd("set", 3, 4, "?-lenient? modules NAME value",
                  [&ws](Interpreter&, Args a) {
                    std::vector<std::string> flags;
                    auto rest = take_flags(a, {"-lenient"}, flags);
                    if (rest.size() != 3) runtime("usage: param set ?-lenient? modules NAME value");
                    Param p = param_arg(rest[1]);
                    ParamValue v = param_value(p, rest[2]);
                    ModuleSet set = many(ws, rest[0]);
                    SetMode mode = has_flag(flags, "-lenient") ? SetMode::Lenient : SetMode::Strict;
                    return std::to_string(ws.model.set_param(set, p, v, mode));
                  }),
              cmd("get", 2, 2, "module NAME",
                  [&ws](Interpreter&, Args a) {
                    return param_text(ws.model.network().get_param(one(ws, a[0]), param_arg(a[1])));
                  }),
          }};
}

Package state_package(Workspace& ws) {
  return {"state",
          {
              cmd("set", 3, 4, "?-lenient? modules X0|V0 value",
                  [&ws](Interpreter&, Args a) {
                    std::vector<std::string> flags;
                    auto rest = take_flags(a, {"-lenient"}, flags);
                    if (rest.size() != 3) runtime("usage: state set ?-lenient? modules X0|V0 value");
                    StateVar var = state_arg(rest[1]);
                    double v = parse_number(rest[2], state_name(var));
                    ModuleSet set = many(ws, rest[0]);
                    SetMode mode = has_flag(flags, "-lenient") ? SetMode::Lenient : SetMode::Strict;
                    return std::to_string(ws.model.set_state(set, var, v, mode));
                  }),
              cmd("get", 2, 2, "module X0|V0",
                  [&ws](Interpreter&, Args a) {
                    return format_number(
                        ws.model.network().get_state(one(ws, a[0]), state_arg(a[1])));
                  }),
          }};
}

Package bench_package(Workspace& ws) {
  return {"bench",
          {
              cmd("move", 3, 3, "module x y",
                  [&ws](Interpreter&, Args a) {
                    ws.model.move(one(ws, a[0]),
                                  Vec2{parse_number(a[1], "x"), parse_number(a[2], "y")});
                    return std::string{};
                  }),
              cmd("pos", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    Vec2 p = ws.model.network().at(one(ws, a[0])).bench_pos;
                    return format_number(p.x) + " " + format_number(p.y);
                  }),
          }};
}

Package note_package(Workspace& ws) {
  auto note_id = [](const std::string& s) {
    return static_cast<std::uint64_t>(count_arg(s, "note id"));
  };
  return {"note",
          {
              cmd("add", 3, 3, "x y html",
                  [&ws](Interpreter&, Args a) {
                    return std::to_string(ws.model.add_note(
                        Vec2{parse_number(a[0], "x"), parse_number(a[1], "y")}, a[2]));
                  }),
              cmd("remove", 1, 1, "note",
                  [&ws, note_id](Interpreter&, Args a) {
                    ws.model.remove_note(note_id(a[0]));
                    return std::string{};
                  }),
              cmd("edit", 2, 2, "note html",
                  [&ws, note_id](Interpreter&, Args a) {
                    ws.model.edit_note(note_id(a[0]), a[1]);
                    return std::string{};
                  }),
              cmd("list", 0, 0, "",
                  [&ws](Interpreter&, Args) {
                    std::string out;
                    for (const auto& [id, n] : ws.model.notes()) {
                      out += (out.empty() ? "" : " ") + std::to_string(id);
                    }
                    return out;
                  }),
              cmd("text", 1, 1, "note",
                  [&ws, note_id](Interpreter&, Args a) {
                    auto it = ws.model.notes().find(note_id(a[0]));
                    if (it == ws.model.notes().end()) {
                      throw Error(ErrorCode::UnknownId, "no note with id " + a[0]);
                    }
                    return it->second.html;
                  }),
              cmd("check", 1, 1, "note",
                  [&ws, note_id](Interpreter&, Args a) {
                    auto it = ws.model.notes().find(note_id(a[0]));
                    if (it == ws.model.notes().end()) {
                      throw Error(ErrorCode::UnknownId, "no note with id " + a[0]);
                    }
                    io::NoteLinks links = io::scan_note(it->second.html);
                    return std::string(links.flagged() ? "flagged" : "ok");
                  }),
          }};
}

Package model_package(Workspace& ws) {
  return {"model",
          {
              cmd("new", 0, 0, "",
                  [&ws](Interpreter&, Args) {
                    ws.model = Model{};
                    ws.last_run.reset();
                    ++ws.generation;
                    return std::string{};
                  }),
              cmd("load", 1, 1, "path",
                  [&ws](Interpreter&, Args a) {
                    ws.model = io::load_file(resolve(ws, a[0]));
                    ws.last_run.reset();
                    ++ws.generation;
                    return std::to_string(ws.model.network().size());
                  }),
              cmd("save", 1, 1, "path",
                  [&ws](Interpreter&, Args a) {
                    fs::path p = resolve(ws, a[0]);
                    io::save_file(ws.model, p);
                    return p.string();
                  }),
              cmd("stats", 0, 0, "",
                  [&ws](Interpreter&, Args) {
                    std::size_t mats = 0, lias = 0, observers = 0;
                    for (const auto& [id, m] : ws.model.network().modules()) {
                      switch (family_of(m.kind)) {
                        case Family::Mat: ++mats; break;
                        case Family::Lia: ++lias; break;
                        case Family::Observer: ++observers; break;
                      }
                    }
                    return "modules " + std::to_string(ws.model.network().size()) + " mat " +
                           std::to_string(mats) + " lia " + std::to_string(lias) + " observer " +
                           std::to_string(observers) + " labels " +
                           std::to_string(ws.model.labels().user_label_count()) + " notes " +
                           std::to_string(ws.model.notes().size());
                  }),
              cmd("validate", 0, 0, "",
                  [&ws](Interpreter&, Args) {
                    ValidationReport r = ws.model.validate();
                    return r.ok() ? std::string("ok") : r.summary();
                  }),
              cmd("revision", 0, 0, "",
                  [&ws](Interpreter&, Args) { return std::to_string(ws.model.revision()); }),
          }};
}

Package sim_package(Workspace& ws) {
  return {"sim",
          {
              cmd("config", 0, 2, "?key? ?value?",
                  [&ws](Interpreter&, Args a) {
                    SimConfig c = ws.model.sim_config();
                    if (a.empty()) {
                      return "sample_rate " + format_number(c.sample_rate) + " duration " +
                             std::to_string(c.duration) + " decimation " +
                             std::to_string(c.trace_decimation) + " trace " +
                             trace_mode_text(c.trace_mode) + " threads " +
                             std::to_string(c.thread_count);
                    }
                    const std::string& key = a[0];
                    auto read = [&]() -> std::string {
                      if (key == "sample_rate") return format_number(c.sample_rate);
                      if (key == "duration") return std::to_string(c.duration);
                      if (key == "decimation") return std::to_string(c.trace_decimation);
                      if (key == "trace") {
                        return c.trace_mode == TraceMode::Picker ? c.trace_picker
                                                                 : trace_mode_text(c.trace_mode);
                      }
                      if (key == "threads") return std::to_string(c.thread_count);
                      runtime("unknown sim setting \"" + key + "\"");
                    };
                    if (a.size() == 1) return read();
                    const std::string& v = a[1];
                    if (key == "sample_rate") {
                      c.sample_rate = parse_number(v, "sample_rate");
                    } else if (key == "duration") {
                      c.duration = count_arg(v, "duration");
                    } else if (key == "decimation") {
                      c.trace_decimation = static_cast<std::uint32_t>(count_arg(v, "decimation"));
                    } else if (key == "threads") {
                      c.thread_count = static_cast<unsigned>(count_arg(v, "threads"));
                    } else if (key == "trace") {
                      if (v == "all") {
                        c.trace_mode = TraceMode::All;
                      } else if (v == "none") {
                        c.trace_mode = TraceMode::None;
                      } else {
                        Picker::parse(v);
                        c.trace_mode = TraceMode::Picker;
                        c.trace_picker = v;
                      }
                    } else {
                      read();
                    }
                    ws.model.set_sim_config(c);
                    return read();
                  }),
              cmd("signal", 2, 3, "name path ?rate?",
                  [&ws](Interpreter&, Args a) {
                    SignalSource s;
                    s.path = a[1];
                    if (a.size() == 3) s.declared_rate = parse_number(a[2], "rate");
                    ws.model.declare_signal(a[0], s);
                    return a[0];
                  }),
              cmd("samples", 2, 2, "name values",
                  [&ws](Interpreter&, Args a) {
                    SignalSource s;
                    s.samples = number_list(a[1], "sample");
                    ws.model.declare_signal(a[0], s);
                    return std::to_string(s.samples.size());
                  }),
              cmd("stability", 0, 0, "",
                  [&ws](Interpreter&, Args) {
                    auto program = sim::compile(ws.model, io::load_signal_files(ws.model, ws.base_dir));
                    return sim::stability_check(program).to_text();
                  }),
              cmd("run", 0, 1, "?steps?",
                  [&ws](Interpreter&, Args a) {
                    SimConfig cfg = ws.model.sim_config();
                    if (!a.empty()) cfg.duration = count_arg(a[0], "steps");
                    auto program =
                        sim::compile(ws.model, io::load_signal_files(ws.model, ws.base_dir));
                    sim::RunControl control;
                    control.cancel = ws.cancel;
                    if (ws.sim_progress) {
                      control.progress = ws.sim_progress;
                      control.progress_every = std::max<std::uint64_t>(1, cfg.duration / 8);
                    }
                    ws.last_run = sim::run(program, cfg, control);
                    const sim::RunResult& r = *ws.last_run;
                    if (r.status == sim::RunStatus::Cancelled) {
                      throw Error(ErrorCode::Cancelled, "simulation cancelled");
                    }
                    if (r.status == sim::RunStatus::Failed) throw Error(r.error, r.message);
                    return "steps " + std::to_string(r.stats.steps) + " channels " +
                           std::to_string(r.channels.size()) + " frames " +
                           std::to_string(r.trace.frame_count());
                  }),
              cmd("stats", 0, 0, "",
                  [&ws](Interpreter&, Args) {
                    const sim::RunResult& r = last_run(ws);
                    return r.stats.to_text(r.channels);
                  }),
          }};
}

Package out_package(Workspace& ws) {
  return {"out",
          {
              cmd("wav", 1, -1, "?-normalize? ?-pcm16? ?-multi? path ?module ...?",
                  [&ws](Interpreter&, Args a) {
                    std::vector<std::string> flags;
                    auto rest = take_flags(a, {"-normalize", "-pcm16", "-multi"}, flags);
                    if (rest.empty()) runtime("out wav needs a path");
                    const sim::RunResult& r = last_run(ws);
                    io::WavOptions o;
                    o.normalize = has_flag(flags, "-normalize");
                    o.encoding = has_flag(flags, "-pcm16") ? io::SampleEncoding::Pcm16
                                                           : io::SampleEncoding::Float32;
                    o.multichannel = has_flag(flags, "-multi");
                    o.sample_rate = static_cast<std::uint32_t>(ws.model.sim_config().sample_rate);
                    for (std::size_t i = 1; i < rest.size(); ++i) o.channels.push_back(one(ws, rest[i]));
                    io::WavExport e = io::export_wav(r.channels, resolve(ws, rest[0]), o);
                    std::vector<std::string> files;
                    for (const auto& f : e.files) files.push_back(f.string());
                    return join_list(files);
                  }),
              cmd("trace", 1, 1, "path",
                  [&ws](Interpreter&, Args a) {
                    const sim::RunResult& r = last_run(ws);
                    fs::path p = resolve(ws, a[0]);
                    io::write_text(p, trace_csv(r.trace));
                    return p.string();
                  }),
              cmd("channels", 0, 0, "",
                  [&ws](Interpreter&, Args) {
                    std::vector<ModuleId> ids;
                    for (const auto& c : last_run(ws).channels) ids.push_back(c.source);
                    return ids_text(ids);
                  }),
              cmd("peak", 1, 1, "module",
                  [&ws](Interpreter&, Args a) {
                    const sim::RunResult& r = last_run(ws);
                    ModuleId id = one(ws, a[0]);
                    const sim::Channel* c = r.channel(id);
                    if (!c) throw Error(ErrorCode::NoSuchChannel, "no channel for module " + a[0]);
                    double peak = 0.0;
                    for (double v : c->samples) peak = std::max(peak, std::fabs(v));
                    return format_number(peak);
                  }),
          }};
}

Package info_package() {
  return {"info",
          {
              cmd("kinds", 0, 0, "",
                  [](Interpreter&, Args) {
                    std::vector<std::string> names;
                    for (ModuleKind k : kAllKinds) names.emplace_back(kind_name(k));
                    return join_list(names);
                  }),
              cmd("params", 1, 1, "KIND",
                  [](Interpreter&, Args a) {
                    std::vector<std::string> names;
                    for (Param p : legal_params(kind_arg(a[0]))) names.emplace_back(param_name(p));
                    return join_list(names);
                  }),
              cmd("family", 1, 1, "KIND",
                  [](Interpreter&, Args a) {
                    return std::string(family_name(family_of(kind_arg(a[0]))));
                  }),
              cmd("packages", 0, 0, "",
                  [](Interpreter& in, Args) { return join_list(in.package_names()); }),
              cmd("commands", 0, 1, "?package?",
                  [](Interpreter& in, Args a) {
                    std::vector<std::string> names;
                    if (a.empty()) {
                      for (const auto& b : in.builtin_names()) names.push_back(b);
                      for (const auto& p : in.package_names()) {
                        for (const auto& c : in.package(p)->commands) names.push_back(p + " " + c.name);
                      }
                    } else {
                      const Package* p = in.package(a[0]);
                      if (!p) runtime("no package \"" + a[0] + "\"");
                      for (const auto& c : p->commands) names.push_back(c.name);
                    }
                    return join_list(names);
                  }),
              cmd("usage", 2, 2, "package command",
                  [](Interpreter& in, Args a) {
                    const Package* p = in.package(a[0]);
                    if (!p) runtime("no package \"" + a[0] + "\"");
                    for (const auto& c : p->commands) {
                      if (c.name == a[1]) return a[0] + " " + c.name + (c.usage.empty() ? "" : " ") + c.usage;
                    }
                    runtime("package \"" + a[0] + "\" has no command \"" + a[1] + "\"");
                  }),
              cmd("exists", 1, 1, "varName",
                  [](Interpreter& in, Args a) {
                    return std::string(in.find_var(a[0]) ? "1" : "0");
                  }),
          }};
}

Package util_package(Workspace& ws) {
  return {"util",
          {
              cmd("range", 2, 3, "from to ?step?",
                  [](Interpreter&, Args a) {
                    std::int64_t from = parse_integer(a[0], "from");
                    std::int64_t to = parse_integer(a[1], "to");
                    std::int64_t step = a.size() == 3 ? parse_integer(a[2], "step") : 1;
                    if (step == 0) runtime("range step must not be zero");
                    if ((to - from) / step > 10'000'000) runtime("range too long");
                    std::string out;
                    for (std::int64_t i = from; step > 0 ? i < to : i > to; i += step) {
                      if (!out.empty()) out.push_back(' ');
                      out += std::to_string(i);
                    }
                    return out;
                  }),
              cmd("format", 1, -1, "fmt ?arg ...?",
                  [](Interpreter&, Args a) { return format_text(a[0], a.subspan(1)); }),
              cmd("puts", 1, 1, "text",
                  [&ws](Interpreter&, Args a) {
                    if (ws.print) ws.print(a[0] + "\n");
                    return std::string{};
                  }),
              cmd("join", 1, 2, "list ?separator?",
                  [](Interpreter&, Args a) {
                    std::string sep = a.size() == 2 ? a[1] : " ";
                    std::string out;
                    auto items = split_list(a[0]);
                    for (std::size_t i = 0; i < items.size(); ++i) {
                      if (i) out += sep;
                      out += items[i];
                    }
                    return out;
                  }),
              cmd("source", 1, 1, "path",
                  [&ws](Interpreter& in, Args a) {
                    return in.eval_body(io::read_text(resolve(ws, a[0])));
                  }),
              cmd("library", 0, 1, "?name?",
                  [&ws](Interpreter& in, Args a) {
                    if (a.empty()) {
                      std::vector<std::string> names;
                      for (const auto& [name, path] : ws.library) names.push_back(name);
                      return join_list(names);
                    }
                    auto it = ws.library.find(a[0]);
                    if (it == ws.library.end()) runtime("no library script \"" + a[0] + "\"");
                    return in.eval_body(io::read_text(it->second));
                  }),
              cmd("stiffness", 2, 3, "hz mass ?sample_rate?",
                  [&ws](Interpreter&, Args a) {
                    double rate = a.size() == 3 ? parse_number(a[2], "sample_rate")
                                                : ws.model.sim_config().sample_rate;
                    return format_number(sim::stiffness_for_frequency(
                        parse_number(a[0], "hz"), parse_number(a[1], "mass"), rate));
                  }),
              cmd("frequency", 2, 3, "K mass ?sample_rate?",
                  [&ws](Interpreter&, Args a) {
                    double rate = a.size() == 3 ? parse_number(a[2], "sample_rate")
                                                : ws.model.sim_config().sample_rate;
                    return format_number(sim::frequency_for_stiffness(
                        parse_number(a[0], "K"), parse_number(a[1], "mass"), rate));
                  }),
          }};
}

}  // namespace

std::vector<Package> standard_packages(Workspace& ws) {
  std::vector<Package> out;
  out.push_back(module_package(ws));
  out.push_back(link_package(ws));
  out.push_back(label_package(ws));
  out.push_back(picker_package(ws));
  out.push_back(param_package(ws));
  out.push_back(state_package(ws));
  out.push_back(bench_package(ws));
  out.push_back(note_package(ws));
  out.push_back(model_package(ws));
  out.push_back(sim_package(ws));
  out.push_back(out_package(ws));
  out.push_back(info_package());
  out.push_back(util_package(ws));
  return out;
}

void install_standard_packages(Interpreter& interp, Workspace& ws) {
  for (auto& p : standard_packages(ws)) interp.register_package(std::move(p));
}

std::map<std::string, fs::path> scan_library(const std::vector<fs::path>& dirs) {
  std::map<std::string, fs::path> out;
  for (const auto& dir : dirs) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pnsl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.emplace(f.stem().string(), f);
  }
  return out;
}

fs::path default_library_dir() {
  if (const char* env = std::getenv("PNET_LIBRARY"); env && *env) return env;
  return PNET_BUNDLED_LIBRARY;
}

std::string trace_csv(const sim::MotionTrace& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "frame,step";
  for (ModuleId id : trace.modules) out << ',' << to_u64(id);
  out << '\n';
  for (std::size_t f = 0; f < trace.frame_count(); ++f) {
    out << f << ',' << f * trace.decimation;
    for (double v : trace.frame(f)) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

}  // namespace pnet::pnsl
