#include "pnet/cli/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pnet/io/document.hpp"
#include "pnet/io/wav.hpp"
#include "pnet/pnsl/workspace.hpp"
#include "pnet/service/session.hpp"
#include "pnet/service/websocket.hpp"
#include "pnet/sim/engine.hpp"
#include "pnet/sim/stability.hpp"

namespace pnet::cli {

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) { g_interrupted = 1; }

void report(std::ostream& err, const Error& e) {
  err << "error: " << error_name(e.code()) << ": " << e.what();
  if (e.pos()) err << " (line " << e.pos()->line << ", column " << e.pos()->column << ")";
  if (e.cause()) err << " [cause " << error_name(*e.cause()) << "]";
  err << '\n';
}

std::string value_text(const ParamValue& v) {
  if (const double* d = std::get_if<double>(&v)) return pnsl::format_number(*d);
  const Table& t = std::get<Table>(v);
  std::vector<std::string> xs, ys;
  for (double x : t.x) xs.push_back(pnsl::format_number(x));
  for (double y : t.y) ys.push_back(pnsl::format_number(y));
  return "{" + pnsl::join_list(xs) + "} {" + pnsl::join_list(ys) + "}";
}

std::filesystem::path resolve_script(const std::string& arg, const pnsl::Workspace& ws) {
  std::filesystem::path p(arg);
  if (std::filesystem::exists(p)) return p;
  if (auto it = ws.library.find(arg); it != ws.library.end()) return it->second;
  return p;  // reading it reports the IoError
}

struct RunOptions {
  std::string script;
  std::string model_in;
  std::string model_out;
  std::vector<std::string> vars;
  std::vector<std::string> library;
};

int do_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  pnsl::Workspace ws;
  std::vector<std::filesystem::path> dirs(o.library.begin(), o.library.end());
  dirs.push_back(pnsl::default_library_dir());
  ws.library = pnsl::scan_library(dirs);
  ws.print = [&out](std::string_view text) { out << text; };
  if (!o.model_in.empty()) ws.model = io::load_file(o.model_in);
  pnsl::Interpreter interp;
  pnsl::install_standard_packages(interp, ws);
  for (const std::string& kv : o.vars) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "error: --set expects NAME=VALUE, got '" << kv << "'\n";
      return kUsageError;
    }
    interp.set_var(kv.substr(0, eq), kv.substr(eq + 1));
  }
  std::string source = io::read_text(resolve_script(o.script, ws));
  std::string result = interp.eval(source);
  if (!o.model_out.empty()) io::save_file(ws.model, o.model_out);
  out << result << '\n';
  return kOk;
}

struct SimulateOptions {
  std::string model;
  std::string out;
  std::string trace;
  double duration = -1;
  unsigned threads = 0;
  bool normalize = false;
  bool pcm16 = false;
  bool multi = false;
  bool check = false;
};

int do_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  Model model = io::load_file(o.model);
  SimConfig cfg = model.sim_config();
  if (o.duration >= 0) {
    cfg.duration = static_cast<std::uint64_t>(std::llround(o.duration * cfg.sample_rate));
  }
  if (o.threads > 0) cfg.thread_count = o.threads;
  if (o.trace.empty()) {
    cfg.trace_mode = TraceMode::None;
  }
  model.set_sim_config(cfg);
  std::filesystem::path base = std::filesystem::path(o.model).parent_path();
  sim::SimProgram program = sim::compile(model, io::load_signal_files(model, base));

  if (o.check) {
    sim::StabilityReport stability = sim::stability_check(program);
    out << stability.to_text();
    if (stability.any_unstable()) {
      err << "error: unstable parameters, not simulating\n";
      return kDomainError;
    }
  }

  sim::RunResult r = sim::run(program, cfg);
  if (r.status != sim::RunStatus::Completed) {
    err << "error: " << error_name(r.error) << ": " << r.message << " (step " << r.failed_step
        << ", module " << to_u64(r.failed_module) << ")\n";
    return kDomainError;
  }

  io::WavOptions wo;
  wo.encoding = o.pcm16 ? io::SampleEncoding::Pcm16 : io::SampleEncoding::Float32;
  wo.normalize = o.normalize;
  wo.multichannel = o.multi;
  wo.sample_rate = static_cast<std::uint32_t>(std::lround(cfg.sample_rate));
  std::filesystem::path wav = o.out.empty()
                                  ? std::filesystem::path(o.model).filename().replace_extension(".wav")
                                  : std::filesystem::path(o.out);
  io::WavExport written = io::export_wav(r.channels, wav, wo);

  out << r.stats.to_text(r.channels);
  for (const auto& f : written.files) out << "wrote " << f.string() << '\n';
  if (written.clipped) out << "clipped " << written.clipped << " samples\n";
  if (!o.trace.empty()) {
    io::write_text(o.trace, pnsl::trace_csv(r.trace));
    out << "wrote " << o.trace << '\n';
  }
  return kOk;
}

int do_inspect(const std::string& path, const std::string& picker, std::ostream& out) {
  Model model = io::load_file(path);
  out << inspect_listing(model, picker);
  return kOk;
}

int do_bench(const std::vector<std::size_t>& sizes, std::uint64_t steps, unsigned threads,
             const std::string& csv, std::ostream& out, std::ostream& err) {
  std::ostringstream text;
  text << kBenchHeader << '\n';
  for (std::size_t n : sizes) {
    BenchRow row = bench_chain(n, steps, threads);
    text << bench_csv_row(row) << '\n';
    err << "modules " << row.module_count << ": build " << row.build_ms << " ms, run "
        << row.wall_ms << " ms\n";
  }
  if (csv.empty()) {
    out << text.str();
  } else {
    io::write_text(csv, text.str());
    out << "wrote " << csv << '\n';
  }
  return kOk;
}

int do_serve(const std::string& host, std::uint16_t port, bool stdio, std::ostream& out) {
  service::Session session;
  if (stdio) {
    service::serve_stdio(session, std::cin, out);
    return kOk;
  }
  service::WebSocketServer server(session, host, port);
  out << "listening on ws://" << host << ":" << server.port() << "/" << std::endl;
  g_interrupted = 0;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  server.start();
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  return kOk;
}

}  // namespace

std::string inspect_listing(const Model& model, std::string_view picker) {
  std::ostringstream out;
  for (ModuleId id : model.pick(picker)) {
    const Module& m = model.network().at(id);
    out << to_u64(id) << '\t' << kind_name(m.kind) << '\t';
    auto labels = model.labels().labels_of(id);
    for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? " " : "") << labels[i];
    out << '\t';
    bool first = true;
    for (Param p : legal_params(m.kind)) {
      out << (first ? "" : " ") << param_name(p) << '=' << value_text(m.param(p));
      first = false;
    }
    if (has_initial_state(m.kind)) {
      out << (first ? "" : " ") << "X0=" << pnsl::format_number(m.init.X0)
          << " V0=" << pnsl::format_number(m.init.V0);
    }
    out << '\n';
  }
  return out.str();
}

std::uint64_t peak_rss_bytes() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      return std::stoull(line.substr(6)) * 1024;
    }
  }
  return 0;
}

BenchRow bench_chain(std::size_t modules, std::uint64_t steps, unsigned threads) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  BenchRow row;
  row.steps = steps;

  pnsl::Workspace ws;
  ws.library = pnsl::scan_library({pnsl::default_library_dir()});
  auto chain = ws.library.find("chain");
  if (chain == ws.library.end()) {
    throw Error(ErrorCode::IoError, "the bundled chain script is missing");
  }
  pnsl::Interpreter interp;
  pnsl::install_standard_packages(interp, ws);
  interp.set_var("modules", std::to_string(modules));
  auto t0 = clock::now();
  interp.eval(io::read_text(chain->second));
  auto t1 = clock::now();
  row.build_ms = ms(t1 - t0);
  row.module_count = ws.model.network().size();

  SimConfig cfg = ws.model.sim_config();
  cfg.duration = steps;
  cfg.thread_count = threads;
  cfg.trace_mode = TraceMode::None;
  ws.model.set_sim_config(cfg);
  auto t2 = clock::now();
  sim::SimProgram program = sim::compile(ws.model);
  sim::RunResult r = sim::run(program, cfg);
  auto t3 = clock::now();
  if (r.status != sim::RunStatus::Completed) throw Error(r.error, r.message);
  row.wall_ms = ms(t3 - t2);
  row.steps_per_sec = row.wall_ms > 0 ? steps / (row.wall_ms / 1000.0) : 0.0;
  row.bytes_peak = peak_rss_bytes();
  return row;
}

std::string bench_csv_row(const BenchRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%llu,%.3f,%.1f,%llu", row.module_count,
                static_cast<unsigned long long>(row.steps), row.wall_ms, row.steps_per_sec,
                static_cast<unsigned long long>(row.bytes_peak));
  return buf;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pnet: mass-interaction modelling and off-time simulation"};
  app.require_subcommand(1, 1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "Evaluate a script against a new or loaded model");
  run->add_option("script", ro.script, "Script file or library script name")->required();
  run->add_option("-m,--model", ro.model_in, "Model document to load first");
  run->add_option("-o,--out", ro.model_out, "Save the resulting model here");
  run->add_option("--set", ro.vars, "Preset a script variable, NAME=VALUE");
  run->add_option("--library", ro.library, "Extra script library directory")->envname("PNET_LIBRARY_EXTRA");

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Render a model document to WAV");
  simulate->add_option("model", so.model, "Model document")->required();
  simulate->add_option("-o,--out", so.out, "Output WAV path (default: <model>.wav)");
  simulate->add_option("-d,--duration", so.duration, "Seconds to simulate")
      ->envname("PNET_DURATION")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("-t,--threads", so.threads, "Worker threads")
      ->envname("PNET_THREADS")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--normalize", so.normalize, "Scale the peak to -1 dBFS")->envname("PNET_NORMALIZE");
  simulate->add_flag("--pcm16", so.pcm16, "16-bit PCM instead of 32-bit float");
  simulate->add_flag("--multi", so.multi, "One multichannel file instead of one per channel");
  simulate->add_flag("--check", so.check, "Refuse to run when the stability check fails");
  simulate->add_option("--trace", so.trace, "Write the motion trace as CSV");

  std::string inspect_model, inspect_picker = "/**";
  auto* inspect = app.add_subcommand("inspect", "List the modules a picker selects");
  inspect->add_option("model", inspect_model, "Model document")->required();
  inspect->add_option("picker", inspect_picker, "Picker expression (default /**)");

  std::vector<std::size_t> bench_sizes{1000, 10000, 100000};
  std::uint64_t bench_steps = 44100;
  unsigned bench_threads = 1;
  std::string bench_csv;
  auto* bench = app.add_subcommand("bench", "Time spring chains of increasing size (CSV)");
  bench->add_option("-n,--modules", bench_sizes, "Module counts")->delimiter(',');
  bench->add_option("-s,--steps", bench_steps, "Steps per run");
  bench->add_option("-t,--threads", bench_threads, "Worker threads")
      ->envname("PNET_THREADS")
      ->check(CLI::PositiveNumber);
  bench->add_option("-o,--out", bench_csv, "CSV output path (default: stdout)");

  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;
  bool stdio = false;
  auto* serve = app.add_subcommand("serve", "Serve the session API");
  serve->add_option("-p,--port", port, "WebSocket port")->envname("PNET_PORT");
  serve->add_option("--host", host, "Bind address")->envname("PNET_HOST");
  serve->add_flag("--stdio", stdio, "JSON lines on stdin/stdout instead of WebSocket");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kUsageError;
  }

  try {
    if (*run) return do_run(ro, out, err);
    if (*simulate) return do_simulate(so, out, err);
    if (*inspect) return do_inspect(inspect_model, inspect_picker, out);
    if (*bench) return do_bench(bench_sizes, bench_steps, bench_threads, bench_csv, out, err);
    if (*serve) return do_serve(host, port, stdio, out);
  } catch (const Error& e) {
    report(err, e);
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace pnet::cli
