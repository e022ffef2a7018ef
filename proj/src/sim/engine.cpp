#include "pnet/sim/engine.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace pnet::sim {

namespace {

inline double signal_at(const std::vector<double>& s, std::uint64_t n, bool hold_last) {
  if (n < s.size()) return s[n];
  if (hold_last && !s.empty()) return s.back();
  return 0.0;
}

// Phase 1: one force per link, stored in f. Returns the first non-finite
// link index in [begin, end) or kNone.
std::uint32_t compute_links(const SimProgram& p, const double* xc, const double* xp, double* f,
                            std::uint32_t begin, std::uint32_t end) {
  std::uint32_t failed = kNone;
  const std::uint32_t* la = p.link_a.data();
  const std::uint32_t* lb = p.link_b.data();
  const double* lk = p.link_k.data();
  const double* lz = p.link_z.data();
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t a = la[i];
    const std::uint32_t b = lb[i];
    const double dx = xc[a] - xc[b];
    const double dv = (xc[a] - xp[a]) - (xc[b] - xp[b]);
    double force;
    switch (p.link_tag[i]) {
      case LinkTag::Spring:
        force = -lk[i] * dx;
        break;
      case LinkTag::Damper:
        force = -lz[i] * dv;
        break;
      case LinkTag::SpringDamper:
        force = -lk[i] * dx - lz[i] * dv;
        break;
      case LinkTag::Buffer: {
        const double s = p.link_s[i];
        force = dx < s ? lk[i] * (s - dx) - lz[i] * dv : 0.0;
        break;
      }
      case LinkTag::Nonlinear: {
        const std::uint32_t t = p.link_table[i];
        force = p.tables[t].eval(dx) + p.tables[t + 1].eval(dv);
        break;
      }
      default:
        force = 0.0;
        break;
    }
    f[i] = force;
    if (!std::isfinite(force) && failed == kNone) failed = i;
  }
  return failed;
}

// Phase 2: gather incident forces in ascending link order, add injections,
// integrate. Returns the first non-finite MAT index in [begin, end) or kNone.
std::uint32_t integrate_mats(const SimProgram& p, const double* xc, const double* xp,
                             const double* f, double* xn, std::uint64_t n, std::uint32_t begin,
                             std::uint32_t end) {
  std::uint32_t failed = kNone;
  const std::uint32_t* off = p.incident_offset.data();
  const std::uint32_t* inc = p.incident_link.data();
  const std::uint8_t* is_a = p.incident_is_a.data();
  for (std::uint32_t m = begin; m < end; ++m) {
    double total = 0.0;
    for (std::uint32_t k = off[m]; k < off[m + 1]; ++k) {
      total = is_a[k] ? total + f[inc[k]] : total - f[inc[k]];
    }
    for (std::uint32_t k = p.inject_offset[m]; k < p.inject_offset[m + 1]; ++k) {
      total += signal_at(p.signals[p.inject_signal[k]], n, false);
    }
    double next;
    switch (p.mat_tag[m]) {
      case MatTag::Mass:
        next = 2.0 * xc[m] - xp[m] + total / p.mass[m];
        break;
      case MatTag::Cel:
        next = p.coef_a[m] * xc[m] + p.coef_b[m] * xp[m] + total / p.mass[m];
        break;
      case MatTag::Fixed:
        next = p.x0[m];
        break;
      case MatTag::Imposed:
        next = signal_at(p.signals[p.mat_signal[m]], n, true);
        break;
      default:
        next = xc[m];
        break;
    }
    xn[m] = next;
    if (!std::isfinite(next) && failed == kNone) failed = m;
  }
  return failed;
}

struct Range {
  std::uint32_t begin;
  std::uint32_t end;
};

std::vector<Range> split(std::size_t count, unsigned parts) {
  std::vector<Range> out(parts);
  std::size_t base = count / parts;
  std::size_t extra = count % parts;
  std::size_t at = 0;
  for (unsigned i = 0; i < parts; ++i) {
    std::size_t len = base + (i < extra ? 1 : 0);
    out[i] = {static_cast<std::uint32_t>(at), static_cast<std::uint32_t>(at + len)};
    at += len;
  }
  return out;
}

void prepare_outputs(const SimProgram& p, std::uint64_t steps, RunResult& result) {
  result.channels.clear();
  for (const auto& spec : p.channels) {
    Channel ch{spec.source, spec.kind, {}};
    ch.samples.reserve(steps);
    result.channels.push_back(std::move(ch));
  }
  result.trace.decimation = p.trace_decimation;
  result.trace.modules = p.trace_ids;
  result.trace.frames.clear();
  if (!p.trace_mats.empty()) {
    std::uint64_t frames = (steps + p.trace_decimation - 1) / p.trace_decimation;
    result.trace.frames.reserve(frames * p.trace_mats.size());
  }
}

// Phase 3: observers record step n.
void observe(const SimProgram& p, const double* xc, const double* f, std::uint64_t n,
             RunResult& result) {
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    const ChannelSpec& spec = p.channels[c];
    double v = spec.kind == ModuleKind::SOX ? xc[spec.index] : f[spec.index];
    result.channels[c].samples.push_back(spec.gain * v);
  }
  if (!p.trace_mats.empty() && n % p.trace_decimation == 0) {
    for (std::uint32_t m : p.trace_mats) result.trace.frames.push_back(xc[m]);
  }
}

void finish_stats(RunResult& result, std::uint64_t steps, double seconds) {
  result.stats.steps = steps;
  result.stats.wall_seconds = seconds;
  result.stats.steps_per_sec = seconds > 0.0 ? static_cast<double>(steps) / seconds : 0.0;
  result.stats.peak.clear();
  for (const auto& ch : result.channels) {
    double peak = 0.0;
    for (double v : ch.samples) peak = std::max(peak, std::fabs(v));
    result.stats.peak.push_back(peak);
  }
}

void mark_blowup(RunResult& result, const SimProgram& p, std::uint64_t n, bool in_link,
                 std::uint32_t index) {
  result.status = RunStatus::Failed;
  result.error = ErrorCode::NumericBlowup;
  result.failed_step = n;
  result.failed_module = in_link ? p.link_ids[index] : p.mat_ids[index];
  result.message = "non-finite " + std::string(in_link ? "force" : "position") + " at step " +
                   std::to_string(n) + " in module " + to_string(result.failed_module);
}

void mark_cancelled(RunResult& result, std::uint64_t n) {
  result.status = RunStatus::Cancelled;
  result.error = ErrorCode::Cancelled;
  result.message = "cancelled at step " + std::to_string(n);
}

class RunContext {
 public:
  RunContext(const SimProgram& p, const RunOptions& opts, unsigned threads, RunResult& result)
      : p_(p),
        opts_(opts),
        result_(result),
        state_(initial_state(p)),
        link_ranges_(split(p.link_count(), threads)),
        mat_ranges_(split(p.mat_count(), threads)),
        link_failed_(threads, kNone),
        mat_failed_(threads, kNone) {
    xc_ = state_.x_curr.data();
    xp_ = state_.x_prev.data();
    xn_ = state_.x_next.data();
    stop_ = opts.steps == 0 || cancelled();
    if (stop_ && opts.steps != 0) mark_cancelled(result_, 0);
  }

  bool stop() const { return stop_; }
  std::uint64_t steps_done() const { return n_; }

  void phase_links(unsigned tid) {
    link_failed_[tid] = compute_links(p_, xc_, xp_, state_.f_link.data(), link_ranges_[tid].begin,
                                      link_ranges_[tid].end);
  }

  void phase_mats(unsigned tid) {
    mat_failed_[tid] = integrate_mats(p_, xc_, xp_, state_.f_link.data(), xn_, n_,
                                      mat_ranges_[tid].begin, mat_ranges_[tid].end);
  }

  // Runs on exactly one thread after each phase.
  void complete() noexcept {
    if (after_links_) {
      after_links_ = false;
      for (std::uint32_t idx : link_failed_) {
        if (idx != kNone) {
          mark_blowup(result_, p_, n_, true, idx);
          stop_ = true;
          return;
        }
      }
      return;
    }
    after_links_ = true;
    for (std::uint32_t idx : mat_failed_) {
      if (idx != kNone) {
        mark_blowup(result_, p_, n_, false, idx);
        stop_ = true;
        return;
      }
    }
    observe(p_, xc_, state_.f_link.data(), n_, result_);
    double* recycled = xp_;
    xp_ = xc_;
    xc_ = xn_;
    xn_ = recycled;
    ++n_;
    if (n_ >= opts_.steps) {
      stop_ = true;
      return;
    }
    if (cancelled()) {
      mark_cancelled(result_, n_);
      stop_ = true;
      return;
    }
    const RunControl& ctl = opts_.control;
    if (ctl.progress && ctl.progress_every > 0 && n_ % ctl.progress_every == 0) {
      try {
        ctl.progress(n_, opts_.steps);
      } catch (...) {
      }
    }
  }

 private:
  bool cancelled() const {
    return opts_.control.cancel != nullptr &&
           opts_.control.cancel->load(std::memory_order_relaxed);
  }

  const SimProgram& p_;
  const RunOptions& opts_;
  RunResult& result_;
  SimState state_;
  std::vector<Range> link_ranges_;
  std::vector<Range> mat_ranges_;
  std::vector<std::uint32_t> link_failed_;
  std::vector<std::uint32_t> mat_failed_;
  double* xc_ = nullptr;
  double* xp_ = nullptr;
  double* xn_ = nullptr;
  std::uint64_t n_ = 0;
  bool after_links_ = true;
  bool stop_ = false;
};

struct Completion {
  RunContext* ctx;
  void operator()() noexcept { ctx->complete(); }
};

}  // namespace

SimState initial_state(const SimProgram& program) {
  SimState s;
  s.x_curr = program.x0;
  s.x_prev.resize(program.mat_count());
  for (std::size_t m = 0; m < program.mat_count(); ++m) {
    s.x_prev[m] = program.x0[m] - program.v0[m];
  }
  s.x_next.assign(program.mat_count(), 0.0);
  s.f_link.assign(program.link_count(), 0.0);
  return s;
}

void step(const SimProgram& program, SimState& state) {
  auto links = static_cast<std::uint32_t>(program.link_count());
  auto mats = static_cast<std::uint32_t>(program.mat_count());
  std::uint32_t bad = compute_links(program, state.x_curr.data(), state.x_prev.data(),
                                    state.f_link.data(), 0, links);
  if (bad != kNone) {
    throw Error(ErrorCode::NumericBlowup, "non-finite force at step " + std::to_string(state.n) +
                                              " in module " + to_string(program.link_ids[bad]));
  }
  bad = integrate_mats(program, state.x_curr.data(), state.x_prev.data(), state.f_link.data(),
                       state.x_next.data(), state.n, 0, mats);
  if (bad != kNone) {
    throw Error(ErrorCode::NumericBlowup, "non-finite position at step " +
                                              std::to_string(state.n) + " in module " +
                                              to_string(program.mat_ids[bad]));
  }
  std::swap(state.x_prev, state.x_curr);
  std::swap(state.x_curr, state.x_next);
  ++state.n;
}

const Channel* RunResult::channel(ModuleId source) const {
  for (const auto& ch : channels) {
    if (ch.source == source) return &ch;
  }
  return nullptr;
}

std::string RunStats::to_text(std::span<const Channel> channels) const {
  std::ostringstream out;
  out << "steps=" << steps << " wall_s=" << wall_seconds << " steps_per_sec=" << steps_per_sec
      << '\n';
  for (std::size_t i = 0; i < peak.size() && i < channels.size(); ++i) {
    out << "channel " << to_string(channels[i].source) << ' ' << kind_name(channels[i].kind)
        << " peak=" << peak[i] << '\n';
  }
  return out.str();
}

EngineTraits ReferenceEngine::traits() const {
  return {"reference", kEngineContract, true, true};
}

RunResult ReferenceEngine::run(const SimProgram& program, const RunOptions& options) const {
  RunResult result;
  prepare_outputs(program, options.steps, result);
  unsigned threads = std::max(1u, options.threads);
  auto start = std::chrono::steady_clock::now();
  RunContext ctx(program, options, threads, result);
  if (threads == 1) {
    while (!ctx.stop()) {
      ctx.phase_links(0);
      ctx.complete();
      if (ctx.stop()) break;
      ctx.phase_mats(0);
      ctx.complete();
    }
  } else if (!ctx.stop()) {
    std::barrier sync(static_cast<std::ptrdiff_t>(threads), Completion{&ctx});
    auto worker = [&](unsigned tid) {
      while (true) {
        ctx.phase_links(tid);
        sync.arrive_and_wait();
        if (ctx.stop()) break;
        ctx.phase_mats(tid);
        sync.arrive_and_wait();
        if (ctx.stop()) break;
      }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finish_stats(result, ctx.steps_done(), seconds);
  return result;
}

EngineTraits NaiveEngine::traits() const { return {"naive", kEngineContract, true, true}; }

RunResult NaiveEngine::run(const SimProgram& p, const RunOptions& options) const {
  RunResult result;
  prepare_outputs(p, options.steps, result);
  auto start = std::chrono::steady_clock::now();

  const std::size_t mats = p.mat_count();
  const std::size_t links = p.link_count();
  std::vector<double> x(p.x0);
  std::vector<double> x_old(mats);
  for (std::size_t m = 0; m < mats; ++m) x_old[m] = p.x0[m] - p.v0[m];
  std::vector<double> x_new(mats, 0.0);
  std::vector<double> force(links, 0.0);
  std::vector<double> acc(mats, 0.0);

  std::uint64_t n = 0;
  for (; n < options.steps; ++n) {
    if (options.control.cancel != nullptr && options.control.cancel->load()) {
      mark_cancelled(result, n);
      break;
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    bool blown = false;
    for (std::size_t i = 0; i < links && !blown; ++i) {
      std::size_t a = p.link_a[i];
      std::size_t b = p.link_b[i];
      double va = x[a] - x_old[a];
      double vb = x[b] - x_old[b];
      double dx = x[a] - x[b];
      double dv = va - vb;
      double k = p.link_k[i];
      double z = p.link_z[i];
      double fi = 0.0;
      if (p.link_tag[i] == LinkTag::Spring) {
        fi = -k * dx;
      } else if (p.link_tag[i] == LinkTag::Damper) {
        fi = -z * dv;
      } else if (p.link_tag[i] == LinkTag::SpringDamper) {
        fi = -k * dx - z * dv;
      } else if (p.link_tag[i] == LinkTag::Buffer) {
        if (dx < p.link_s[i]) fi = k * (p.link_s[i] - dx) - z * dv;
      } else {
        fi = p.tables[p.link_table[i]].eval(dx) + p.tables[p.link_table[i] + 1].eval(dv);
      }
      force[i] = fi;
      if (!std::isfinite(fi)) {
        mark_blowup(result, p, n, true, static_cast<std::uint32_t>(i));
        blown = true;
      }
      acc[a] = acc[a] + fi;
      acc[b] = acc[b] - fi;
    }
    if (blown) break;
    for (std::size_t m = 0; m < mats && !blown; ++m) {
      for (std::uint32_t k = p.inject_offset[m]; k < p.inject_offset[m + 1]; ++k) {
        const auto& s = p.signals[p.inject_signal[k]];
        acc[m] += n < s.size() ? s[n] : 0.0;
      }
      switch (p.mat_tag[m]) {
        case MatTag::Mass:
          x_new[m] = 2.0 * x[m] - x_old[m] + acc[m] / p.mass[m];
          break;
        case MatTag::Cel:
          x_new[m] = p.coef_a[m] * x[m] + p.coef_b[m] * x_old[m] + acc[m] / p.mass[m];
          break;
        case MatTag::Fixed:
          x_new[m] = p.x0[m];
          break;
        case MatTag::Imposed: {
          const auto& s = p.signals[p.mat_signal[m]];
          x_new[m] = n < s.size() ? s[n] : (s.empty() ? 0.0 : s.back());
          break;
        }
      }
      if (!std::isfinite(x_new[m])) {
        mark_blowup(result, p, n, false, static_cast<std::uint32_t>(m));
        blown = true;
      }
    }
    if (blown) break;
    observe(p, x.data(), force.data(), n, result);
    x_old.swap(x);
    x.swap(x_new);
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finish_stats(result, n, seconds);
  return result;
}

RunResult run(const SimProgram& program, const SimConfig& config, const RunControl& control) {
  RunOptions options;
  options.steps = config.duration;
  options.threads = config.thread_count;
  options.control = control;
  return ReferenceEngine().run(program, options);
}

EngineRegistry::EngineRegistry()
    : reference_(std::make_shared<ReferenceEngine>()), active_(reference_) {}

void EngineRegistry::attach(std::shared_ptr<const Engine> engine) {
  if (!engine) throw Error(ErrorCode::EngineRejected, "no engine given");
  EngineTraits t = engine->traits();
  if (t.contract_version != kEngineContract || !t.offline) {
    throw Error(ErrorCode::EngineRejected,
                "engine '" + t.name + "' does not implement the offline run contract v" +
                    std::to_string(kEngineContract));
  }
  std::lock_guard lock(mutex_);
  if (t.name == "reference") {
    active_ = reference_;
    return;
  }
  active_ = std::move(engine);
}

std::shared_ptr<const Engine> EngineRegistry::active() const {
  std::lock_guard lock(mutex_);
  return active_;
}

void EngineRegistry::reset() {
  std::lock_guard lock(mutex_);
  active_ = reference_;
}

}  // namespace pnet::sim
