#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pnet/core/error.hpp"
#include "pnet/sim/program.hpp"

namespace pnet::sim {

/// Positions at steps n and n-1 plus per-link force scratch.
struct SimState {
  std::vector<double> x_curr;
  std::vector<double> x_prev;
  std::vector<double> x_next;
  std::vector<double> f_link;
  std::uint64_t n = 0;
};

/// x(0) = X0 and x(-1) = X0 - V0 for every MAT.
SimState initial_state(const SimProgram& program);

struct Channel {
  ModuleId source;
  ModuleKind kind;
  std::vector<double> samples;  // sample n = observation at step n
};

/// Decimated snapshots of traced MAT positions, frame-major.
struct MotionTrace {
  std::uint32_t decimation = 1;
  std::vector<ModuleId> modules;
  std::vector<double> frames;

  std::size_t frame_count() const {
    return modules.empty() ? 0 : frames.size() / modules.size();
  }
  std::span<const double> frame(std::size_t i) const {
    return std::span<const double>(frames).subspan(i * modules.size(), modules.size());
  }
};

struct RunStats {
  std::uint64_t steps = 0;
  double wall_seconds = 0.0;
  double steps_per_sec = 0.0;
  std::vector<double> peak;  // per channel, max |sample|

  /// "steps=... wall_s=... steps_per_sec=..." followed by one peak line per
  /// channel.
  std::string to_text(std::span<const Channel> channels) const;
};

enum class RunStatus : std::uint8_t { Completed, Failed, Cancelled };

struct RunResult {
  RunStatus status = RunStatus::Completed;
  ErrorCode error = ErrorCode::RuntimeError;  // meaningful unless Completed
  std::string message;
  std::uint64_t failed_step = 0;
  ModuleId failed_module = kNoModule;

  std::vector<Channel> channels;
  MotionTrace trace;
  RunStats stats;

  const Channel* channel(ModuleId source) const;
};

/// Progress and cancellation hooks, checked once per step.
struct RunControl {
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(std::uint64_t step, std::uint64_t total)> progress;
  std::uint64_t progress_every = 0;  // steps; 0 disables
};

struct RunOptions {
  std::uint64_t steps = 0;
  unsigned threads = 1;
  RunControl control;
};

inline constexpr int kEngineContract = 1;

struct EngineTraits {
  std::string name;
  int contract_version = 0;
  bool offline = false;        // renders from a SimProgram without a clock
  bool deterministic = false;  // bit-identical output for any thread count
};

class Engine {
 public:
  virtual ~Engine() = default;
  virtual EngineTraits traits() const = 0;
  virtual RunResult run(const SimProgram& program, const RunOptions& options) const = 0;
};

/// Embedded off-time engine: three barrier-separated phases per step with
/// links and MATs split across threads.
class ReferenceEngine final : public Engine {
 public:
  EngineTraits traits() const override;
  RunResult run(const SimProgram& program, const RunOptions& options) const override;
};

/// Single-threaded engine that scatters each link force into per-MAT
/// accumulators instead of gathering per MAT. Used as a differential check on
/// the reference engine.
class NaiveEngine final : public Engine {
 public:
  EngineTraits traits() const override;
  RunResult run(const SimProgram& program, const RunOptions& options) const override;
};

/// Advances one step on the calling thread. Throws NumericBlowup.
void step(const SimProgram& program, SimState& state);

/// Runs with the reference engine.
RunResult run(const SimProgram& program, const SimConfig& config, const RunControl& control = {});

/// The engine subsequent runs dispatch to. Engines must declare the current
/// contract version and offline rendering; anything else is rejected.
class EngineRegistry {
 public:
  EngineRegistry();

  void attach(std::shared_ptr<const Engine> engine);
  std::shared_ptr<const Engine> active() const;
  const std::shared_ptr<const Engine>& reference() const { return reference_; }
  /// Restores the reference engine.
  void reset();

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const Engine> reference_;
  std::shared_ptr<const Engine> active_;
};

}  // namespace pnet::sim
