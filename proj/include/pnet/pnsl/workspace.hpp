#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pnet/core/model.hpp"
#include "pnet/pnsl/interp.hpp"
#include "pnet/sim/engine.hpp"

namespace pnet::pnsl {

/// The state scripts act on.
struct Workspace {
  Model model;
  std::optional<sim::RunResult> last_run;
  std::filesystem::path base_dir = ".";  // relative paths in scripts
  std::map<std::string, std::filesystem::path> library;  // name -> script file
  std::function<void(std::string_view)> print;           // "util puts"; default: dropped
  const std::atomic<bool>* cancel = nullptr;              // honoured by "sim run"
  std::function<void(std::uint64_t, std::uint64_t)> sim_progress;
  std::uint64_t generation = 0;  // bumped whenever the model is replaced
};

/// The thirteen standard packages.
inline constexpr const char* kStandardPackages[] = {
    "module", "link", "label", "picker", "param", "state", "bench",
    "note",   "model", "sim", "out",   "info",  "util"};

std::vector<Package> standard_packages(Workspace& ws);
void install_standard_packages(Interpreter& interp, Workspace& ws);

/// Collects "*.pnsl" scripts by stem name; earlier directories win.
std::map<std::string, std::filesystem::path> scan_library(
    const std::vector<std::filesystem::path>& dirs);

/// PNET_LIBRARY when set, else the bundled directory.
std::filesystem::path default_library_dir();

/// Writes a motion trace as CSV: "frame,step,<id>,..." then one row per frame.
std::string trace_csv(const sim::MotionTrace& trace);

}  // namespace pnet::pnsl
