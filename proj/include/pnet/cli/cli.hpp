#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "pnet/core/model.hpp"

namespace pnet::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// The whole command line: run, simulate, inspect, bench, serve.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// One tab-separated row per picked module: id, kind, labels (space
/// separated), parameters and initial state as NAME=value.
std::string inspect_listing(const Model& model, std::string_view picker);

struct BenchRow {
  std::size_t module_count = 0;
  std::uint64_t steps = 0;
  double build_ms = 0.0;  // script time, reported separately
  double wall_ms = 0.0;   // compile + simulate
  double steps_per_sec = 0.0;
  std::uint64_t bytes_peak = 0;
};

inline constexpr std::string_view kBenchHeader = "module_count,steps,wall_ms,steps_per_sec,bytes_peak";

/// Builds a spring chain of `modules` modules with the bundled chain script,
/// then compiles and simulates it for `steps` steps.
BenchRow bench_chain(std::size_t modules, std::uint64_t steps, unsigned threads);
std::string bench_csv_row(const BenchRow& row);

/// Peak resident set size of this process (0 when unknown).
std::uint64_t peak_rss_bytes();

}  // namespace pnet::cli
