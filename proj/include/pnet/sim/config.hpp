#pragma once

#include <cstdint>
#include <string>

namespace pnet {

enum class TraceMode : std::uint8_t { All, None, Picker };

struct SimConfig {
  double sample_rate = 44100.0;     // Hz
  std::uint64_t duration = 44100;   // steps
  std::uint32_t trace_decimation = 64;
  TraceMode trace_mode = TraceMode::All;
  std::string trace_picker;         // TraceMode::Picker only
  unsigned thread_count = 1;

  /// Throws InvalidValue on a non-positive rate, zero decimation or zero threads.
  void check() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

}  // namespace pnet
