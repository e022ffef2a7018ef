#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pnet/core/model.hpp"
#include "pnet/sim/engine.hpp"
#include "pnet/sim/program.hpp"

namespace pnet::io {

enum class SampleEncoding : std::uint8_t { Float32, Pcm16 };

struct WavOptions {
  SampleEncoding encoding = SampleEncoding::Float32;
  bool normalize = false;     // scale the common peak to -1 dBFS
  bool multichannel = false;  // one interleaved file instead of one per channel
  std::vector<ModuleId> channels;  // empty: every channel
  std::uint32_t sample_rate = 44100;
};

struct WavExport {
  std::vector<std::filesystem::path> files;
  std::size_t clipped = 0;  // 16-bit samples outside [-1, 1] before clamping
  double gain = 1.0;
};

inline constexpr double kNormalizePeak = 0.89125093813374556;  // 10^(-1/20)

/// Encodes interleaved RIFF/WAVE bytes (format tag 3 for float, 1 for PCM).
std::vector<std::uint8_t> encode_wav(std::span<const std::span<const double>> channels,
                                     std::uint32_t sample_rate, SampleEncoding encoding,
                                     double gain, std::size_t* clipped = nullptr);

/// Writes one file per selected channel ("<stem>_<id><ext>" when there are
/// several) or one multichannel file. Throws EmptyChannelSet or IoError.
WavExport export_wav(std::span<const sim::Channel> channels, const std::filesystem::path& path,
                     const WavOptions& options);

struct DecodedWav {
  std::uint16_t format = 0;  // 1 PCM, 3 float
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  std::vector<double> samples;  // interleaved
};

/// Accepts PCM 16/24/32-bit and float 32/64-bit, plain or extensible.
/// Throws UnsupportedFormat.
DecodedWav decode_wav(std::span<const std::uint8_t> bytes);

/// Loads a mono input signal. WAV files carry their rate; anything else is
/// read as raw little-endian float64 whose rate comes from `declared_rate`
/// or a "<path>.rate" sidecar. No resampling: a rate differing from
/// `model_rate` throws RateMismatch. Also throws UnsupportedFormat, IoError.
std::vector<double> import_signal(const std::filesystem::path& path, double model_rate,
                                  std::optional<double> declared_rate = std::nullopt);

/// Loads every file-backed signal of `model` (relative paths against
/// `base_dir`). Embedded signals are left to the compiler.
sim::SignalBank load_signal_files(const Model& model, const std::filesystem::path& base_dir);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pnet::io
