#include "pnet/io/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "pnet/core/error.hpp"
#include "pnet/io/document.hpp"

namespace pnet::io {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

[[noreturn]] void unsupported(const std::string& why) {
  throw Error(ErrorCode::UnsupportedFormat, "wav: " + why);
}

}  // namespace

std::vector<std::uint8_t> encode_wav(std::span<const std::span<const double>> channels,
                                     std::uint32_t sample_rate, SampleEncoding encoding,
                                     double gain, std::size_t* clipped) {
  const auto nch = static_cast<std::uint16_t>(channels.size());
  std::size_t frames = 0;
  for (auto c : channels) frames = std::max(frames, c.size());
  const std::uint16_t bits = encoding == SampleEncoding::Float32 ? 32 : 16;
  const std::uint16_t block = static_cast<std::uint16_t>(nch * bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(frames * block);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, encoding == SampleEncoding::Float32 ? 3 : 1);
  put_u16(out, nch);
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);

  std::size_t clip = 0;
  for (std::size_t n = 0; n < frames; ++n) {
    for (auto c : channels) {
      double v = n < c.size() ? c[n] * gain : 0.0;
      if (encoding == SampleEncoding::Float32) {
        float f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put_u32(out, u);
      } else {
        if (v > 1.0 || v < -1.0) {
          ++clip;
          v = std::clamp(v, -1.0, 1.0);
        }
        auto s = static_cast<std::int16_t>(std::lround(v * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(s));
      }
    }
  }
  if (clipped) *clipped = clip;
  return out;
}

WavExport export_wav(std::span<const sim::Channel> channels, const std::filesystem::path& path,
                     const WavOptions& options) {
  std::vector<const sim::Channel*> picked;
  if (options.channels.empty()) {
    for (const auto& c : channels) picked.push_back(&c);
  } else {
    for (ModuleId id : options.channels) {
      auto it = std::find_if(channels.begin(), channels.end(),
                             [&](const sim::Channel& c) { return c.source == id; });
      if (it == channels.end()) {
        throw Error(ErrorCode::EmptyChannelSet, "no output channel for module " + to_string(id));
      }
      picked.push_back(&*it);
    }
  }
  if (picked.empty()) throw Error(ErrorCode::EmptyChannelSet, "no output channels to export");

  WavExport result;
  if (options.normalize) {
    double peak = 0.0;
    for (const auto* c : picked) {
      for (double v : c->samples) peak = std::max(peak, std::fabs(v));
    }
    if (peak > 0.0) result.gain = kNormalizePeak / peak;
  }

  auto emit = [&](std::span<const std::span<const double>> data, const std::filesystem::path& p) {
    std::size_t clipped = 0;
    auto bytes = encode_wav(data, options.sample_rate, options.encoding, result.gain, &clipped);
    write_bytes(p, bytes);
    result.clipped += clipped;
    result.files.push_back(p);
  };

  if (options.multichannel || picked.size() == 1) {
    std::vector<std::span<const double>> data;
    for (const auto* c : picked) data.emplace_back(c->samples);
    emit(data, path);
  } else {
    for (const auto* c : picked) {
      std::filesystem::path p = path.parent_path() /
                                (path.stem().string() + "_" + to_string(c->source) +
                                 path.extension().string());
      std::span<const double> one(c->samples);
      emit(std::span<const std::span<const double>>(&one, 1), p);
    }
  }
  return result;
}

DecodedWav decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    unsupported("not a RIFF/WAVE file");
  }
  DecodedWav wav;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    std::size_t size = get_u32(chunk + 4);
    std::size_t avail = bytes.size() - pos - 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > avail) unsupported("truncated fmt chunk");
      wav.format = get_u16(chunk + 8);
      wav.channels = get_u16(chunk + 10);
      wav.sample_rate = get_u32(chunk + 12);
      wav.bits = get_u16(chunk + 22);
      if (wav.format == 0xFFFE) {
        if (size < 40) unsupported("truncated extensible fmt chunk");
        wav.format = get_u16(chunk + 8 + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min(size, avail);  // tolerate a data size past EOF
      break;
    }
    pos += 8 + size + (size & 1);
  }
  if (!have_fmt) unsupported("missing fmt chunk");
  if (!data) unsupported("missing data chunk");
  if (wav.channels == 0) unsupported("zero channels");
  const bool pcm = wav.format == 1 && (wav.bits == 16 || wav.bits == 24 || wav.bits == 32);
  const bool flt = wav.format == 3 && (wav.bits == 32 || wav.bits == 64);
  if (!pcm && !flt) {
    unsupported("format " + std::to_string(wav.format) + " with " + std::to_string(wav.bits) +
                " bits");
  }
  const std::size_t width = wav.bits / 8;
  const std::size_t count = data_size / width;
  wav.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* p = data + i * width;
    double v = 0.0;
    if (flt && wav.bits == 32) {
      float f;
      std::uint32_t u = get_u32(p);
      std::memcpy(&f, &u, 4);
      v = f;
    } else if (flt) {
      std::uint64_t u = get_u32(p) | (static_cast<std::uint64_t>(get_u32(p + 4)) << 32);
      std::memcpy(&v, &u, 8);
    } else if (wav.bits == 16) {
      v = static_cast<std::int16_t>(get_u16(p)) / 32768.0;
    } else if (wav.bits == 24) {
      std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
      if (s & 0x800000) s -= 0x1000000;
      v = s / 8388608.0;
    } else {
      v = static_cast<std::int32_t>(get_u32(p)) / 2147483648.0;
    }
    wav.samples.push_back(v);
  }
  return wav;
}

std::vector<double> import_signal(const std::filesystem::path& path, double model_rate,
                                  std::optional<double> declared_rate) {
  auto bytes = read_bytes(path);
  auto check_rate = [&](double rate) {
    if (rate != model_rate) {
      throw Error(ErrorCode::RateMismatch, "signal '" + path.string() + "' is at " +
                                               std::to_string(rate) + " Hz but the model runs at " +
                                               std::to_string(model_rate) + " Hz");
    }
  };
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "RIFF", 4) == 0) {
    DecodedWav wav = decode_wav(bytes);
    if (wav.channels != 1) unsupported("input signals must be mono");
    check_rate(wav.sample_rate);
    return std::move(wav.samples);
  }
  if (bytes.size() % 8 != 0) unsupported("raw signal size is not a multiple of 8 bytes");
  std::optional<double> rate = declared_rate;
  if (!rate) {
    std::filesystem::path sidecar = path;
    sidecar += ".rate";
    if (std::filesystem::exists(sidecar)) {
      std::string text = read_text(sidecar);
      try {
        std::size_t used = 0;
        rate = std::stod(text, &used);
      } catch (const std::exception&) {
        unsupported("unreadable rate sidecar '" + sidecar.string() + "'");
      }
    }
  }
  if (!rate) unsupported("raw signal '" + path.string() + "' has no declared sample rate");
  check_rate(*rate);
  std::vector<double> samples(bytes.size() / 8);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::uint8_t* p = bytes.data() + 8 * i;
    std::uint64_t u = get_u32(p) | (static_cast<std::uint64_t>(get_u32(p + 4)) << 32);
    std::memcpy(&samples[i], &u, 8);
  }
  return samples;
}

sim::SignalBank load_signal_files(const Model& model, const std::filesystem::path& base_dir) {
  sim::SignalBank bank;
  for (const auto& [name, source] : model.signals()) {
    if (source.embedded()) continue;
    std::filesystem::path p = source.path;
    if (p.is_relative()) p = base_dir / p;
    std::optional<double> rate;
    if (source.declared_rate > 0) rate = source.declared_rate;
    bank[name] = import_signal(p, model.sim_config().sample_rate, rate);
  }
  return bank;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  return out;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  write_text(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace pnet::io
