#include <doctest.h>

#include <cmath>
#include <cstring>

#include "check_error.hpp"
#include "oracles.hpp"
#include "pnet/io/wav.hpp"
#include "temp_dir.hpp"

using namespace pnet;
using namespace pnet::io;

namespace {

std::uint32_t u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}
std::uint16_t u16(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

sim::Channel channel(std::uint64_t id, std::vector<double> samples) {
  return sim::Channel{ModuleId{id}, ModuleKind::SOX, std::move(samples)};
}

// A 16-bit PCM file built by hand, independent of the encoder.
std::vector<std::uint8_t> pcm16_file(std::uint32_t rate, std::uint16_t channels,
                                     const std::vector<std::int16_t>& samples) {
  std::vector<std::uint8_t> b;
  auto put = [&](const void* p, std::size_t n) {
    auto* c = static_cast<const std::uint8_t*>(p);
    b.insert(b.end(), c, c + n);
  };
  std::uint32_t data = static_cast<std::uint32_t>(samples.size() * 2);
  std::uint32_t riff = 36 + data, fmt = 16, byte_rate = rate * channels * 2;
  std::uint16_t tag = 1, align = static_cast<std::uint16_t>(channels * 2), bits = 16;
  put("RIFF", 4); put(&riff, 4); put("WAVE", 4);
  put("fmt ", 4); put(&fmt, 4); put(&tag, 2); put(&channels, 2); put(&rate, 4);
  put(&byte_rate, 4); put(&align, 2); put(&bits, 2);
  put("data", 4); put(&data, 4);
  for (auto s : samples) put(&s, 2);
  return b;
}

}  // namespace

TEST_CASE("one second of silence") {
  std::vector<double> zeros(44100, 0.0);
  std::span<const double> ch(zeros);
  auto bytes = encode_wav(std::span<const std::span<const double>>(&ch, 1), 44100,
                          SampleEncoding::Float32, 1.0);
  REQUIRE(bytes.size() >= 44 + 44100 * 4);
  CHECK(std::memcmp(bytes.data(), "RIFF", 4) == 0);
  CHECK(std::memcmp(bytes.data() + 8, "WAVE", 4) == 0);
  DecodedWav d = decode_wav(bytes);
  CHECK(d.format == 3);
  CHECK(d.channels == 1);
  CHECK(d.sample_rate == 44100);
  CHECK(d.bits == 32);
  CHECK(d.samples == zeros);
  CHECK(u32(bytes, 4) == bytes.size() - 8);
  CHECK(u16(bytes, 20) == 3);
  CHECK(u32(bytes, 24) == 44100);
}

TEST_CASE("16-bit export clamps and counts clipping") {
  TempDir dir;
  std::vector<sim::Channel> chans{channel(3, {0.0, 0.5, 2.0, -3.0, -1.0})};
  WavOptions opt;
  opt.encoding = SampleEncoding::Pcm16;
  WavExport ex = export_wav(chans, dir / "out.wav", opt);
  CHECK(ex.clipped >= 1);
  CHECK(ex.clipped == 2);
  REQUIRE(ex.files.size() == 1);
  DecodedWav d = decode_wav(read_bytes(ex.files[0]));
  CHECK(d.format == 1);
  CHECK(d.bits == 16);
  REQUIRE(d.samples.size() == 5);
  CHECK(d.samples[2] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(d.samples[3] == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(d.samples[1] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("normalization scales the common peak to -1 dBFS") {
  TempDir dir;
  std::vector<sim::Channel> chans{channel(1, {0.0, 0.25, -0.5}), channel(2, {4.0, -2.0, 0.0})};
  WavOptions opt;
  opt.normalize = true;
  opt.encoding = SampleEncoding::Pcm16;
  WavExport ex = export_wav(chans, dir / "n.wav", opt);
  CHECK(ex.clipped == 0);
  CHECK(ex.gain == doctest::Approx(kNormalizePeak / 4.0));
  REQUIRE(ex.files.size() == 2);
  CHECK(ex.files[0].filename() == "n_1.wav");
  CHECK(ex.files[1].filename() == "n_2.wav");
  DecodedWav d = decode_wav(read_bytes(ex.files[1]));
  CHECK(d.samples[0] == doctest::Approx(std::pow(10.0, -1.0 / 20.0)).epsilon(1e-4));
}

TEST_CASE("float export and import are exact") {
  TempDir dir;
  std::vector<double> wave;
  for (int i = 0; i < 1000; ++i) wave.push_back(static_cast<float>(0.7 * std::sin(0.01 * i)));
  std::vector<sim::Channel> chans{channel(9, wave)};
  WavExport ex = export_wav(chans, dir / "w.wav", WavOptions{});
  CHECK(import_signal(ex.files[0], 44100.0) == wave);

  std::vector<sim::Channel> silent{channel(1, std::vector<double>(44100, 0.0))};
  WavExport s = export_wav(silent, dir / "s.wav", WavOptions{});
  CHECK(import_signal(s.files[0], 44100.0) == std::vector<double>(44100, 0.0));
}

TEST_CASE("multichannel files interleave the channels") {
  TempDir dir;
  std::vector<sim::Channel> chans{channel(1, {0.125, 0.25}), channel(2, {-0.5, 1.0})};
  WavOptions opt;
  opt.multichannel = true;
  WavExport ex = export_wav(chans, dir / "m.wav", opt);
  REQUIRE(ex.files.size() == 1);
  DecodedWav d = decode_wav(read_bytes(ex.files[0]));
  CHECK(d.channels == 2);
  CHECK(d.samples == std::vector<double>{0.125, -0.5, 0.25, 1.0});
  // an input signal must be mono
  CHECK_ERROR_CODE(import_signal(ex.files[0], 44100.0), ErrorCode::UnsupportedFormat);
}

TEST_CASE("channel selection") {
  TempDir dir;
  std::vector<sim::Channel> chans{channel(1, {0.1}), channel(2, {0.2})};
  WavOptions opt;
  opt.channels = {ModuleId{2}};
  WavExport ex = export_wav(chans, dir / "one.wav", opt);
  REQUIRE(ex.files.size() == 1);
  CHECK(decode_wav(read_bytes(ex.files[0])).samples == std::vector<double>{static_cast<float>(0.2)});
  opt.channels = {ModuleId{5}};
  CHECK_ERROR_CODE(export_wav(chans, dir / "x.wav", opt), ErrorCode::EmptyChannelSet);
  CHECK_ERROR_CODE(export_wav({}, dir / "y.wav", WavOptions{}), ErrorCode::EmptyChannelSet);
}

TEST_CASE("importing hand-built and raw files") {
  TempDir dir;
  write_bytes(dir / "p.wav", pcm16_file(44100, 1, {0, 16384, -32768}));
  CHECK(import_signal(dir / "p.wav", 44100.0) == std::vector<double>{0.0, 0.5, -1.0});

  write_bytes(dir / "hi.wav", pcm16_file(48000, 1, {0, 1}));
  CHECK_ERROR_CODE(import_signal(dir / "hi.wav", 44100.0), ErrorCode::RateMismatch);

  std::vector<double> raw(100);
  for (int i = 0; i < 100; ++i) raw[i] = i * 0.01 - 0.5;
  std::vector<std::uint8_t> bytes(raw.size() * 8);
  std::memcpy(bytes.data(), raw.data(), bytes.size());
  write_bytes(dir / "r.raw", bytes);
  CHECK(import_signal(dir / "r.raw", 44100.0, 44100.0) == raw);
  CHECK_ERROR_CODE(import_signal(dir / "r.raw", 44100.0, 48000.0), ErrorCode::RateMismatch);
  CHECK_ERROR_CODE(import_signal(dir / "r.raw", 44100.0), ErrorCode::UnsupportedFormat);
  io::write_bytes(dir / "r.raw.rate", std::vector<std::uint8_t>{'4', '4', '1', '0', '0', '\n'});
  CHECK(import_signal(dir / "r.raw", 44100.0).size() == 100);

  write_bytes(dir / "odd.raw", std::vector<std::uint8_t>(13, 0));
  CHECK_ERROR_CODE(import_signal(dir / "odd.raw", 44100.0, 44100.0), ErrorCode::UnsupportedFormat);
  CHECK_ERROR_CODE(decode_wav(std::vector<std::uint8_t>{'R', 'I', 'F', 'F'}), ErrorCode::UnsupportedFormat);
  CHECK_ERROR_CODE(import_signal(dir / "absent.wav", 44100.0), ErrorCode::IoError);
}

TEST_CASE("an exported oscillator keeps its pitch") {
  TempDir dir;
  const double fs = 44100.0, k = 0.0995;
  std::vector<double> x;
  double prev = 0.5, cur = 0.5;
  for (int n = 0; n < 1 << 15; ++n) {
    x.push_back(cur);
    double next = 2 * cur - prev - k * cur;
    prev = cur;
    cur = next;
  }
  std::vector<sim::Channel> chans{channel(1, x)};
  WavExport ex = export_wav(chans, dir / "o.wav", WavOptions{});
  auto back = import_signal(ex.files[0], fs);
  double expected = oracle::oscillator_hz(k, 1.0, fs) * (1 << 15) / fs;
  CHECK(std::fabs(static_cast<double>(oracle::peak_bin(back, 1 << 15)) - expected) <= 1.0);
}
