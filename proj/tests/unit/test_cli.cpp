#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "pnet/cli/cli.hpp"
#include "pnet/io/document.hpp"
#include "pnet/io/wav.hpp"
#include "pnet/sim/engine.hpp"
#include "pnet/sim/program.hpp"
#include "temp_dir.hpp"

using namespace pnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// The installed binary, for exit codes as a shell sees them.
int shell(const std::string& args) {
  std::string cmd = std::string(PNET_TEST_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

const char* kUnstable =
    "set g [module create SOL]; set m [module create MAS]; set l [link create RES $m $g]\n"
    "param set $l K 4.5; state set $m X0 0.5\n"
    "set o [module create SOX]; link attach $o $m";

}  // namespace

TEST_CASE("run builds and saves a document") {
  TempDir dir;
  Outcome r = invoke({"run", "string", "--out", (dir / "s.json").string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == "24\n");
  Model m = io::load_file(dir / "s.json");
  CHECK(m.network().size() == 24);
  CHECK(m.pick("/myString/mass/*").size() == 10);

  r = invoke({"run", "string", "--set", "n=40", "--set", "name=long", "--out", (dir / "l.json").string()});
  CHECK(r.code == cli::kOk);
  CHECK(io::load_file(dir / "l.json").pick("/long/mass/*").size() == 40);

  write(dir / "more.pnsl", "module create MAS 2\nmodule count");
  r = invoke({"run", (dir / "more.pnsl").string(), "--model", (dir / "s.json").string()});
  CHECK(r.out == "26\n");
}

TEST_CASE("run reports script errors with their position") {
  TempDir dir;
  write(dir / "bad.pnsl", "set a 1\nif {$a} {\n  puts x\n");
  Outcome r = invoke({"run", (dir / "bad.pnsl").string()});
  CHECK(r.code == cli::kDomainError);
  CHECK(r.err.find("UnbalancedBrace") != std::string::npos);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(r.err.find("column 9") != std::string::npos);

  r = invoke({"run", "labels", "--model", (dir / "missing.json").string()});
  CHECK(r.code == cli::kDomainError);
  CHECK(r.err.find("IoError") != std::string::npos);

  CHECK(invoke({"run", "no-such-script-anywhere"}).code == cli::kDomainError);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == cli::kUsageError);
  CHECK(invoke({"frobnicate"}).code == cli::kUsageError);
  CHECK(invoke({"simulate"}).code == cli::kUsageError);
  CHECK(invoke({"bench", "--steps", "x"}).code == cli::kUsageError);
  CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("inspect lists picked modules") {
  TempDir dir;
  std::string doc = (dir / "f.json").string();
  REQUIRE(invoke({"run", "labels", "--out", doc}).code == 0);
  Outcome r = invoke({"inspect", doc, "/myString/**"});
  CHECK(r.code == cli::kOk);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("1\tMAS\t/sys/MAS/1 /myString/extremities/1\t", 0) == 0);
  CHECK(r.out == cli::inspect_listing(io::load_file(doc), "/myString/**"));

  r = invoke({"inspect", doc, "/absent/**"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.empty());

  r = invoke({"inspect", doc, "(("});
  CHECK(r.code == cli::kDomainError);
  CHECK(r.err.find("PickerSyntaxError") != std::string::npos);
  CHECK(lines(invoke({"inspect", doc}).out).size() == 3);
}

TEST_CASE("simulate renders the oscillator at its frequency") {
  TempDir dir;
  std::string doc = (dir / "osc.json").string();
  REQUIRE(invoke({"run", "oscillator", "--out", doc}).code == 0);
  std::string wav = (dir / "osc.wav").string();
  Outcome r = invoke({"simulate", doc, "--duration", "1", "-o", wav, "--trace", (dir / "t.csv").string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("steps=44100") != std::string::npos);
  CHECK(r.out.find("peak") != std::string::npos);
  CHECK(fs::exists(dir / "t.csv"));

  io::DecodedWav d = io::decode_wav(io::read_bytes(wav));
  CHECK(d.sample_rate == 44100);
  CHECK(d.format == 3);
  REQUIRE(d.samples.size() == 44100);
  std::size_t n = 1 << 15;
  double expected = 702.0 * static_cast<double>(n) / 44100.0;
  CHECK(std::fabs(static_cast<double>(oracle::peak_bin(d.samples, n)) - expected) <= 1.0);

  // the file equals the library's own rendering
  Model m = io::load_file(doc);
  SimConfig c = m.sim_config();
  c.duration = 44100;
  c.trace_mode = TraceMode::None;
  sim::RunResult res = sim::run(sim::compile(m.network(), c, {}), c);
  io::export_wav(res.channels, dir / "lib.wav", io::WavOptions{});
  CHECK(io::read_bytes(dir / "lib.wav") == io::read_bytes(wav));
}

TEST_CASE("thread count does not change the file") {
  TempDir dir;
  std::string doc = (dir / "s.json").string();
  REQUIRE(invoke({"run", "string", "--out", doc}).code == 0);
  std::string a = (dir / "a.wav").string(), b = (dir / "b.wav").string();
  REQUIRE(invoke({"simulate", doc, "-d", "0.5", "-t", "1", "-o", a}).code == 0);
  REQUIRE(invoke({"simulate", doc, "-d", "0.5", "-t", "8", "-o", b}).code == 0);
  CHECK(io::read_bytes(a) == io::read_bytes(b));
}

TEST_CASE("the stability check refuses to run") {
  TempDir dir;
  write(dir / "u.pnsl", kUnstable);
  std::string doc = (dir / "u.json").string();
  REQUIRE(invoke({"run", (dir / "u.pnsl").string(), "--out", doc}).code == 0);
  std::string wav = (dir / "u.wav").string();
  Outcome r = invoke({"simulate", doc, "--check", "-o", wav});
  CHECK(r.code == cli::kDomainError);
  CHECK((r.out + r.err).find("unstable") != std::string::npos);
  CHECK_FALSE(fs::exists(wav));

  // without the check the run itself diverges
  r = invoke({"simulate", doc, "-o", wav});
  CHECK(r.code == cli::kDomainError);
  CHECK(r.err.find("NumericBlowup") != std::string::npos);
  CHECK(r.err.find("step") != std::string::npos);
}

TEST_CASE("bench writes CSV") {
  TempDir dir;
  std::string csv = (dir / "b.csv").string();
  Outcome r = invoke({"bench", "-n", "100,200", "-s", "500", "-o", csv});
  CHECK(r.code == cli::kOk);
  std::ifstream in(csv);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  auto rows = lines(text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == cli::kBenchHeader);
  CHECK(rows[1].rfind("100,500,", 0) == 0);
  CHECK(rows[2].rfind("200,500,", 0) == 0);
}

TEST_CASE("the binary exits with the documented codes") {
  TempDir dir;
  CHECK(shell("inspect " + (dir / "absent.json").string()) == 1);
  CHECK(shell("no-such-command") == 2);
  CHECK(shell("run labels --out " + (dir / "x.json").string()) == 0);
  CHECK(shell("inspect " + (dir / "x.json").string() + " '(('") == 1);
}
