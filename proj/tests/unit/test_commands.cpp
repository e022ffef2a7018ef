#include <doctest.h>

#include <algorithm>
#include <ranges>

#include "check_error.hpp"
#include "generators.hpp"
#include "pnet/pnsl/workspace.hpp"

using namespace pnet;
using namespace pnet::pnsl;

namespace {

struct Session {
  Workspace ws;
  Interpreter in;
  Session() { install_standard_packages(in, ws); }
  std::string run(std::string_view src) { return in.eval(src); }
};

}  // namespace

TEST_CASE("all thirteen packages are installed") {
  Session s;
  CHECK(s.in.package_count() == 13);
  CHECK(split_list(s.run("info packages")).size() == 13);
  auto names = s.in.package_names();
  for (const char* p : kStandardPackages) {
    CHECK(std::find(names.begin(), names.end(), p) != names.end());
  }
}

TEST_CASE("module create matches the direct API") {
  Session s;
  CHECK(s.run("module create MAS 10") == "1 2 3 4 5 6 7 8 9 10");
  Model direct;
  for (int i = 0; i < 10; ++i) direct.add_module(ModuleKind::MAS);
  CHECK(gen::canonical(s.ws.model) == gen::canonical(direct));
  CHECK(s.ws.model == direct);
  CHECK(s.run("module count") == "10");
  CHECK(s.run("module kind 3") == "MAS");
  CHECK(s.run("module exists 11") == "0");
}

TEST_CASE("a loop builds the same network as the API") {
  Session s;
  s.run(R"(
    set prev [module create SOL]
    label add $prev /s/ground
    for {set i 1} {$i <= 3} {incr i} {
      set m [module create MAS]
      label add $m /s/mass/$i
      link create REF $prev $m
      set prev $m
    }
    param set /sys/REF/* K 0.1
    param set /sys/REF/* Z 0.001
    state set /s/mass/2 X0 0.5
  )");

  Model d;
  ModuleId prev = d.add_module(ModuleKind::SOL);
  d.add_label(prev, "/s/ground");
  std::vector<ModuleId> links;
  for (int i = 1; i <= 3; ++i) {
    ModuleId m = d.add_module(ModuleKind::MAS);
    d.add_label(m, "/s/mass/" + std::to_string(i));
    ModuleId l = d.add_module(ModuleKind::REF);
    d.connect(l, prev, m);
    links.push_back(l);
    prev = m;
  }
  d.set_param(links, Param::K, 0.1, SetMode::Strict);
  d.set_param(links, Param::Z, 0.001, SetMode::Strict);
  ModuleId mid = *d.labels().target("/s/mass/2");
  d.set_state(std::vector<ModuleId>{mid}, StateVar::X0, 0.5, SetMode::Strict);
  CHECK(gen::canonical(s.ws.model) == gen::canonical(d));
}

TEST_CASE("param set through a picker hits exactly the picked modules") {
  gen::Rng rng(8);
  Session s;
  gen::populate_labels(s.ws.model, rng, 40, 80);
  s.run("module create REF 10");
  for (int i = 0; i < 30; ++i) {
    std::string picker = gen::random_picker(rng, 2)->text();
    ModuleSet picked = s.ws.model.pick(picker);
    Model before = s.ws.model;
    std::string n = s.run("param set -lenient {" + picker + "} M 2.5");
    std::size_t mats = 0;
    for (ModuleId id : s.ws.model.network().modules() | std::views::keys) {
      if (s.ws.model.network().at(id).kind != ModuleKind::MAS) continue;
      bool in_set = std::binary_search(picked.begin(), picked.end(), id);
      double m = std::get<double>(s.ws.model.network().get_param(id, Param::M));
      double was = std::get<double>(before.network().get_param(id, Param::M));
      if (in_set) {
        ++mats;
        CHECK(m == 2.5);
      } else {
        CHECK(m == was);
      }
    }
    CHECK(n == std::to_string(mats));
    s.run("param set -lenient /sys/MAS/* M 1");
  }
}

TEST_CASE("strict param set leaves the model untouched on failure") {
  Session s;
  s.run("module create MAS 3; module create RES");
  Model before = s.ws.model;
  std::uint64_t rev = s.ws.model.revision();
  CHECK_ERROR_CODE(s.run("param set /sys/** K 0.1"), ErrorCode::RuntimeError);
  CHECK(s.ws.model == before);
  CHECK(s.ws.model.revision() == rev);
  CHECK(s.run("param set -lenient /sys/** K 0.1") == "1");
  CHECK(s.run("param set -lenient /sys/MAS/* K 0.1") == "0");
  CHECK(s.ws.model.revision() == rev + 1);
  CHECK_ERROR_CODE(s.run("param set /sys/MAS/* M 0"), ErrorCode::RuntimeError);
  CHECK_ERROR_CODE(s.run("param set /sys/MAS/* Q 1"), ErrorCode::RuntimeError);
  CHECK(s.run("param get 1 M") == "1");
}

TEST_CASE("command errors keep their domain cause") {
  Session s;
  s.run("module create MAS 2");
  s.run("label add 1 /a");
  try {
    s.run("label add 2 /a");
    FAIL("expected an error");
  } catch (const Error& e) {
    REQUIRE(e.cause());
    CHECK(*e.cause() == ErrorCode::LabelTaken);
  }
  try {
    s.run("link create REF 1 1");
    FAIL("expected an error");
  } catch (const Error& e) {
    REQUIRE(e.cause());
    CHECK(*e.cause() == ErrorCode::SelfLink);
  }
  CHECK(s.run("module count") == "2");
  CHECK_ERROR_CODE(s.run("picker eval (("), ErrorCode::PickerSyntaxError);
}

TEST_CASE("tables, states and notes") {
  Session s;
  s.run("module create MAS 2; link create LNL 1 2");
  s.run("param set 3 fK {{-1 0 1} {-0.1 0 0.1}}");
  CHECK(s.run("param get 3 fK") == "{-1 0 1} {-0.1 0 0.1}");
  CHECK_ERROR_CODE(s.run("param set 3 fK {{1 0} {0 1}}"), ErrorCode::RuntimeError);
  s.run("state set 1 V0 0.25");
  CHECK(s.run("state get 1 V0") == "0.25");
  std::string note = s.run("note add 10 20 {<b>bridge</b>}");
  CHECK(s.run("note text " + note) == "<b>bridge</b>");
  s.run("bench move 1 3 4");
  CHECK(s.run("bench pos 1") == "3 4");
}

TEST_CASE("scripts are deterministic") {
  const char* src =
      "for {set i 0} {$i < 20} {incr i} {set m [module create MAS]; label add $m /r/$i}\n"
      "foreach m [picker eval /r/1*] {state set $m X0 [expr $m * 0.01]}\n"
      "module delete /r/5";
  Session a, b;
  a.run(src);
  b.run(src);
  CHECK(a.ws.model == b.ws.model);
  CHECK(gen::canonical(a.ws.model) == gen::canonical(b.ws.model));
}

TEST_CASE("util helpers") {
  Session s;
  CHECK(s.run("util range 0 5") == "0 1 2 3 4");
  CHECK(s.run("util format {%03d-%s-%.2f} 7 x 0.5") == "007-x-0.50");
  CHECK(s.run("util join {a b c} ,") == "a,b,c");
  std::string out;
  s.ws.print = [&](std::string_view t) { out += t; };
  s.run("util puts hello");
  CHECK(out.find("hello") != std::string::npos);
  double k = std::stod(s.run("util stiffness 702 1 44100"));
  CHECK(std::stod(s.run("util frequency " + format_number(k) + " 1 44100")) == doctest::Approx(702));
}
