#include <doctest.h>

#include "check_error.hpp"
#include "pnet/core/model.hpp"
#include "pnet/io/app_url.hpp"

using namespace pnet;
using namespace pnet::io;

TEST_CASE("select with a picker") {
  AppUrl u = parse_app_url("pnet:select?picker=/myString/**");
  CHECK(u.action == AppAction::Select);
  CHECK(u.picker() == "/myString/**");
  CHECK(action_name(u.action) == "select");

  Model m;
  for (const char* l : {"/myString/extremities/1", "/myString/extremities/2", "/myString/aModule"}) {
    m.add_label(m.add_module(ModuleKind::MAS), l);
  }
  m.add_module(ModuleKind::MAS);
  CHECK(m.pick(u.picker()).size() == 3);
}

TEST_CASE("percent decoding") {
  AppUrl u = parse_app_url("pnet:select?picker=(/a/**)%20%26%20(/b/**)");
  CHECK(u.picker() == "(/a/**) & (/b/**)");
  CHECK(percent_decode("a%2Fb%41+c") == "a/bA+c");
  CHECK_ERROR_CODE(parse_app_url("pnet:select?picker=/a%2"), ErrorCode::BadScheme);
}

TEST_CASE("goto and run") {
  AppUrl g = parse_app_url("pnet:goto?module=12");
  CHECK(g.action == AppAction::Goto);
  CHECK(g.module() == ModuleId{12});
  AppUrl r = parse_app_url("pnet:run?script=string");
  CHECK(r.action == AppAction::Run);
  CHECK(r.script() == "string");
  CHECK_ERROR_CODE(parse_app_url("pnet:goto?module=x"), ErrorCode::MissingParameter);
}

TEST_CASE("bad URLs") {
  CHECK_ERROR_CODE(parse_app_url("http://example.org"), ErrorCode::BadScheme);
  CHECK_ERROR_CODE(parse_app_url("pnet:explode?x=1"), ErrorCode::BadScheme);
  CHECK_ERROR_CODE(parse_app_url("pnet:select"), ErrorCode::MissingParameter);
  CHECK_ERROR_CODE(parse_app_url("pnet:goto?picker=/a"), ErrorCode::MissingParameter);
  CHECK_ERROR_CODE(parse_app_url("pnet:run?script="), ErrorCode::MissingParameter);
  CHECK_ERROR_CODE(parse_app_url("pnet:select?picker=(("), ErrorCode::PickerSyntaxError);
}

TEST_CASE("note scanning") {
  NoteLinks ok = scan_note(
      "<p>See <a href=\"pnet:select?picker=/myString/**\">the string</a> and "
      "<a href='http://example.org'>docs</a>.<br/></p>");
  REQUIRE(ok.actions.size() == 1);
  CHECK(ok.actions[0].picker() == "/myString/**");
  CHECK(ok.external == std::vector<std::string>{"http://example.org"});
  CHECK(ok.balanced);
  CHECK_FALSE(ok.flagged());

  NoteLinks bad = scan_note("<p><a href=\"pnet:select?picker=((\">x</a>");
  CHECK(bad.broken.size() == 1);
  CHECK_FALSE(bad.balanced);
  CHECK(bad.flagged());

  CHECK(scan_note("").balanced);
  CHECK_NOTHROW(scan_note("<<<a href=>\"'"));
}
