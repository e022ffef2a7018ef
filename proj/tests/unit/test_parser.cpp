#include <doctest.h>

#include <random>

#include "check_error.hpp"
#include "pnet/pnsl/ast.hpp"

using namespace pnet;
using namespace pnet::pnsl;

namespace {

SourcePos error_pos(std::string_view src) {
  try {
    parse(src);
  } catch (const Error& e) {
    REQUIRE(e.pos());
    return *e.pos();
  }
  FAIL("no error");
  return {};
}

// Random script text built from fragments that cover every word form.
std::string random_word(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  static const char* kBare[] = {"set", "x", "module", "/a/**", "0.5", "-1", "a.b", "K", "%d"};
  switch (pick(depth > 2 ? 6 : 8)) {
    case 0: case 1: return kBare[pick(9)];
    case 2: return "$v" + std::to_string(pick(3));
    case 3: return "${a b}";
    case 4: return "{lit $x [y] {nested {deep}} \\{}";
    case 5: return "\"q $x \\t \\\" \\$ end\"";
    case 6: {
      std::string s = "[";
      int n = 1 + pick(3);
      for (int i = 0; i < n; ++i) s += (i ? " " : "") + random_word(rng, depth + 1);
      return s + "]";
    }
    default:
      return std::string("a$x") + "[" + random_word(rng, depth + 1) + "]" + "\\ z";
  }
}

std::string random_script(std::mt19937_64& rng) {
  std::string out;
  int commands = 1 + static_cast<int>(rng() % 4);
  for (int c = 0; c < commands; ++c) {
    if (rng() % 5 == 0) out += "# a comment; with [stuff]\n";
    int words = 1 + static_cast<int>(rng() % 5);
    for (int w = 0; w < words; ++w) out += (w ? (rng() % 4 ? " " : " \\\n ") : "") + random_word(rng, 0);
    out += rng() % 2 ? ";" : "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("flat command") {
  Script s = parse("module create MAS 3");
  REQUIRE(s.commands.size() == 1);
  CHECK(s.commands[0].words.size() == 4);
  CHECK(s.commands[0].words[0].kind == WordKind::Literal);
}

TEST_CASE("separator and variable") {
  Script s = parse("set n 5; module create MAS $n");
  REQUIRE(s.commands.size() == 2);
  const Word& w = s.commands[1].words.back();
  CHECK(w.kind == WordKind::VariableRef);
  CHECK(w.parts[0].text == "n");
  CHECK(s.commands[1].pos.line == 1);
  CHECK(s.commands[1].pos.column == 10);
}

TEST_CASE("bracket word holds a nested script") {
  Script s = parse("param set {/myString/**} K [expr 0.1/2]");
  REQUIRE(s.commands.size() == 1);
  const auto& words = s.commands[0].words;
  REQUIRE(words.size() == 5);
  CHECK(words[2].kind == WordKind::Brace);
  CHECK(words[2].parts[0].text == "/myString/**");
  REQUIRE(words[4].kind == WordKind::Bracket);
  const Script& inner = *words[4].parts[0].script;
  REQUIRE(inner.commands.size() == 1);
  CHECK(inner.commands[0].words.size() == 2);
  CHECK(parse(print(s)) == s);
}

TEST_CASE("braces are opaque") {
  std::string body = "a $b [c d] \\n \"e\" {f {g}}\n  h";
  Script s = parse("puts {" + body + "}");
  CHECK(s.commands[0].words[1].parts[0].text == body);
}

TEST_CASE("quoted words and escapes") {
  Script s = parse("x \"a\\tb\\n\\\"c\\$d\"");
  const Word& w = s.commands[0].words[1];
  CHECK(w.kind == WordKind::Quoted);
  REQUIRE(w.parts.size() == 1);
  CHECK(w.parts[0].text == "a\tb\n\"c$d");
  Script cont = parse("a\\\nb c");
  REQUIRE(cont.commands.size() == 1);
  CHECK(cont.commands[0].words.size() == 3);
}

TEST_CASE("compound words") {
  Script s = parse("a$x[b]c");
  const Word& w = s.commands[0].words[0];
  CHECK(w.kind == WordKind::Compound);
  REQUIRE(w.parts.size() == 4);
  CHECK(w.parts[1].kind == Part::Kind::Variable);
  CHECK(w.parts[2].kind == Part::Kind::Command);
}

TEST_CASE("comments only at command start") {
  Script s = parse("# leading\nset x 1 ;# trailing\nset y # not a comment");
  REQUIRE(s.commands.size() == 2);
  CHECK(s.commands[1].words.size() == 6);
  CHECK(parse("   # indented\n").commands.empty());
  CHECK(parse("\n\n;;\n").commands.empty());
}

TEST_CASE("parse errors carry positions") {
  CHECK_ERROR_CODE(parse("set x {abc"), ErrorCode::UnbalancedBrace);
  CHECK_ERROR_CODE(parse("set x [abc"), ErrorCode::UnbalancedBracket);
  CHECK_ERROR_CODE(parse("set x \"abc"), ErrorCode::UnbalancedQuote);
  CHECK_ERROR_CODE(parse("set x $"), ErrorCode::EmptyVariableName);
  CHECK_ERROR_CODE(parse("set x ${}"), ErrorCode::EmptyVariableName);
  CHECK_ERROR_CODE(parse("set x {a}b"), ErrorCode::UnbalancedBrace);

  SourcePos p = error_pos("set a 1\nif {$a} {\n  puts x\n");
  CHECK(p.line == 2);
  CHECK(p.column == 9);
  p = error_pos("set a [b\n");
  CHECK(p.line == 1);
  CHECK(p.column == 7);
}

TEST_CASE("nesting limit") {
  std::string deep;
  for (int i = 0; i <= kMaxParseDepth; ++i) deep += "[";
  deep += "x";
  for (int i = 0; i <= kMaxParseDepth; ++i) deep += "]";
  CHECK_ERROR_CODE(parse(deep), ErrorCode::LimitExceeded);
  std::string ok = "[[[[x]]]]";
  CHECK_NOTHROW(parse(ok));
}

TEST_CASE("token stream") {
  auto tokens = tokenize("set x {a b}; # c\nputs [f $y] \"q\" $z");
  std::vector<TokenKind> kinds;
  for (const auto& t : tokens) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<TokenKind>{TokenKind::Word, TokenKind::Word, TokenKind::BraceBlock,
                                        TokenKind::CommandSeparator, TokenKind::Comment,
                                        TokenKind::CommandSeparator, TokenKind::Word,
                                        TokenKind::BracketSubstitution, TokenKind::QuotedWord,
                                        TokenKind::VariableRef});
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto& a = tokens[i - 1].pos;
    const auto& b = tokens[i].pos;
    CHECK((a.line < b.line || (a.line == b.line && a.column < b.column)));
  }
  CHECK(token_kind_name(TokenKind::BraceBlock) == "brace-block");
}

TEST_CASE("print and parse reach a fixed point") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    std::string src = random_script(rng);
    Script s;
    try {
      s = parse(src);
    } catch (const Error& e) {
      FAIL_CHECK("generated script failed to parse: " << e.what() << "\n" << src);
      continue;
    }
    std::string printed = print(s);
    Script again = parse(printed);
    CHECK_MESSAGE(again == s, src << "\n--- printed ---\n" << printed);
    CHECK(print(again) == printed);
  }
}
