#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pnet/core/error.hpp"

namespace pnet::pnsl {

enum class TokenKind : std::uint8_t {
  Word,
  QuotedWord,
  BraceBlock,
  BracketSubstitution,
  VariableRef,
  CommandSeparator,
  Comment,
};

std::string_view token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;  // raw source slice
  SourcePos pos;
};

struct Script;

// One piece of a word: literal text, $name, or [script].
struct Part {
  enum class Kind : std::uint8_t { Literal, Variable, Command };
  Kind kind = Kind::Literal;
  std::string text;  // literal text or variable name
  std::shared_ptr<const Script> script;

  friend bool operator==(const Part& a, const Part& b);
};

enum class WordKind : std::uint8_t {
  Literal,      // bare text, escapes resolved
  Quoted,       // "..." with substitutions
  Brace,        // {...} verbatim
  Bracket,      // a lone [script]
  VariableRef,  // a lone $name
  Compound,     // bare word mixing the above, e.g. a$x[b]
};

struct Word {
  WordKind kind = WordKind::Literal;
  std::vector<Part> parts;  // Brace and Literal words hold one literal part
  SourcePos pos;

  // Positions are ignored.
  friend bool operator==(const Word& a, const Word& b) {
    return a.kind == b.kind && a.parts == b.parts;
  }
};

struct Command {
  std::vector<Word> words;  // never empty
  SourcePos pos;

  friend bool operator==(const Command& a, const Command& b) { return a.words == b.words; }
};

struct Script {
  std::vector<Command> commands;

  friend bool operator==(const Script& a, const Script& b) { return a.commands == b.commands; }
};

inline bool operator==(const Part& a, const Part& b) {
  if (a.kind != b.kind || a.text != b.text) return false;
  if (a.kind != Part::Kind::Command) return true;
  return *a.script == *b.script;
}

inline constexpr int kMaxParseDepth = 1000;

/// Throws UnbalancedBrace, UnbalancedBracket, UnbalancedQuote,
/// EmptyVariableName (all with a position) or LimitExceeded for nesting
/// deeper than kMaxParseDepth.
Script parse(std::string_view source);

/// Top-level token stream of `source`, in source order.
std::vector<Token> tokenize(std::string_view source);

/// Canonical text: one command per line, single spaces between words,
/// "; " between commands inside brackets. parse(print(s)) == s.
std::string print(const Script& script);

}  // namespace pnet::pnsl
