#include "pnet/pnsl/ast.hpp"

#include <cctype>

namespace pnet::pnsl {

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Word: return "word";
    case TokenKind::QuotedWord: return "quoted-word";
    case TokenKind::BraceBlock: return "brace-block";
    case TokenKind::BracketSubstitution: return "bracket-substitution";
    case TokenKind::VariableRef: return "variable-ref";
    case TokenKind::CommandSeparator: return "command-separator";
    case TokenKind::Comment: return "comment";
  }
  return "?";
}

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token>* tokens) : src_(src), tokens_(tokens) {}

  Script script(bool nested, SourcePos open) {
    if (depth_ >= kMaxParseDepth) {
      throw Error(ErrorCode::LimitExceeded, "script nesting too deep", pos_);
    }
    ++depth_;
    Script out;
    for (;;) {
      skip_blanks();
      if (at_end()) {
        if (nested) throw Error(ErrorCode::UnbalancedBracket, "missing close-bracket", open);
        break;
      }
      char c = peek();
      if (c == '\n' || c == ';') {
        emit(TokenKind::CommandSeparator, i_, i_ + 1, pos_);
        advance();
        continue;
      }
      if (nested && c == ']') break;
      if (c == '#') {
        comment();
        continue;
      }
      out.commands.push_back(command(nested));
    }
    --depth_;
    return out;
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
  }
  void advance() {
    if (src_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  bool continuation() const { return peek() == '\\' && peek(1) == '\n'; }

  void skip_blanks() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (continuation()) {
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  bool at_word_end(bool nested) const {
    if (at_end()) return true;
    char c = peek();
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';' || continuation() ||
           (nested && c == ']');
  }

  void emit(TokenKind kind, std::size_t from, std::size_t to, SourcePos pos) {
    if (tokens_ && depth_ == 1) {
      tokens_->push_back(Token{kind, std::string(src_.substr(from, to - from)), pos});
    }
  }

  void comment() {
    std::size_t from = i_;
    SourcePos pos = pos_;
    while (!at_end() && peek() != '\n') {
      if (continuation()) advance();
      advance();
    }
    emit(TokenKind::Comment, from, i_, pos);
  }

  Command command(bool nested) {
    Command cmd;
    cmd.pos = pos_;
    for (;;) {
      skip_blanks();
      if (at_end()) break;
      char c = peek();
      if (c == '\n' || c == ';' || (nested && c == ']')) break;
      cmd.words.push_back(word(nested));
    }
    return cmd;
  }

  Word word(bool nested) {
    std::size_t from = i_;
    Word w;
    w.pos = pos_;
    char c = peek();
    if (c == '{') {
      w.kind = WordKind::Brace;
      w.parts.push_back(Part{Part::Kind::Literal, brace_body(), nullptr});
      if (!at_word_end(nested)) {
        throw Error(ErrorCode::UnbalancedBrace, "extra characters after close-brace", pos_);
      }
      emit(TokenKind::BraceBlock, from, i_, w.pos);
      return w;
    }
    if (c == '"') {
      w.kind = WordKind::Quoted;
      advance();
      for (;;) {
        if (at_end()) throw Error(ErrorCode::UnbalancedQuote, "missing close-quote", w.pos);
        if (peek() == '"') break;
        part(w.parts);
      }
      advance();
      if (!at_word_end(nested)) {
        throw Error(ErrorCode::UnbalancedQuote, "extra characters after close-quote", pos_);
      }
      emit(TokenKind::QuotedWord, from, i_, w.pos);
      return w;
    }
    while (!at_word_end(nested)) part(w.parts);
    if (w.parts.size() == 1 && w.parts[0].kind == Part::Kind::Variable) {
      w.kind = WordKind::VariableRef;
    } else if (w.parts.size() == 1 && w.parts[0].kind == Part::Kind::Command) {
      w.kind = WordKind::Bracket;
    } else if (w.parts.size() == 1) {
      w.kind = WordKind::Literal;
    } else {
      w.kind = WordKind::Compound;
    }
    TokenKind tk = w.kind == WordKind::VariableRef ? TokenKind::VariableRef
                   : w.kind == WordKind::Bracket   ? TokenKind::BracketSubstitution
                                                   : TokenKind::Word;
    emit(tk, from, i_, w.pos);
    return w;
  }

  // Reads "{...}" with nesting; backslashes keep the next char verbatim.
  std::string brace_body() {
    SourcePos open = pos_;
    advance();
    std::size_t from = i_;
    int level = 1;
    for (;;) {
      if (at_end()) throw Error(ErrorCode::UnbalancedBrace, "missing close-brace", open);
      char c = peek();
      if (c == '\\') {
        advance();
        if (!at_end()) advance();
        continue;
      }
      if (c == '{') ++level;
      if (c == '}' && --level == 0) break;
      advance();
    }
    std::string body(src_.substr(from, i_ - from));
    advance();
    return body;
  }

  void literal(std::vector<Part>& parts, char c) {
    if (parts.empty() || parts.back().kind != Part::Kind::Literal) {
      parts.push_back(Part{Part::Kind::Literal, {}, nullptr});
    }
    parts.back().text.push_back(c);
  }

  void part(std::vector<Part>& parts) {
    char c = peek();
    if (c == '$') {
      SourcePos at = pos_;
      advance();
      std::string name;
      if (peek() == '{') {
        SourcePos open = pos_;
        advance();
        while (!at_end() && peek() != '}') {
          name.push_back(peek());
          advance();
        }
        if (at_end()) throw Error(ErrorCode::UnbalancedBrace, "missing close-brace", open);
        advance();
      } else {
        while (!at_end() && is_name_char(peek())) {
          name.push_back(peek());
          advance();
        }
      }
      if (name.empty()) throw Error(ErrorCode::EmptyVariableName, "empty variable name", at);
      parts.push_back(Part{Part::Kind::Variable, std::move(name), nullptr});
      return;
    }
    if (c == '[') {
      SourcePos open = pos_;
      advance();
      auto nested = std::make_shared<Script>(script(true, open));
      advance();  // ']'
      parts.push_back(Part{Part::Kind::Command, {}, std::move(nested)});
      return;
    }
    if (c == '\\') {
      advance();
      if (at_end()) {
        literal(parts, '\\');
        return;
      }
      char e = peek();
      advance();
      switch (e) {
        case 'n': literal(parts, '\n'); break;
        case 't': literal(parts, '\t'); break;
        case 'r': literal(parts, '\r'); break;
        case '\n': literal(parts, ' '); break;
        default: literal(parts, e); break;
      }
      return;
    }
    literal(parts, c);
    advance();
  }

  std::string_view src_;
  std::vector<Token>* tokens_;
  std::size_t i_ = 0;
  SourcePos pos_;
  int depth_ = 0;
};

// Characters that need a backslash in a bare word.
bool bare_special(char c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case ';': case '"': case '{': case '}':
    case '[': case ']': case '$': case '\\': case '#':
      return true;
    default:
      return false;
  }
}

void print_literal(std::string& out, const std::string& text, bool quoted) {
  for (char c : text) {
    bool special = quoted ? (c == '\\' || c == '"' || c == '$' || c == '[' || c == ']')
                          : bare_special(c);
    if (!special) {
      out.push_back(c);
      continue;
    }
    out.push_back('\\');
    switch (c) {
      case '\n': out.push_back(quoted ? '\n' : 'n'); break;
      case '\t': out.push_back('t'); break;
      case '\r': out.push_back('r'); break;
      default: out.push_back(c); break;
    }
  }
}

void print_script(std::string& out, const Script& s, bool nested);

void print_parts(std::string& out, const std::vector<Part>& parts, bool quoted) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Part& p = parts[i];
    switch (p.kind) {
      case Part::Kind::Literal:
        print_literal(out, p.text, quoted);
        break;
      case Part::Kind::Variable: {
        bool plain = true;
        for (char c : p.text) plain = plain && is_name_char(c);
        bool glued = i + 1 < parts.size() && parts[i + 1].kind == Part::Kind::Literal &&
                     !parts[i + 1].text.empty() && is_name_char(parts[i + 1].text[0]);
        if (plain && !glued) {
          out += '$' + p.text;
        } else {
          out += "${" + p.text + "}";
        }
        break;
      }
      case Part::Kind::Command:
        out.push_back('[');
        print_script(out, *p.script, true);
        out.push_back(']');
        break;
    }
  }
}

void print_word(std::string& out, const Word& w) {
  switch (w.kind) {
    case WordKind::Brace:
      out += '{' + w.parts[0].text + '}';
      break;
    case WordKind::Quoted:
      out.push_back('"');
      print_parts(out, w.parts, true);
      out.push_back('"');
      break;
    default:
      print_parts(out, w.parts, false);
      break;
  }
}

void print_script(std::string& out, const Script& s, bool nested) {
  for (std::size_t c = 0; c < s.commands.size(); ++c) {
    if (c > 0) out += nested ? "; " : "\n";
    const auto& words = s.commands[c].words;
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (w > 0) out.push_back(' ');
      print_word(out, words[w]);
    }
  }
}

}  // namespace

Script parse(std::string_view source) {
  Parser p(source, nullptr);
  return p.script(false, {});
}

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  Parser p(source, &tokens);
  p.script(false, {});
  return tokens;
}

std::string print(const Script& script) {
  std::string out;
  print_script(out, script, false);
  if (!out.empty()) out.push_back('\n');
  return out;
}

}  // namespace pnet::pnsl
