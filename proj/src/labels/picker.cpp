#include "pnet/labels/picker.hpp"

#include <cctype>

#include "pnet/core/error.hpp"
#include "pnet/labels/label.hpp"

namespace pnet {

namespace {

class PickerParser {
 public:
  explicit PickerParser(std::string_view text) : text_(text) {}

  std::unique_ptr<PickerNode> parse() {
    skip_space();
    if (at_end()) fail("empty picker expression");
    auto node = parse_expr();
    skip_space();
    if (!at_end()) fail("unexpected '" + std::string(1, peek()) + "'");
    return node;
  }

 private:
  std::unique_ptr<PickerNode> parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      skip_space();
      if (at_end()) break;
      PickerNode::Op op;
      switch (peek()) {
        case '+': op = PickerNode::Op::Union; break;
        case '&': op = PickerNode::Op::Intersection; break;
        case '-': op = PickerNode::Op::Difference; break;
        default: return lhs;
      }
      ++pos_;
      auto node = std::make_unique<PickerNode>();
      node->op = op;
      node->lhs = std::move(lhs);
      node->rhs = parse_term();
      lhs = std::move(node);
    }
    return lhs;
  }

  std::unique_ptr<PickerNode> parse_term() {
    skip_space();
    if (at_end()) fail("expected a pattern or '('");
    if (peek() == '(') {
      std::size_t open = pos_;
      ++pos_;
      auto inner = parse_expr();
      skip_space();
      if (at_end() || peek() != ')') {
        pos_ = open;
        fail("unclosed '('");
      }
      ++pos_;
      return inner;
    }
    if (peek() != '/') fail("expected a pattern or '('");
    return parse_pattern();
  }

  std::unique_ptr<PickerNode> parse_pattern() {
    auto node = std::make_unique<PickerNode>();
    bool any_glob = false;
    while (!at_end() && peek() == '/') {
      ++pos_;
      std::size_t start = pos_;
      std::string segment;
      while (!at_end()) {
        char c = peek();
        if (c == '[') {
          std::size_t close = text_.find(']', pos_ + 1);
          if (close == std::string_view::npos) fail("unclosed '['");
          std::string_view cls = text_.substr(pos_ + 1, close - pos_ - 1);
          if (cls.empty() || cls == "!" || cls == "^") fail("empty character class");
          for (char k : cls) {
            if (std::isspace(static_cast<unsigned char>(k)) || k == '/' || k == '[') {
              fail("bad character in class");
            }
          }
          segment.append(text_.substr(pos_, close - pos_ + 1));
          pos_ = close + 1;
          continue;
        }
        if (c == '*' || c == '?') {
          segment.push_back(c);
          ++pos_;
          continue;
        }
        if (c == '/' || c == '(' || c == ')' || c == '+' || c == '&' || c == '-' ||
            std::isspace(static_cast<unsigned char>(c))) {
          break;
        }
        if (c == '|' || c == ']' || std::iscntrl(static_cast<unsigned char>(c))) {
          fail("reserved character '" + std::string(1, c) + "'");
        }
        segment.push_back(c);
        ++pos_;
      }
      if (segment.empty()) {
        pos_ = start;
        fail("empty segment");
      }
      any_glob = any_glob || segment_has_glob(segment);
      node->segments.push_back(std::move(segment));
    }
    node->radical = !any_glob;
    return node;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::PickerSyntaxError,
                "picker: " + what + " at column " + std::to_string(pos_ + 1),
                SourcePos{1, static_cast<int>(pos_ + 1)});
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print(const PickerNode& node, std::string& out, bool nested) {
  if (node.op == PickerNode::Op::Pattern) {
    for (const auto& s : node.segments) {
      out += '/';
      out += s;
    }
    return;
  }
  if (nested) out += '(';
  print(*node.lhs, out, false);
  switch (node.op) {
    case PickerNode::Op::Union: out += " + "; break;
    case PickerNode::Op::Intersection: out += " & "; break;
    case PickerNode::Op::Difference: out += " - "; break;
    case PickerNode::Op::Pattern: break;
  }
  print(*node.rhs, out, true);
  if (nested) out += ')';
}

bool class_match(std::string_view cls, char c) {
  bool negate = false;
  if (!cls.empty() && (cls.front() == '!' || cls.front() == '^')) {
    negate = true;
    cls.remove_prefix(1);
  }
  bool hit = false;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (i + 2 < cls.size() && cls[i + 1] == '-') {
      if (c >= cls[i] && c <= cls[i + 2]) hit = true;
      i += 2;
    } else if (cls[i] == c) {
      hit = true;
    }
  }
  return hit != negate;
}

}  // namespace

Picker Picker::parse(std::string_view text) {
  Picker picker;
  picker.root_ = PickerParser(text).parse();
  return picker;
}

std::string Picker::to_string() const {
  std::string out;
  print(*root_, out, false);
  return out;
}

bool segment_has_glob(std::string_view segment) {
  return segment.find_first_of("*?[") != std::string_view::npos;
}

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star_p = std::string_view::npos;
  std::size_t star_t = 0;
  while (t < text.size()) {
    if (p < pattern.size()) {
      char c = pattern[p];
      if (c == '*') {
        while (p < pattern.size() && pattern[p] == '*') ++p;
        star_p = p;
        star_t = t;
        continue;
      }
      if (c == '[') {
        std::size_t close = pattern.find(']', p + 1);
        if (close != std::string_view::npos &&
            class_match(pattern.substr(p + 1, close - p - 1), text[t])) {
          p = close + 1;
          ++t;
          continue;
        }
      } else if (c == '?' || c == text[t]) {
        ++p;
        ++t;
        continue;
      }
    }
    if (star_p == std::string_view::npos) return false;
    p = star_p;
    t = ++star_t;
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace pnet
