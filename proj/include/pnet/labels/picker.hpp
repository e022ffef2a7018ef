#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pnet {

// Picker grammar:
//   expr    := term (("+" | "&" | "-") term)*
//   term    := "(" expr ")" | pattern
//   pattern := ("/" segment)+
//   segment := literal-with-globs | "**"
//
// Within a segment, "*" matches any run of characters, "?" one character and
// "[...]" one character from a set ("a-z" ranges, leading "!" negates).
// "**" as a whole segment spans zero or more segments. A pattern with no glob
// characters at all is a radical: it selects every module holding a label
// with that segment-wise prefix. Operators are left-associative with equal
// precedence; matching is case-sensitive.
struct PickerNode {
  enum class Op { Pattern, Union, Intersection, Difference };

  Op op = Op::Pattern;
  std::vector<std::string> segments;  // Pattern only
  bool radical = false;               // Pattern only
  std::unique_ptr<PickerNode> lhs;
  std::unique_ptr<PickerNode> rhs;
};

class Picker {
 public:
  /// Throws PickerSyntaxError with the 1-based column of the problem.
  static Picker parse(std::string_view text);

  const PickerNode& root() const { return *root_; }
  /// Canonical text; parses back to an equivalent expression.
  std::string to_string() const;

 private:
  std::shared_ptr<const PickerNode> root_;
};

bool segment_has_glob(std::string_view segment);

/// Glob match of a single segment pattern against a single label segment.
bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace pnet
