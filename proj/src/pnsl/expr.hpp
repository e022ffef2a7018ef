#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pnet/pnsl/ast.hpp"

namespace pnet::pnsl::expr {

struct Value {
  enum class Type : std::uint8_t { Int, Double, String };
  Type type = Type::Int;
  std::int64_t i = 0;
  double d = 0.0;
  std::string s;

  static Value integer(std::int64_t v) { return Value{Type::Int, v, 0.0, {}}; }
  static Value real(double v) { return Value{Type::Double, 0, v, {}}; }
  static Value text(std::string v) { return Value{Type::String, 0, 0.0, std::move(v)}; }
};

/// Interprets operand text: integer, then double, else string.
Value classify(std::string_view text);
std::string to_text(const Value& v);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Throws ExprSyntaxError with a column inside the expression.
NodePtr parse(std::string_view text);

struct Context {
  std::function<std::string(std::string_view)> variable;
  std::function<std::string(const Script&)> command;
};

/// Throws RuntimeError (division by zero, non-numeric operand, overflow,
/// non-finite result, unknown function).
Value evaluate(const Node& node, const Context& ctx);

/// Truth value of a condition result; RuntimeError if not boolean-like.
bool truthy(const Value& v);

}  // namespace pnet::pnsl::expr
