#include "expr.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "pnet/core/error.hpp"
#include "pnet/pnsl/interp.hpp"

namespace pnet::pnsl::expr {

struct Node {
  enum class Kind : std::uint8_t { Literal, Variable, Command, Unary, Binary, Ternary, Call };
  Kind kind = Kind::Literal;
  Value literal;
  std::string name;  // variable, operator or function name
  std::shared_ptr<const Script> script;
  std::vector<NodePtr> args;
};

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void runtime(const std::string& what) {
  throw Error(ErrorCode::RuntimeError, "expr: " + what);
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  NodePtr run() {
    NodePtr n = ternary();
    skip();
    if (i_ < s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ExprSyntaxError, "expr: " + what + " at column " +
                                                std::to_string(i_ + 1) + " of \"" +
                                                std::string(s_) + "\"");
  }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool take(std::string_view op) {
    skip();
    if (s_.substr(i_, op.size()) != op) return false;
    // keep "<" from eating "<=", "eq" from eating "eqx" and so on
    if (std::isalpha(static_cast<unsigned char>(op[0])) && i_ + op.size() < s_.size() &&
        std::isalnum(static_cast<unsigned char>(s_[i_ + op.size()]))) {
      return false;
    }
    i_ += op.size();
    return true;
  }

  static NodePtr make(Node::Kind kind, std::string name, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->name = std::move(name);
    n->args = std::move(args);
    return n;
  }

  NodePtr ternary() {
    NodePtr cond = logical_or();
    if (!take("?")) return cond;
    NodePtr yes = ternary();
    if (!take(":")) fail("missing ':' in conditional");
    NodePtr no = ternary();
    return make(Node::Kind::Ternary, "?:", {cond, yes, no});
  }

  NodePtr logical_or() {
    NodePtr lhs = logical_and();
    while (take("||")) lhs = make(Node::Kind::Binary, "||", {lhs, logical_and()});
    return lhs;
  }

  NodePtr logical_and() {
    NodePtr lhs = equality();
    while (take("&&")) lhs = make(Node::Kind::Binary, "&&", {lhs, equality()});
    return lhs;
  }

  NodePtr equality() {
    NodePtr lhs = relational();
    for (;;) {
      std::string op;
      if (take("==")) op = "==";
      else if (take("!=")) op = "!=";
      else if (take("eq")) op = "eq";
      else if (take("ne")) op = "ne";
      else return lhs;
      lhs = make(Node::Kind::Binary, op, {lhs, relational()});
    }
  }

  NodePtr relational() {
    NodePtr lhs = additive();
    for (;;) {
      std::string op;
      if (take("<=")) op = "<=";
      else if (take(">=")) op = ">=";
      else if (take("<")) op = "<";
      else if (take(">")) op = ">";
      else return lhs;
      lhs = make(Node::Kind::Binary, op, {lhs, additive()});
    }
  }

  NodePtr additive() {
    NodePtr lhs = multiplicative();
    for (;;) {
      std::string op;
      if (take("+")) op = "+";
      else if (take("-")) op = "-";
      else return lhs;
      lhs = make(Node::Kind::Binary, op, {lhs, multiplicative()});
    }
  }

  NodePtr multiplicative() {
    NodePtr lhs = unary();
    for (;;) {
      std::string op;
      if (take("*")) op = "*";
      else if (take("/")) op = "/";
      else if (take("%")) op = "%";
      else return lhs;
      lhs = make(Node::Kind::Binary, op, {lhs, unary()});
    }
  }

  NodePtr unary() {
    if (take("-")) return make(Node::Kind::Unary, "-", {unary()});
    if (take("+")) return make(Node::Kind::Unary, "+", {unary()});
    if (take("!")) return make(Node::Kind::Unary, "!", {unary()});
    return primary();
  }

  NodePtr primary() {
    skip();
    if (i_ >= s_.size()) fail("missing operand");
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      NodePtr inner = ternary();
      if (!take(")")) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '$') return variable();
    if (c == '[') return command();
    if (c == '"') return quoted();
    if (c == '{') return braced();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (i_ < s_.size() && s_[i_] == '.') {
      ++i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t save = i_;
      ++i_;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
      if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      } else {
        i_ = save;
      }
    }
    std::string_view text = s_.substr(start, i_ - start);
    if (text == ".") fail("malformed number");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Literal;
    n->literal = classify(text);
    if (n->literal.type == Value::Type::String) fail("malformed number '" + std::string(text) + "'");
    return n;
  }

  NodePtr variable() {
    ++i_;
    std::string name;
    if (i_ < s_.size() && s_[i_] == '{') {
      std::size_t end = s_.find('}', i_);
      if (end == std::string_view::npos) fail("missing '}'");
      name = std::string(s_.substr(i_ + 1, end - i_ - 1));
      i_ = end + 1;
    } else {
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
        name.push_back(s_[i_++]);
      }
    }
    if (name.empty()) fail("empty variable name");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->name = std::move(name);
    return n;
  }

  NodePtr command() {
    std::size_t start = ++i_;
    int level = 1;
    int braces = 0;
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\\') {
        i_ += 2;
        continue;
      }
      if (c == '{') ++braces;
      if (c == '}' && braces > 0) --braces;
      if (braces == 0) {
        if (c == '[') ++level;
        if (c == ']' && --level == 0) break;
      }
      ++i_;
    }
    if (i_ >= s_.size()) fail("missing ']'");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Command;
    n->script = std::make_shared<Script>(pnsl::parse(s_.substr(start, i_ - start)));
    ++i_;
    return n;
  }

  NodePtr quoted() {
    std::string text;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) ++i_;
      text.push_back(s_[i_++]);
    }
    if (i_ >= s_.size()) fail("missing close-quote");
    ++i_;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Literal;
    n->literal = Value::text(std::move(text));
    return n;
  }

  NodePtr braced() {
    std::size_t start = ++i_;
    int level = 1;
    while (i_ < s_.size()) {
      if (s_[i_] == '{') ++level;
      if (s_[i_] == '}' && --level == 0) break;
      ++i_;
    }
    if (i_ >= s_.size()) fail("missing '}'");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Literal;
    n->literal = Value::text(std::string(s_.substr(start, i_ - start)));
    ++i_;
    return n;
  }

  // Function call or a boolean word.
  NodePtr word() {
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      ++i_;
    }
    std::string name(s_.substr(start, i_ - start));
    skip();
    if (i_ < s_.size() && s_[i_] == '(') {
      ++i_;
      std::vector<NodePtr> args;
      skip();
      if (i_ < s_.size() && s_[i_] == ')') {
        ++i_;
      } else {
        for (;;) {
          args.push_back(ternary());
          if (take(")")) break;
          if (!take(",")) fail("expected ',' or ')' in call to " + name);
        }
      }
      return make(Node::Kind::Call, name, std::move(args));
    }
    if (name == "true" || name == "false" || name == "yes" || name == "no" || name == "on" ||
        name == "off") {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Literal;
      n->literal = Value::text(name);
      return n;
    }
    i_ = start;
    fail("unknown word '" + name + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

double as_double(const Value& v) {
  switch (v.type) {
    case Value::Type::Int: return static_cast<double>(v.i);
    case Value::Type::Double: return v.d;
    case Value::Type::String: runtime("expected a number but got \"" + v.s + "\"");
  }
  return 0.0;
}

bool is_number(const Value& v) { return v.type != Value::Type::String; }

Value checked(double d) {
  if (!std::isfinite(d)) runtime("result is not a finite number");
  return Value::real(d);
}

Value arith(const std::string& op, const Value& a, const Value& b) {
  if (!is_number(a)) as_double(a);
  if (!is_number(b)) as_double(b);
  if (a.type == Value::Type::Int && b.type == Value::Type::Int) {
    std::int64_t r = 0;
    if (op == "+") {
      if (__builtin_add_overflow(a.i, b.i, &r)) runtime("integer overflow");
      return Value::integer(r);
    }
    if (op == "-") {
      if (__builtin_sub_overflow(a.i, b.i, &r)) runtime("integer overflow");
      return Value::integer(r);
    }
    if (op == "*") {
      if (__builtin_mul_overflow(a.i, b.i, &r)) runtime("integer overflow");
      return Value::integer(r);
    }
    if (b.i == 0) runtime("division by zero");
    if (op == "%") {
      if (b.i == -1) return Value::integer(0);
      return Value::integer(a.i % b.i);
    }
    // "/" stays integral only when exact
    if (b.i != -1 && a.i % b.i == 0) return Value::integer(a.i / b.i);
    if (b.i == -1 && a.i != std::numeric_limits<std::int64_t>::min()) return Value::integer(-a.i);
    return checked(static_cast<double>(a.i) / static_cast<double>(b.i));
  }
  double x = as_double(a);
  double y = as_double(b);
  if (op == "+") return checked(x + y);
  if (op == "-") return checked(x - y);
  if (op == "*") return checked(x * y);
  if (y == 0.0) runtime("division by zero");
  if (op == "/") return checked(x / y);
  runtime("'%' needs integer operands");
}

int compare(const Value& a, const Value& b) {
  if (is_number(a) && is_number(b)) {
    if (a.type == Value::Type::Int && b.type == Value::Type::Int) {
      return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
    }
    double x = as_double(a), y = as_double(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  int c = to_text(a).compare(to_text(b));
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

Value call(const std::string& name, const std::vector<Value>& args) {
  auto arity = [&](std::size_t n) {
    if (args.size() != n) {
      runtime(name + "() takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
    }
  };
  if (name == "min" || name == "max") {
    if (args.empty()) runtime(name + "() needs at least one argument");
    Value best = args[0];
    as_double(best);
    for (std::size_t k = 1; k < args.size(); ++k) {
      int c = compare(args[k], best);
      if ((name == "min" && c < 0) || (name == "max" && c > 0)) best = args[k];
    }
    return best;
  }
  if (name == "pow" || name == "fmod" || name == "atan2" || name == "hypot") {
    arity(2);
    double x = as_double(args[0]), y = as_double(args[1]);
    if (name == "pow") return checked(std::pow(x, y));
    if (name == "atan2") return checked(std::atan2(x, y));
    if (name == "hypot") return checked(std::hypot(x, y));
    if (y == 0.0) runtime("division by zero");
    return checked(std::fmod(x, y));
  }
  arity(1);
  const Value& v = args[0];
  if (name == "abs") {
    if (v.type == Value::Type::Int) {
      if (v.i == std::numeric_limits<std::int64_t>::min()) runtime("integer overflow");
      return Value::integer(v.i < 0 ? -v.i : v.i);
    }
    return checked(std::fabs(as_double(v)));
  }
  if (name == "int" || name == "round") {
    double d = as_double(v);
    double r = name == "int" ? std::trunc(d) : std::round(d);
    if (!(r >= -9.2e18 && r <= 9.2e18)) runtime("integer overflow");
    return Value::integer(static_cast<std::int64_t>(r));
  }
  if (name == "double") return checked(as_double(v));
  double x = as_double(v);
  if (name == "sqrt") {
    if (x < 0) runtime("sqrt of a negative number");
    return checked(std::sqrt(x));
  }
  if (name == "sin") return checked(std::sin(x));
  if (name == "cos") return checked(std::cos(x));
  if (name == "tan") return checked(std::tan(x));
  if (name == "asin") return checked(std::asin(x));
  if (name == "acos") return checked(std::acos(x));
  if (name == "atan") return checked(std::atan(x));
  if (name == "exp") return checked(std::exp(x));
  if (name == "log") return checked(std::log(x));
  if (name == "log10") return checked(std::log10(x));
  if (name == "floor") return checked(std::floor(x));
  if (name == "ceil") return checked(std::ceil(x));
  runtime("unknown function " + name + "()");
}

}  // namespace

Value classify(std::string_view text) {
  std::string_view t = trim(text);
  if (t.empty()) return Value::text(std::string(text));
  std::string_view digits = t;
  if (digits.front() == '+') digits.remove_prefix(1);
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
  if (ec == std::errc{} && p == digits.data() + digits.size() && !digits.empty() &&
      digits.front() != '+') {
    return Value::integer(i);
  }
  double d = 0;
  auto [q, ec2] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
  if (ec2 == std::errc{} && q == digits.data() + digits.size() && std::isfinite(d) &&
      !digits.empty() && digits.front() != '+' && digits.front() != 'i' &&
      digits.front() != 'n' && digits.front() != 'I' && digits.front() != 'N') {
    return Value::real(d);
  }
  return Value::text(std::string(text));
}

std::string to_text(const Value& v) {
  switch (v.type) {
    case Value::Type::Int: return std::to_string(v.i);
    case Value::Type::Double: return format_number(v.d);
    case Value::Type::String: return v.s;
  }
  return {};
}

NodePtr parse(std::string_view text) { return ExprParser(text).run(); }

bool truthy(const Value& v) {
  if (v.type == Value::Type::Int) return v.i != 0;
  if (v.type == Value::Type::Double) return v.d != 0.0;
  const std::string& s = v.s;
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  runtime("expected a boolean value but got \"" + s + "\"");
}

Value evaluate(const Node& n, const Context& ctx) {
  switch (n.kind) {
    case Node::Kind::Literal:
      return n.literal;
    case Node::Kind::Variable:
      return classify(ctx.variable(n.name));
    case Node::Kind::Command:
      return classify(ctx.command(*n.script));
    case Node::Kind::Unary: {
      Value v = evaluate(*n.args[0], ctx);
      if (n.name == "!") return Value::integer(truthy(v) ? 0 : 1);
      if (v.type == Value::Type::Int) {
        if (n.name == "+") return v;
        if (v.i == std::numeric_limits<std::int64_t>::min()) runtime("integer overflow");
        return Value::integer(-v.i);
      }
      double d = as_double(v);
      return Value::real(n.name == "-" ? -d : d);
    }
    case Node::Kind::Ternary:
      return truthy(evaluate(*n.args[0], ctx)) ? evaluate(*n.args[1], ctx)
                                               : evaluate(*n.args[2], ctx);
    case Node::Kind::Binary: {
      const std::string& op = n.name;
      if (op == "&&") {
        if (!truthy(evaluate(*n.args[0], ctx))) return Value::integer(0);
        return Value::integer(truthy(evaluate(*n.args[1], ctx)) ? 1 : 0);
      }
      if (op == "||") {
        if (truthy(evaluate(*n.args[0], ctx))) return Value::integer(1);
        return Value::integer(truthy(evaluate(*n.args[1], ctx)) ? 1 : 0);
      }
      Value a = evaluate(*n.args[0], ctx);
      Value b = evaluate(*n.args[1], ctx);
      if (op == "eq") return Value::integer(to_text(a) == to_text(b) ? 1 : 0);
      if (op == "ne") return Value::integer(to_text(a) != to_text(b) ? 1 : 0);
      if (op == "==") return Value::integer(compare(a, b) == 0 ? 1 : 0);
      if (op == "!=") return Value::integer(compare(a, b) != 0 ? 1 : 0);
      if (op == "<") return Value::integer(compare(a, b) < 0 ? 1 : 0);
      if (op == "<=") return Value::integer(compare(a, b) <= 0 ? 1 : 0);
      if (op == ">") return Value::integer(compare(a, b) > 0 ? 1 : 0);
      if (op == ">=") return Value::integer(compare(a, b) >= 0 ? 1 : 0);
      return arith(op, a, b);
    }
    case Node::Kind::Call: {
      std::vector<Value> args;
      args.reserve(n.args.size());
      for (const auto& a : n.args) args.push_back(evaluate(*a, ctx));
      return call(n.name, args);
    }
  }
  return {};
}

}  // namespace pnet::pnsl::expr
