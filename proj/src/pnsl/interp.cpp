#include "pnet/pnsl/interp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "expr.hpp"

namespace pnet::pnsl {

namespace {

bool is_script_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnbalancedBrace:
    case ErrorCode::UnbalancedBracket:
    case ErrorCode::UnbalancedQuote:
    case ErrorCode::EmptyVariableName:
    case ErrorCode::UnknownCommand:
    case ErrorCode::WrongArity:
    case ErrorCode::RuntimeError:
    case ErrorCode::ExprSyntaxError:
    case ErrorCode::LimitExceeded:
    case ErrorCode::AmbiguousCommand:
    case ErrorCode::DuplicatePackage:
    case ErrorCode::Cancelled:
      return true;
    default:
      return false;
  }
}

[[noreturn]] void runtime(const std::string& what) { throw Error(ErrorCode::RuntimeError, what); }

[[noreturn]] void arity(const std::string& synopsis) {
  throw Error(ErrorCode::WrongArity, "wrong # args: should be \"" + synopsis + "\"");
}

constexpr std::size_t kCacheLimit = 4096;

}  // namespace

Interpreter::Interpreter(Limits limits) : limits_(limits) {
  builtins_ = {
      {"set", {&Interpreter::b_set, 2, 3, "varName ?newValue?"}},
      {"unset", {&Interpreter::b_unset, 2, -1, "varName ?varName ...?"}},
      {"incr", {&Interpreter::b_incr, 2, 3, "varName ?increment?"}},
      {"append", {&Interpreter::b_append, 2, -1, "varName ?value ...?"}},
      {"proc", {&Interpreter::b_proc, 4, 4, "name params body"}},
      {"global", {&Interpreter::b_global, 2, -1, "varName ?varName ...?"}},
      {"if", {&Interpreter::b_if, 3, -1, "expr ?then? body ?elseif expr body ...? ?else body?"}},
      {"while", {&Interpreter::b_while, 3, 3, "test body"}},
      {"for", {&Interpreter::b_for, 5, 5, "start test next body"}},
      {"foreach", {&Interpreter::b_foreach, 4, 4, "varList list body"}},
      {"break", {&Interpreter::b_break, 1, 1, ""}},
      {"continue", {&Interpreter::b_continue, 1, 1, ""}},
      {"return", {&Interpreter::b_return, 1, 2, "?value?"}},
      {"expr", {&Interpreter::b_expr, 2, -1, "arg ?arg ...?"}},
      {"error", {&Interpreter::b_error, 2, 2, "message"}},
      {"catch", {&Interpreter::b_catch, 2, 3, "script ?varName?"}},
      {"list", {&Interpreter::b_list, 1, -1, "?value ...?"}},
      {"llength", {&Interpreter::b_llength, 2, 2, "list"}},
      {"lindex", {&Interpreter::b_lindex, 3, 3, "list index"}},
      {"lappend", {&Interpreter::b_lappend, 2, -1, "varName ?value ...?"}},
  };
  frames_.emplace_back();
}

void Interpreter::register_package(Package package) {
  if (packages_.count(package.name)) {
    throw Error(ErrorCode::DuplicatePackage, "package \"" + package.name + "\" already registered");
  }
  for (std::size_t i = 0; i < package.commands.size(); ++i) {
    for (std::size_t j = i + 1; j < package.commands.size(); ++j) {
      if (package.commands[i].name == package.commands[j].name) {
        throw Error(ErrorCode::DuplicatePackage, "package \"" + package.name +
                                                     "\" defines \"" + package.commands[i].name +
                                                     "\" twice");
      }
    }
  }
  for (const auto& c : package.commands) exported_[c.name].push_back(package.name);
  std::string name = package.name;
  packages_.emplace(std::move(name), std::move(package));
}

std::vector<std::string> Interpreter::package_names() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : packages_) out.push_back(name);
  return out;
}

const Package* Interpreter::package(std::string_view name) const {
  auto it = packages_.find(name);
  return it == packages_.end() ? nullptr : &it->second;
}

bool Interpreter::is_builtin(std::string_view name) const { return builtins_.count(name) != 0; }

std::vector<std::string> Interpreter::builtin_names() const {
  std::vector<std::string> out;
  for (const auto& [name, b] : builtins_) out.push_back(name);
  return out;
}

std::shared_ptr<const Script> Interpreter::cached_parse(std::string_view source) {
  std::string key(source);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto script = std::make_shared<const Script>(parse(source));
  if (cache_.size() >= kCacheLimit) cache_.clear();
  cache_.emplace(std::move(key), script);
  return script;
}

std::string Interpreter::eval(std::string_view source) { return eval(parse(source)); }

std::string Interpreter::eval(const Script& script) {
  steps_ = 0;
  frames_.resize(1);
  proc_depth_ = 0;
  nesting_ = 0;
  Outcome o = run_script(script);
  if (o.flow == Flow::Break || o.flow == Flow::Continue) {
    runtime(std::string("invoked \"") + (o.flow == Flow::Break ? "break" : "continue") +
            "\" outside of a loop");
  }
  return o.value;
}

std::string Interpreter::eval_body(std::string_view body) { return run_body(body).value; }

Interpreter::Outcome Interpreter::run_body(std::string_view body) {
  // Entering a body costs one step so that empty loop bodies still hit the
  // budget and the cancel flag.
  if (cancel_ && cancel_->load(std::memory_order_relaxed)) {
    throw Error(ErrorCode::Cancelled, "script cancelled");
  }
  if (steps_ >= limits_.max_commands) {
    throw Error(ErrorCode::LimitExceeded,
                "more than " + std::to_string(limits_.max_commands) + " commands evaluated");
  }
  ++steps_;
  auto script = cached_parse(body);
  return run_script(*script);
}

Interpreter::Outcome Interpreter::run_script(const Script& script) {
  // Brackets and bodies nest even without procedure calls; bound the
  // native stack too.
  if (nesting_ >= 4 * limits_.max_depth) {
    throw Error(ErrorCode::LimitExceeded, "script nesting exceeds " +
                                              std::to_string(4 * limits_.max_depth));
  }
  ++nesting_;
  struct Guard {
    unsigned& n;
    ~Guard() { --n; }
  } guard{nesting_};
  Outcome last;
  for (const auto& cmd : script.commands) {
    last = run_command(cmd);
    if (last.flow != Flow::Normal) return last;
  }
  return last;
}

Interpreter::Outcome Interpreter::run_command(const Command& cmd) {
  if (cancel_ && cancel_->load(std::memory_order_relaxed)) {
    throw Error(ErrorCode::Cancelled, "script cancelled", cmd.pos);
  }
  if (steps_ >= limits_.max_commands) {
    throw Error(ErrorCode::LimitExceeded,
                "more than " + std::to_string(limits_.max_commands) + " commands evaluated",
                cmd.pos);
  }
  ++steps_;
  try {
    std::vector<std::string> words;
    words.reserve(cmd.words.size());
    for (const auto& w : cmd.words) words.push_back(substitute(w));
    return dispatch(words, cmd);
  } catch (const Error& e) {
    if (e.pos()) throw;
    if (is_script_error(e.code())) throw Error(e.code(), e.what(), cmd.pos);
    throw Error(ErrorCode::RuntimeError, e.what(), cmd.pos).with_cause(e.code());
  }
}

std::string Interpreter::substitute(const Word& word) {
  if (word.kind == WordKind::Literal || word.kind == WordKind::Brace) return word.parts[0].text;
  std::string out;
  for (const auto& p : word.parts) {
    switch (p.kind) {
      case Part::Kind::Literal: out += p.text; break;
      case Part::Kind::Variable: out += get_var(p.text); break;
      case Part::Kind::Command: out += run_script(*p.script).value; break;
    }
  }
  return out;
}

Interpreter::Outcome Interpreter::dispatch(const std::vector<std::string>& words,
                                           const Command& cmd) {
  const std::string& name = words[0];
  if (auto it = procs_.find(name); it != procs_.end()) {
    Proc proc = it->second;  // the body may redefine it
    return call_proc(proc, words);
  }
  if (auto it = builtins_.find(name); it != builtins_.end()) {
    const BuiltinSpec& spec = it->second;
    int n = static_cast<int>(words.size());
    if (n < spec.min_words || (spec.max_words >= 0 && n > spec.max_words)) {
      arity(name + (*spec.usage ? " " : "") + spec.usage);
    }
    return (this->*spec.fn)(words, cmd);
  }

  const CommandSpec* spec = nullptr;
  std::string qualified;
  std::size_t first_arg = 1;
  if (auto pkg = packages_.find(name); pkg != packages_.end()) {
    if (words.size() < 2) arity(name + " command ?arg ...?");
    for (const auto& c : pkg->second.commands) {
      if (c.name == words[1]) spec = &c;
    }
    if (!spec) {
      throw Error(ErrorCode::UnknownCommand,
                  "unknown command \"" + name + " " + words[1] + "\"");
    }
    qualified = name + " " + spec->name;
    first_arg = 2;
  } else if (auto ex = exported_.find(name); ex != exported_.end()) {
    if (ex->second.size() > 1) {
      std::string owners;
      for (const auto& p : ex->second) owners += (owners.empty() ? "" : ", ") + p;
      throw Error(ErrorCode::AmbiguousCommand,
                  "ambiguous command \"" + name + "\": exported by " + owners);
    }
    const Package& pkg = packages_.at(ex->second.front());
    for (const auto& c : pkg.commands) {
      if (c.name == name) spec = &c;
    }
    qualified = pkg.name + " " + spec->name;
  } else {
    throw Error(ErrorCode::UnknownCommand, "unknown command \"" + name + "\"");
  }

  int n = static_cast<int>(words.size() - first_arg);
  if (n < spec->min_args || (spec->max_args >= 0 && n > spec->max_args)) {
    arity(qualified + (spec->usage.empty() ? "" : " ") + spec->usage);
  }
  Args args(words.data() + first_arg, words.size() - first_arg);
  return Outcome{Flow::Normal, spec->fn(*this, args)};
}

Interpreter::Outcome Interpreter::call_proc(const Proc& proc, const std::vector<std::string>& words) {
  if (proc_depth_ >= limits_.max_depth) {
    throw Error(ErrorCode::LimitExceeded,
                "procedure calls nested deeper than " + std::to_string(limits_.max_depth));
  }
  std::size_t fixed = proc.params.size() - (proc.variadic ? 1 : 0);
  std::size_t required = 0;
  for (std::size_t i = 0; i < fixed; ++i) {
    if (!proc.params[i].second) required = i + 1;
  }
  std::size_t given = words.size() - 1;
  if (given < required || (!proc.variadic && given > fixed)) {
    std::string synopsis = words[0];
    for (const auto& [pname, def] : proc.params) {
      synopsis += def ? " ?" + pname + "?" : " " + pname;
    }
    arity(synopsis);
  }
  FrameRef frame;
  for (std::size_t i = 0; i < fixed; ++i) {
    frame.vars[proc.params[i].first] = i < given ? words[i + 1] : *proc.params[i].second;
  }
  if (proc.variadic) {
    std::vector<std::string> rest;
    for (std::size_t i = fixed; i < given; ++i) rest.push_back(words[i + 1]);
    frame.vars["args"] = join_list(rest);
  }
  frames_.push_back(std::move(frame));
  ++proc_depth_;
  struct Guard {
    Interpreter& in;
    ~Guard() {
      in.frames_.pop_back();
      --in.proc_depth_;
    }
  } guard{*this};
  Outcome o = run_body(proc.body);
  if (o.flow == Flow::Break || o.flow == Flow::Continue) {
    runtime(std::string("invoked \"") + (o.flow == Flow::Break ? "break" : "continue") +
            "\" outside of a loop");
  }
  return Outcome{Flow::Normal, std::move(o.value)};
}

Interpreter::Frame& Interpreter::frame_for(std::string_view name) {
  FrameRef& top = frames_.back();
  if (frames_.size() > 1 &&
      std::find(top.globals.begin(), top.globals.end(), name) != top.globals.end()) {
    return frames_.front().vars;
  }
  return top.vars;
}

const Interpreter::Frame* Interpreter::frame_for(std::string_view name) const {
  const FrameRef& top = frames_.back();
  if (frames_.size() > 1 &&
      std::find(top.globals.begin(), top.globals.end(), name) != top.globals.end()) {
    return &frames_.front().vars;
  }
  return &top.vars;
}

const std::string* Interpreter::find_var(std::string_view name) const {
  const Frame* f = frame_for(name);
  auto it = f->find(std::string(name));
  return it == f->end() ? nullptr : &it->second;
}

const std::string& Interpreter::get_var(std::string_view name) const {
  const std::string* v = find_var(name);
  if (!v) runtime("can't read \"" + std::string(name) + "\": no such variable");
  return *v;
}

void Interpreter::set_var(std::string_view name, std::string value) {
  frame_for(name)[std::string(name)] = std::move(value);
}

void Interpreter::unset_var(std::string_view name) {
  if (frame_for(name).erase(std::string(name)) == 0) {
    runtime("can't unset \"" + std::string(name) + "\": no such variable");
  }
}

std::string Interpreter::eval_expr(std::string_view expression) {
  std::string key(expression);
  auto it = expr_cache_.find(key);
  expr::NodePtr node;
  if (it != expr_cache_.end()) {
    node = it->second;
  } else {
    node = expr::parse(expression);
    if (expr_cache_.size() >= kCacheLimit) expr_cache_.clear();
    expr_cache_.emplace(std::move(key), node);
  }
  expr::Context ctx{
      [this](std::string_view name) { return get_var(name); },
      [this](const Script& s) { return run_script(s).value; },
  };
  return expr::to_text(expr::evaluate(*node, ctx));
}

bool Interpreter::eval_condition(std::string_view expression) {
  return expr::truthy(expr::classify(eval_expr(expression)));
}

// Builtins ---------------------------------------------------------------

Interpreter::Outcome Interpreter::b_set(const std::vector<std::string>& w, const Command&) {
  if (w.size() == 2) return {Flow::Normal, get_var(w[1])};
  set_var(w[1], w[2]);
  return {Flow::Normal, w[2]};
}

Interpreter::Outcome Interpreter::b_unset(const std::vector<std::string>& w, const Command&) {
  for (std::size_t i = 1; i < w.size(); ++i) unset_var(w[i]);
  return {};
}

Interpreter::Outcome Interpreter::b_incr(const std::vector<std::string>& w, const Command&) {
  std::int64_t delta = w.size() == 3 ? parse_integer(w[2], "increment") : 1;
  const std::string* cur = find_var(w[1]);
  std::int64_t value = cur ? parse_integer(*cur, "variable \"" + w[1] + "\"") : 0;
  if (__builtin_add_overflow(value, delta, &value)) runtime("integer overflow in incr");
  std::string text = std::to_string(value);
  set_var(w[1], text);
  return {Flow::Normal, text};
}

Interpreter::Outcome Interpreter::b_append(const std::vector<std::string>& w, const Command&) {
  const std::string* cur = find_var(w[1]);
  std::string value = cur ? *cur : std::string{};
  for (std::size_t i = 2; i < w.size(); ++i) value += w[i];
  set_var(w[1], value);
  return {Flow::Normal, value};
}

Interpreter::Outcome Interpreter::b_proc(const std::vector<std::string>& w, const Command&) {
  if (builtins_.count(w[1])) runtime("cannot redefine builtin \"" + w[1] + "\"");
  Proc proc;
  auto params = split_list(w[2]);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto spec = split_list(params[i]);
    if (spec.empty() || spec.size() > 2) runtime("malformed parameter \"" + params[i] + "\"");
    if (spec[0] == "args" && i + 1 == params.size()) {
      proc.variadic = true;
      proc.params.emplace_back("args", std::nullopt);
      continue;
    }
    std::optional<std::string> def;
    if (spec.size() == 2) def = spec[1];
    proc.params.emplace_back(spec[0], std::move(def));
  }
  proc.body = w[3];
  procs_[w[1]] = std::move(proc);
  return {};
}

Interpreter::Outcome Interpreter::b_global(const std::vector<std::string>& w, const Command&) {
  if (frames_.size() == 1) return {};
  for (std::size_t i = 1; i < w.size(); ++i) frames_.back().globals.push_back(w[i]);
  return {};
}

Interpreter::Outcome Interpreter::b_if(const std::vector<std::string>& w, const Command&) {
  std::size_t i = 1;
  for (;;) {
    if (i >= w.size()) arity("if expr ?then? body ?elseif expr body ...? ?else body?");
    bool cond = eval_condition(w[i++]);
    if (i < w.size() && w[i] == "then") ++i;
    if (i >= w.size()) arity("if expr ?then? body ?elseif expr body ...? ?else body?");
    const std::string& body = w[i++];
    if (cond) return run_body(body);
    if (i >= w.size()) return {};
    if (w[i] == "elseif") {
      ++i;
      continue;
    }
    if (w[i] == "else") ++i;
    if (i + 1 != w.size()) arity("if expr ?then? body ?elseif expr body ...? ?else body?");
    return run_body(w[i]);
  }
}

Interpreter::Outcome Interpreter::b_while(const std::vector<std::string>& w, const Command&) {
  while (eval_condition(w[1])) {
    Outcome o = run_body(w[2]);
    if (o.flow == Flow::Break) break;
    if (o.flow == Flow::Return) return o;
  }
  return {};
}

Interpreter::Outcome Interpreter::b_for(const std::vector<std::string>& w, const Command&) {
  Outcome init = run_body(w[1]);
  if (init.flow == Flow::Return) return init;
  while (eval_condition(w[2])) {
    Outcome o = run_body(w[4]);
    if (o.flow == Flow::Break) break;
    if (o.flow == Flow::Return) return o;
    Outcome next = run_body(w[3]);
    if (next.flow == Flow::Return) return next;
  }
  return {};
}

Interpreter::Outcome Interpreter::b_foreach(const std::vector<std::string>& w, const Command&) {
  auto vars = split_list(w[1]);
  if (vars.empty()) runtime("foreach varlist is empty");
  auto items = split_list(w[2]);
  for (std::size_t i = 0; i < items.size(); i += vars.size()) {
    for (std::size_t v = 0; v < vars.size(); ++v) {
      set_var(vars[v], i + v < items.size() ? items[i + v] : std::string{});
    }
    Outcome o = run_body(w[3]);
    if (o.flow == Flow::Break) break;
    if (o.flow == Flow::Return) return o;
  }
  return {};
}

Interpreter::Outcome Interpreter::b_break(const std::vector<std::string>&, const Command&) {
  return {Flow::Break, {}};
}

Interpreter::Outcome Interpreter::b_continue(const std::vector<std::string>&, const Command&) {
  return {Flow::Continue, {}};
}

Interpreter::Outcome Interpreter::b_return(const std::vector<std::string>& w, const Command&) {
  return {Flow::Return, w.size() == 2 ? w[1] : std::string{}};
}

Interpreter::Outcome Interpreter::b_expr(const std::vector<std::string>& w, const Command&) {
  std::string text = w[1];
  for (std::size_t i = 2; i < w.size(); ++i) text += " " + w[i];
  return {Flow::Normal, eval_expr(text)};
}

Interpreter::Outcome Interpreter::b_error(const std::vector<std::string>& w, const Command&) {
  runtime(w[1]);
}

Interpreter::Outcome Interpreter::b_catch(const std::vector<std::string>& w, const Command&) {
  // Frames pushed by procedures inside the body unwind through their guards.
  try {
    Outcome o = run_body(w[1]);
    if (w.size() == 3) set_var(w[2], o.value);
    if (o.flow == Flow::Return) return {Flow::Normal, "2"};
    if (o.flow == Flow::Break) return {Flow::Normal, "3"};
    if (o.flow == Flow::Continue) return {Flow::Normal, "4"};
    return {Flow::Normal, "0"};
  } catch (const Error& e) {
    // Runaway and cancelled scripts must stay fatal.
    if (e.code() == ErrorCode::LimitExceeded || e.code() == ErrorCode::Cancelled) throw;
    if (w.size() == 3) set_var(w[2], e.what());
    return {Flow::Normal, "1"};
  }
}

Interpreter::Outcome Interpreter::b_list(const std::vector<std::string>& w, const Command&) {
  return {Flow::Normal, join_list(std::span<const std::string>(w).subspan(1))};
}

Interpreter::Outcome Interpreter::b_llength(const std::vector<std::string>& w, const Command&) {
  return {Flow::Normal, std::to_string(split_list(w[1]).size())};
}

Interpreter::Outcome Interpreter::b_lindex(const std::vector<std::string>& w, const Command&) {
  auto items = split_list(w[1]);
  std::int64_t i = w[2] == "end" ? static_cast<std::int64_t>(items.size()) - 1
                                 : parse_integer(w[2], "index");
  if (i < 0 || i >= static_cast<std::int64_t>(items.size())) return {};
  return {Flow::Normal, items[static_cast<std::size_t>(i)]};
}

Interpreter::Outcome Interpreter::b_lappend(const std::vector<std::string>& w, const Command&) {
  const std::string* cur = find_var(w[1]);
  std::string value = cur ? *cur : std::string{};
  for (std::size_t i = 2; i < w.size(); ++i) {
    if (!value.empty()) value.push_back(' ');
    value += list_element(w[i]);
  }
  set_var(w[1], value);
  return {Flow::Normal, value};
}

// Lists and numbers ------------------------------------------------------

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < s.size()) {
    while (i < s.size() && space(s[i])) ++i;
    if (i >= s.size()) break;
    std::string item;
    if (s[i] == '{') {
      int level = 1;
      std::size_t start = ++i;
      while (i < s.size()) {
        if (s[i] == '\\') {
          i += 2;
          continue;
        }
        if (s[i] == '{') ++level;
        if (s[i] == '}' && --level == 0) break;
        ++i;
      }
      if (i >= s.size()) runtime("unmatched open brace in list");
      item = std::string(s.substr(start, i - start));
      ++i;
      if (i < s.size() && !space(s[i])) runtime("list element in braces followed by garbage");
    } else if (s[i] == '"') {
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) {
          char e = s[++i];
          item.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        } else {
          item.push_back(s[i]);
        }
        ++i;
      }
      if (i >= s.size()) runtime("unmatched open quote in list");
      ++i;
      if (i < s.size() && !space(s[i])) runtime("list element in quotes followed by garbage");
    } else {
      while (i < s.size() && !space(s[i])) {
        if (s[i] == '\\' && i + 1 < s.size()) {
          char e = s[++i];
          item.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        } else {
          item.push_back(s[i]);
        }
        ++i;
      }
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::string list_element(std::string_view item) {
  if (item.empty()) return "{}";
  bool plain = item.front() != '#';
  bool brace_safe = true;
  for (char c : item) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '[' || c == ']' ||
        c == '$' || c == ';') {
      plain = false;
    }
    if (c == '{' || c == '}' || c == '\\') {
      plain = false;
      brace_safe = false;
    }
  }
  if (plain) return std::string(item);
  if (brace_safe) return "{" + std::string(item) + "}";
  std::string out;
  for (char c : item) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case ' ': case '{': case '}': case '\\': case '"': case '[': case ']': case '$':
      case ';':
        out.push_back('\\');
        out.push_back(c);
        break;
      default:
        out.push_back(c);
    }
  }
  if (out.front() == '#') out.insert(out.begin(), '\\');
  return out;
}

std::string join_list(std::span<const std::string> items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out.push_back(' ');
    out += list_element(item);
  }
  return out;
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v)) {
    runtime("expected a number for " + std::string(what) + " but got \"" + std::string(text) +
            "\"");
  }
  return v;
}

std::int64_t parse_integer(std::string_view text, std::string_view what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size()) {
    runtime("expected an integer for " + std::string(what) + " but got \"" + std::string(text) +
            "\"");
  }
  return v;
}

std::string format_number(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

}  // namespace pnet::pnsl
