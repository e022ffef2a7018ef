#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pnet/pnsl/ast.hpp"

namespace pnet::pnsl {

class Interpreter;
namespace expr {
struct Node;
}

using Args = std::span<const std::string>;
using Handler = std::function<std::string(Interpreter&, Args)>;

struct CommandSpec {
  std::string name;
  int min_args = 0;
  int max_args = 0;  // -1: unbounded
  std::string usage;  // argument synopsis, e.g. "KIND ?count?"
  Handler fn;
};

struct Package {
  std::string name;
  std::vector<CommandSpec> commands;
};

struct Limits {
  std::uint64_t max_commands = 10'000'000;
  unsigned max_depth = 1000;  // procedure call depth
};

/// Everything-is-a-string command interpreter. Words are substituted
/// innermost-first, left to right; each command runs to completion or
/// throws before its own side effects. Builtins: set unset incr append
/// proc global if while for foreach break continue return expr error catch
/// list llength lindex lappend.
class Interpreter {
 public:
  explicit Interpreter(Limits limits = {});
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Throws DuplicatePackage.
  void register_package(Package package);
  std::size_t package_count() const { return packages_.size(); }
  std::vector<std::string> package_names() const;
  const Package* package(std::string_view name) const;
  bool is_builtin(std::string_view name) const;
  std::vector<std::string> builtin_names() const;

  /// Top-level evaluation: resets the command budget. Errors carry the
  /// position of the failing command; failures of model operations surface
  /// as RuntimeError with the original code as cause.
  std::string eval(std::string_view source);
  std::string eval(const Script& script);

  /// Evaluates a body in the current frame (for command implementations).
  std::string eval_body(std::string_view body);
  /// Evaluates an expression; the result is canonical number text, or a
  /// string for string-valued operands.
  std::string eval_expr(std::string_view expression);
  bool eval_condition(std::string_view expression);

  const std::string* find_var(std::string_view name) const;
  const std::string& get_var(std::string_view name) const;  // RuntimeError if unset
  void set_var(std::string_view name, std::string value);
  void unset_var(std::string_view name);

  void set_cancel_flag(const std::atomic<bool>* flag) { cancel_ = flag; }
  const Limits& limits() const { return limits_; }
  std::uint64_t commands_evaluated() const { return steps_; }

  /// Parsed scripts keyed by source text.
  std::shared_ptr<const Script> cached_parse(std::string_view source);

 private:
  enum class Flow : std::uint8_t { Normal, Return, Break, Continue };
  struct Outcome {
    Flow flow = Flow::Normal;
    std::string value;
  };
  struct Proc {
    std::vector<std::pair<std::string, std::optional<std::string>>> params;
    bool variadic = false;  // last parameter named "args"
    std::string body;
  };
  using Frame = std::unordered_map<std::string, std::string>;
  struct FrameRef {
    Frame vars;
    std::vector<std::string> globals;  // names linked to frame 0
  };
  using Builtin = Outcome (Interpreter::*)(const std::vector<std::string>&, const Command&);

  Outcome run_script(const Script& script);
  Outcome run_command(const Command& cmd);
  Outcome run_body(std::string_view body);
  std::string substitute(const Word& word);
  Outcome dispatch(const std::vector<std::string>& words, const Command& cmd);
  Outcome call_proc(const Proc& proc, const std::vector<std::string>& words);
  Frame& frame_for(std::string_view name);
  const Frame* frame_for(std::string_view name) const;

  Outcome b_set(const std::vector<std::string>&, const Command&);
  Outcome b_unset(const std::vector<std::string>&, const Command&);
  Outcome b_incr(const std::vector<std::string>&, const Command&);
  Outcome b_append(const std::vector<std::string>&, const Command&);
  Outcome b_proc(const std::vector<std::string>&, const Command&);
  Outcome b_global(const std::vector<std::string>&, const Command&);
  Outcome b_if(const std::vector<std::string>&, const Command&);
  Outcome b_while(const std::vector<std::string>&, const Command&);
  Outcome b_for(const std::vector<std::string>&, const Command&);
  Outcome b_foreach(const std::vector<std::string>&, const Command&);
  Outcome b_break(const std::vector<std::string>&, const Command&);
  Outcome b_continue(const std::vector<std::string>&, const Command&);
  Outcome b_return(const std::vector<std::string>&, const Command&);
  Outcome b_expr(const std::vector<std::string>&, const Command&);
  Outcome b_error(const std::vector<std::string>&, const Command&);
  Outcome b_catch(const std::vector<std::string>&, const Command&);
  Outcome b_list(const std::vector<std::string>&, const Command&);
  Outcome b_llength(const std::vector<std::string>&, const Command&);
  Outcome b_lindex(const std::vector<std::string>&, const Command&);
  Outcome b_lappend(const std::vector<std::string>&, const Command&);

  struct BuiltinSpec {
    Builtin fn;
    int min_words;
    int max_words;  // -1 unbounded; counts the command name
    const char* usage;
  };

  Limits limits_;
  std::map<std::string, BuiltinSpec, std::less<>> builtins_;
  std::map<std::string, Package, std::less<>> packages_;
  // bare command name -> packages exporting it
  std::map<std::string, std::vector<std::string>, std::less<>> exported_;
  std::map<std::string, Proc, std::less<>> procs_;
  std::vector<FrameRef> frames_;
  std::unordered_map<std::string, std::shared_ptr<const Script>> cache_;
  std::unordered_map<std::string, std::shared_ptr<const expr::Node>> expr_cache_;
  const std::atomic<bool>* cancel_ = nullptr;
  std::uint64_t steps_ = 0;
  unsigned proc_depth_ = 0;
  unsigned nesting_ = 0;
};

/// Tcl-style lists: whitespace-separated elements, braces or quotes group.
/// Throws RuntimeError on unbalanced grouping.
std::vector<std::string> split_list(std::string_view text);
std::string join_list(std::span<const std::string> items);
std::string list_element(std::string_view item);

/// Decimal number parsing for command arguments ("." separator, no locale).
/// Throws RuntimeError naming `what` when the text is not a finite number.
double parse_number(std::string_view text, std::string_view what);
std::int64_t parse_integer(std::string_view text, std::string_view what);
/// Shortest text that reads back to the same double.
std::string format_number(double value);

}  // namespace pnet::pnsl
