#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pnet/core/module_kind.hpp"

namespace pnet {

/// Module identifiers are assigned from 1 and never reused within a document.
enum class ModuleId : std::uint64_t {};
inline constexpr ModuleId kNoModule{0};

constexpr std::uint64_t to_u64(ModuleId id) { return static_cast<std::uint64_t>(id); }
std::string to_string(ModuleId id);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Sampled function for LNL links; linear interpolation between knots,
/// clamped to the end values outside [x.front(), x.back()].
struct Table {
  std::vector<double> x;
  std::vector<double> y;

  static Table zero();
  bool well_formed() const;
  double eval(double at) const;
  friend bool operator==(const Table&, const Table&) = default;
};

using ParamValue = std::variant<double, Table>;

struct PhysParams {
  double M = 1.0;
  double K = 0.0;
  double Z = 0.0;
  double S = 0.0;
  double gain = 1.0;
  Table fK = Table::zero();
  Table fZ = Table::zero();
  friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

struct InitialState {
  double X0 = 0.0;
  double V0 = 0.0;
  friend bool operator==(const InitialState&, const InitialState&) = default;
};

struct Module {
  ModuleId id = kNoModule;
  ModuleKind kind = ModuleKind::MAS;
  PhysParams params;
  InitialState init;
  Vec2 bench_pos;
  // LIA: (a, b); SOX/SOF/ENF: target in slots[0]. kNoModule when unset.
  std::array<ModuleId, 2> slots{kNoModule, kNoModule};
  std::string signal_ref;

  ParamValue param(Param p) const;
  friend bool operator==(const Module&, const Module&) = default;
};

enum class SetMode : std::uint8_t { Strict, Lenient };

enum class IssueKind : std::uint8_t {
  DanglingLink,
  DanglingAttachment,
  IllegalParam,
  MalformedTable,
  UnresolvedSignal,
};

std::string_view issue_name(IssueKind kind);

struct Issue {
  IssueKind kind;
  ModuleId module;
  std::string detail;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const { return issues.empty(); }
  bool contains(IssueKind kind, ModuleId id) const;
  std::string summary() const;
};

/// The authoritative physics network: modules of the twelve kinds, their
/// parameters and initial states, and the MAT/LIA/observer topology.
///
/// Every mutating call either completes or throws `pnet::Error` without
/// touching the network.
class Network {
 public:
  using SignalLookup = std::function<bool(std::string_view)>;

  ModuleId add_module(ModuleKind kind, Vec2 bench_pos = {});
  void remove_module(ModuleId id);

  void connect(ModuleId lia, ModuleId a, ModuleId b);
  void attach(ModuleId module, ModuleId target);
  /// Clears the endpoint or target slots of a link/observer/ENF.
  void disconnect(ModuleId id);

  std::size_t set_param(std::span<const ModuleId> targets, Param param,
                        const ParamValue& value, SetMode mode = SetMode::Strict);
  ParamValue get_param(ModuleId id, Param param) const;

  std::size_t set_state(std::span<const ModuleId> targets, StateVar var,
                        double value, SetMode mode = SetMode::Strict);
  double get_state(ModuleId id, StateVar var) const;

  void set_signal(ModuleId id, std::string name);
  void move(ModuleId id, Vec2 bench_pos);

  ValidationReport validate(const SignalLookup& signal_known = {}) const;

  bool contains(ModuleId id) const { return modules_.count(id) != 0; }
  const Module& at(ModuleId id) const;
  const Module* find(ModuleId id) const;
  std::size_t size() const { return modules_.size(); }
  const std::map<ModuleId, Module>& modules() const { return modules_; }

  /// Modules whose slots reference `id`, ascending.
  std::vector<ModuleId> referrers(ModuleId id) const;

  std::uint64_t revision() const { return revision_; }
  ModuleId next_id() const { return ModuleId{next_id_}; }

  /// Rebuilds a network from stored modules (document loading). Checks ids,
  /// slot references and family rules; parameter values are left to
  /// validate() so a stored-but-illegal model can still be opened.
  static Network restore(std::vector<Module> modules, ModuleId next_id);

 private:
  Module& mutable_at(ModuleId id);
  void check_slot_target(const Module& owner, int slot, ModuleId target) const;
  void link_slot(Module& owner, int slot, ModuleId target);
  void unlink_slot(Module& owner, int slot);

  std::map<ModuleId, Module> modules_;
  std::unordered_map<ModuleId, std::vector<ModuleId>> referrers_;
  std::uint64_t next_id_ = 1;
  std::uint64_t revision_ = 0;
};

}  // namespace pnet
