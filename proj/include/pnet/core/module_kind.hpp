#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace pnet {

// The twelve elementary modules. MAT-family modules carry a position on the
// movement axis (ENF excepted, it only injects force into its target),
// LIA-family modules compute a force between two MATs and observers record.
enum class ModuleKind : std::uint8_t {
  MAS,  // pure inertia
  CEL,  // mass + spring + damper anchored at 0
  SOL,  // fixed point
  ENX,  // imposed-position input
  ENF,  // force-injection input
  RES,  // spring
  FRO,  // damper
  REF,  // spring + damper
  BUT,  // one-sided buffer contact
  LNL,  // table-driven nonlinear link
  SOX,  // position recorder
  SOF,  // force recorder
};

inline constexpr std::size_t kModuleKindCount = 12;

inline constexpr std::array<ModuleKind, kModuleKindCount> kAllKinds = {
    ModuleKind::MAS, ModuleKind::CEL, ModuleKind::SOL, ModuleKind::ENX,
    ModuleKind::ENF, ModuleKind::RES, ModuleKind::FRO, ModuleKind::REF,
    ModuleKind::BUT, ModuleKind::LNL, ModuleKind::SOX, ModuleKind::SOF};

enum class Family : std::uint8_t { Mat, Lia, Observer };

constexpr Family family_of(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::MAS:
    case ModuleKind::CEL:
    case ModuleKind::SOL:
    case ModuleKind::ENX:
    case ModuleKind::ENF:
      return Family::Mat;
    case ModuleKind::RES:
    case ModuleKind::FRO:
    case ModuleKind::REF:
    case ModuleKind::BUT:
    case ModuleKind::LNL:
      return Family::Lia;
    case ModuleKind::SOX:
    case ModuleKind::SOF:
      return Family::Observer;
  }
  return Family::Observer;
}

/// MAT-family kinds that own a position a link can attach to.
constexpr bool has_position(ModuleKind kind) {
  return family_of(kind) == Family::Mat && kind != ModuleKind::ENF;
}

/// Number of endpoint/target slots: 2 for links, 1 for SOX, SOF and ENF.
constexpr int slot_count(ModuleKind kind) {
  if (family_of(kind) == Family::Lia) return 2;
  if (kind == ModuleKind::SOX || kind == ModuleKind::SOF ||
      kind == ModuleKind::ENF) {
    return 1;
  }
  return 0;
}

constexpr bool takes_signal(ModuleKind kind) {
  return kind == ModuleKind::ENX || kind == ModuleKind::ENF;
}

std::string_view kind_name(ModuleKind kind);
std::string_view family_name(Family family);
std::optional<ModuleKind> parse_kind(std::string_view text);

enum class Param : std::uint8_t { M, K, Z, S, fK, fZ, gain };

inline constexpr std::array<Param, 7> kAllParams = {
    Param::M, Param::K, Param::Z, Param::S, Param::fK, Param::fZ, Param::gain};

constexpr bool is_table_param(Param p) { return p == Param::fK || p == Param::fZ; }

/// Parameter names legal for a kind, in canonical order.
std::span<const Param> legal_params(ModuleKind kind);
bool is_legal(ModuleKind kind, Param param);

std::string_view param_name(Param param);
std::optional<Param> parse_param(std::string_view text);

enum class StateVar : std::uint8_t { X0, V0 };

/// Initial-state properties exist on every MAT-family kind.
constexpr bool has_initial_state(ModuleKind kind) {
  return family_of(kind) == Family::Mat;
}

std::string_view state_name(StateVar var);
std::optional<StateVar> parse_state(std::string_view text);

}  // namespace pnet
