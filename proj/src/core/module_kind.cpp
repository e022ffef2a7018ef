#include "pnet/core/module_kind.hpp"

#include <algorithm>

namespace pnet {

namespace {

constexpr std::array<std::string_view, kModuleKindCount> kKindNames = {
    "MAS", "CEL", "SOL", "ENX", "ENF", "RES",
    "FRO", "REF", "BUT", "LNL", "SOX", "SOF"};

constexpr std::array<std::string_view, 7> kParamNames = {"M",  "K",  "Z",
                                                         "S",  "fK", "fZ",
                                                         "gain"};

constexpr std::array<Param, 1> kMassParams = {Param::M};
constexpr std::array<Param, 3> kCelParams = {Param::M, Param::K, Param::Z};
constexpr std::array<Param, 1> kSpringParams = {Param::K};
constexpr std::array<Param, 1> kDamperParams = {Param::Z};
constexpr std::array<Param, 2> kRefParams = {Param::K, Param::Z};
constexpr std::array<Param, 3> kButParams = {Param::K, Param::Z, Param::S};
constexpr std::array<Param, 2> kLnlParams = {Param::fK, Param::fZ};
constexpr std::array<Param, 1> kObserverParams = {Param::gain};

}  // namespace

std::string_view kind_name(ModuleKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Mat: return "MAT";
    case Family::Lia: return "LIA";
    case Family::Observer: return "OBS";
  }
  return "?";
}

std::optional<ModuleKind> parse_kind(std::string_view text) {
  auto it = std::find(kKindNames.begin(), kKindNames.end(), text);
  if (it == kKindNames.end()) return std::nullopt;
  return static_cast<ModuleKind>(it - kKindNames.begin());
}

std::span<const Param> legal_params(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::MAS: return kMassParams;
    case ModuleKind::CEL: return kCelParams;
    case ModuleKind::RES: return kSpringParams;
    case ModuleKind::FRO: return kDamperParams;
    case ModuleKind::REF: return kRefParams;
    case ModuleKind::BUT: return kButParams;
    case ModuleKind::LNL: return kLnlParams;
    case ModuleKind::SOX:
    case ModuleKind::SOF: return kObserverParams;
    case ModuleKind::SOL:
    case ModuleKind::ENX:
    case ModuleKind::ENF: return {};
  }
  return {};
}

bool is_legal(ModuleKind kind, Param param) {
  auto legal = legal_params(kind);
  return std::find(legal.begin(), legal.end(), param) != legal.end();
}

std::string_view param_name(Param param) {
  return kParamNames[static_cast<std::size_t>(param)];
}

std::optional<Param> parse_param(std::string_view text) {
  auto it = std::find(kParamNames.begin(), kParamNames.end(), text);
  if (it == kParamNames.end()) return std::nullopt;
  return static_cast<Param>(it - kParamNames.begin());
}

std::string_view state_name(StateVar var) {
  return var == StateVar::X0 ? "X0" : "V0";
}

std::optional<StateVar> parse_state(std::string_view text) {
  if (text == "X0") return StateVar::X0;
  if (text == "V0") return StateVar::V0;
  return std::nullopt;
}

}  // namespace pnet
