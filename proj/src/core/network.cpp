#include "pnet/core/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pnet/core/error.hpp"

namespace pnet {

std::string to_string(ModuleId id) { return std::to_string(to_u64(id)); }

Table Table::zero() { return Table{{-1.0, 1.0}, {0.0, 0.0}}; }

bool Table::well_formed() const {
  if (x.size() < 2 || x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) return false;
    if (i > 0 && !(x[i] > x[i - 1])) return false;
  }
  return true;
}

double Table::eval(double at) const {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), at) - x.begin());
  std::size_t lo = hi - 1;
  if (at == x[lo]) return y[lo];
  return y[lo] + (y[hi] - y[lo]) * (at - x[lo]) / (x[hi] - x[lo]);
}

ParamValue Module::param(Param p) const {
  switch (p) {
    case Param::M: return params.M;
    case Param::K: return params.K;
    case Param::Z: return params.Z;
    case Param::S: return params.S;
    case Param::gain: return params.gain;
    case Param::fK: return params.fK;
    case Param::fZ: return params.fZ;
  }
  return 0.0;
}

std::string_view issue_name(IssueKind kind) {
  switch (kind) {
    case IssueKind::DanglingLink: return "DanglingLink";
    case IssueKind::DanglingAttachment: return "DanglingAttachment";
    case IssueKind::IllegalParam: return "IllegalParam";
    case IssueKind::MalformedTable: return "MalformedTable";
    case IssueKind::UnresolvedSignal: return "UnresolvedSignal";
  }
  return "?";
}

bool ValidationReport::contains(IssueKind kind, ModuleId id) const {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) {
    return i.kind == kind && i.module == id;
  });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << issue_name(issue.kind) << " module " << to_string(issue.module)
        << ": " << issue.detail << '\n';
  }
  return out.str();
}

namespace {

void check_value(Param param, const ParamValue& value) {
  if (is_table_param(param)) {
    const auto* table = std::get_if<Table>(&value);
    if (table == nullptr) {
      throw Error(ErrorCode::InvalidValue,
                  std::string(param_name(param)) + " expects a table");
    }
    if (!table->well_formed()) {
      throw Error(ErrorCode::MalformedTable,
                  std::string(param_name(param)) +
                      " table needs >= 2 finite points with increasing abscissae");
    }
    return;
  }
  const auto* number = std::get_if<double>(&value);
  if (number == nullptr) {
    throw Error(ErrorCode::InvalidValue,
                std::string(param_name(param)) + " expects a number");
  }
  if (!std::isfinite(*number)) {
    throw Error(ErrorCode::InvalidValue,
                std::string(param_name(param)) + " must be finite");
  }
  if (param == Param::M && *number <= 0.0) {
    throw Error(ErrorCode::NonPositiveInertia, "M must be > 0");
  }
  if (param == Param::K && *number < 0.0) {
    throw Error(ErrorCode::InvalidValue, "K must be >= 0");
  }
}

void store(PhysParams& params, Param param, const ParamValue& value) {
  switch (param) {
    case Param::M: params.M = std::get<double>(value); break;
    case Param::K: params.K = std::get<double>(value); break;
    case Param::Z: params.Z = std::get<double>(value); break;
    case Param::S: params.S = std::get<double>(value); break;
    case Param::gain: params.gain = std::get<double>(value); break;
    case Param::fK: params.fK = std::get<Table>(value); break;
    case Param::fZ: params.fZ = std::get<Table>(value); break;
  }
}

std::string describe(const Module& m) {
  return std::string(kind_name(m.kind)) + " " + to_string(m.id);
}

}  // namespace

ModuleId Network::add_module(ModuleKind kind, Vec2 bench_pos) {
  if (!std::isfinite(bench_pos.x) || !std::isfinite(bench_pos.y)) {
    throw Error(ErrorCode::InvalidValue, "bench position must be finite");
  }
  Module module;
  module.id = ModuleId{next_id_};
  module.kind = kind;
  module.bench_pos = bench_pos;
  modules_.emplace_hint(modules_.end(), module.id, std::move(module));
  ++next_id_;
  ++revision_;
  return ModuleId{next_id_ - 1};
}

const Module& Network::at(ModuleId id) const {
  auto it = modules_.find(id);
  if (it == modules_.end()) {
    throw Error(ErrorCode::UnknownId, "no module " + to_string(id));
  }
  return it->second;
}

const Module* Network::find(ModuleId id) const {
  auto it = modules_.find(id);
  return it == modules_.end() ? nullptr : &it->second;
}

Module& Network::mutable_at(ModuleId id) {
  auto it = modules_.find(id);
  if (it == modules_.end()) {
    throw Error(ErrorCode::UnknownId, "no module " + to_string(id));
  }
  return it->second;
}

std::vector<ModuleId> Network::referrers(ModuleId id) const {
  auto it = referrers_.find(id);
  if (it == referrers_.end()) return {};
  std::vector<ModuleId> out = it->second;
  std::sort(out.begin(), out.end());
  return out;
}

void Network::check_slot_target(const Module& owner, int slot, ModuleId target) const {
  if (slot >= slot_count(owner.kind)) {
    throw Error(ErrorCode::KindMismatch,
                describe(owner) + " has no endpoint slot " + std::to_string(slot));
  }
  const Module& t = at(target);
  bool ok = false;
  switch (owner.kind) {
    case ModuleKind::SOX:
    case ModuleKind::ENF:
      ok = has_position(t.kind);
      break;
    case ModuleKind::SOF:
      ok = family_of(t.kind) == Family::Lia;
      break;
    default:
      ok = family_of(owner.kind) == Family::Lia && has_position(t.kind);
      break;
  }
  if (!ok) {
    throw Error(ErrorCode::KindMismatch,
                describe(owner) + " cannot target " + describe(t));
  }
}

void Network::link_slot(Module& owner, int slot, ModuleId target) {
  unlink_slot(owner, slot);
  owner.slots[static_cast<std::size_t>(slot)] = target;
  referrers_[target].push_back(owner.id);
}

void Network::unlink_slot(Module& owner, int slot) {
  ModuleId& current = owner.slots[static_cast<std::size_t>(slot)];
  if (current == kNoModule) return;
  auto it = referrers_.find(current);
  if (it != referrers_.end()) {
    auto& refs = it->second;
    auto pos = std::find(refs.begin(), refs.end(), owner.id);
    if (pos != refs.end()) refs.erase(pos);
    if (refs.empty()) referrers_.erase(it);
  }
  current = kNoModule;
}

void Network::connect(ModuleId lia, ModuleId a, ModuleId b) {
  const Module& link = at(lia);
  if (family_of(link.kind) != Family::Lia) {
    throw Error(ErrorCode::KindMismatch, describe(link) + " is not an interaction");
  }
  check_slot_target(link, 0, a);
  check_slot_target(link, 1, b);
  if (a == b) {
    throw Error(ErrorCode::SelfLink, describe(link) + " cannot join a module to itself");
  }
  Module& owner = mutable_at(lia);
  link_slot(owner, 0, a);
  link_slot(owner, 1, b);
  ++revision_;
}

void Network::attach(ModuleId module, ModuleId target) {
  const Module& owner = at(module);
  if (family_of(owner.kind) == Family::Lia || slot_count(owner.kind) != 1) {
    throw Error(ErrorCode::KindMismatch, describe(owner) + " does not attach to a target");
  }
  check_slot_target(owner, 0, target);
  link_slot(mutable_at(module), 0, target);
  ++revision_;
}

void Network::disconnect(ModuleId id) {
  Module& owner = mutable_at(id);
  if (slot_count(owner.kind) == 0) {
    throw Error(ErrorCode::KindMismatch, describe(owner) + " has no endpoints");
  }
  for (int s = 0; s < slot_count(owner.kind); ++s) unlink_slot(owner, s);
  ++revision_;
}

std::size_t Network::set_param(std::span<const ModuleId> targets, Param param,
                               const ParamValue& value, SetMode mode) {
  std::size_t legal = 0;
  for (ModuleId id : targets) {
    const Module& m = at(id);
    if (is_legal(m.kind, param)) {
      ++legal;
    } else if (mode == SetMode::Strict) {
      throw Error(ErrorCode::NoSuchParamForKind,
                  std::string(param_name(param)) + " is not a parameter of " + describe(m));
    }
  }
  check_value(param, value);
  if (legal == 0) return 0;
  std::size_t updated = 0;
  for (ModuleId id : targets) {
    Module& m = mutable_at(id);
    if (!is_legal(m.kind, param)) continue;
    store(m.params, param, value);
    ++updated;
  }
  ++revision_;
  return updated;
}

ParamValue Network::get_param(ModuleId id, Param param) const {
  const Module& m = at(id);
  if (!is_legal(m.kind, param)) {
    throw Error(ErrorCode::NoSuchParamForKind,
                std::string(param_name(param)) + " is not a parameter of " + describe(m));
  }
  return m.param(param);
}

std::size_t Network::set_state(std::span<const ModuleId> targets, StateVar var,
                               double value, SetMode mode) {
  std::size_t legal = 0;
  for (ModuleId id : targets) {
    const Module& m = at(id);
    if (has_initial_state(m.kind)) {
      ++legal;
    } else if (mode == SetMode::Strict) {
      throw Error(ErrorCode::NoSuchParamForKind,
                  std::string(state_name(var)) + " is not a state of " + describe(m));
    }
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::InvalidValue, std::string(state_name(var)) + " must be finite");
  }
  if (legal == 0) return 0;
  for (ModuleId id : targets) {
    Module& m = mutable_at(id);
    if (!has_initial_state(m.kind)) continue;
    (var == StateVar::X0 ? m.init.X0 : m.init.V0) = value;
  }
  ++revision_;
  return legal;
}

double Network::get_state(ModuleId id, StateVar var) const {
  const Module& m = at(id);
  if (!has_initial_state(m.kind)) {
    throw Error(ErrorCode::NoSuchParamForKind,
                std::string(state_name(var)) + " is not a state of " + describe(m));
  }
  return var == StateVar::X0 ? m.init.X0 : m.init.V0;
}

void Network::set_signal(ModuleId id, std::string name) {
  Module& m = mutable_at(id);
  if (!takes_signal(m.kind)) {
    throw Error(ErrorCode::KindMismatch, describe(m) + " takes no input signal");
  }
  m.signal_ref = std::move(name);
  ++revision_;
}

void Network::move(ModuleId id, Vec2 bench_pos) {
  if (!std::isfinite(bench_pos.x) || !std::isfinite(bench_pos.y)) {
    throw Error(ErrorCode::InvalidValue, "bench position must be finite");
  }
  mutable_at(id).bench_pos = bench_pos;
  ++revision_;
}

void Network::remove_module(ModuleId id) {
  Module& doomed = mutable_at(id);
  for (int s = 0; s < slot_count(doomed.kind); ++s) unlink_slot(doomed, s);
  if (auto it = referrers_.find(id); it != referrers_.end()) {
    std::vector<ModuleId> refs = std::move(it->second);
    referrers_.erase(it);
    for (ModuleId owner_id : refs) {
      Module& owner = modules_.at(owner_id);
      for (auto& slot : owner.slots) {
        if (slot == id) slot = kNoModule;
      }
    }
  }
  modules_.erase(id);
  ++revision_;
}

ValidationReport Network::validate(const SignalLookup& signal_known) const {
  ValidationReport report;
  for (const auto& [id, m] : modules_) {
    int slots = slot_count(m.kind);
    for (int s = 0; s < slots; ++s) {
      if (m.slots[static_cast<std::size_t>(s)] != kNoModule) continue;
      report.issues.push_back({family_of(m.kind) == Family::Lia ? IssueKind::DanglingLink
                                                                 : IssueKind::DanglingAttachment,
                               id, "slot " + std::to_string(s) + " unset"});
      break;
    }
    for (Param p : legal_params(m.kind)) {
      ParamValue value = m.param(p);
      if (is_table_param(p)) {
        if (!std::get<Table>(value).well_formed()) {
          report.issues.push_back({IssueKind::MalformedTable, id,
                                   std::string(param_name(p)) + " table is malformed"});
        }
        continue;
      }
      double v = std::get<double>(value);
      bool bad = !std::isfinite(v) || (p == Param::M && v <= 0.0) || (p == Param::K && v < 0.0);
      if (bad) {
        report.issues.push_back({IssueKind::IllegalParam, id,
                                 std::string(param_name(p)) + " = " + std::to_string(v)});
      }
    }
    if (has_initial_state(m.kind) &&
        (!std::isfinite(m.init.X0) || !std::isfinite(m.init.V0))) {
      report.issues.push_back({IssueKind::IllegalParam, id, "non-finite initial state"});
    }
    if (takes_signal(m.kind) &&
        (m.signal_ref.empty() || !signal_known || !signal_known(m.signal_ref))) {
      report.issues.push_back({IssueKind::UnresolvedSignal, id,
                               "signal '" + m.signal_ref + "' is not declared"});
    }
  }
  return report;
}

Network Network::restore(std::vector<Module> modules, ModuleId next_id) {
  Network net;
  std::uint64_t highest = 0;
  for (auto& m : modules) {
    if (m.id == kNoModule) {
      throw Error(ErrorCode::IntegrityError, "module id 0 is reserved");
    }
    highest = std::max(highest, to_u64(m.id));
    ModuleId id = m.id;
    if (!net.modules_.emplace(id, std::move(m)).second) {
      throw Error(ErrorCode::IntegrityError, "duplicate module id " + to_string(id));
    }
  }
  if (to_u64(next_id) <= highest) {
    throw Error(ErrorCode::IntegrityError, "next id must exceed every module id");
  }
  for (const auto& [id, m] : net.modules_) {
    for (int s = 0; s < 2; ++s) {
      ModuleId target = m.slots[static_cast<std::size_t>(s)];
      if (target == kNoModule) continue;
      if (!net.contains(target)) {
        throw Error(ErrorCode::IntegrityError,
                    describe(m) + " references missing module " + to_string(target));
      }
      try {
        net.check_slot_target(m, s, target);
      } catch (const Error& e) {
        throw Error(ErrorCode::IntegrityError, e.what());
      }
      net.referrers_[target].push_back(id);
    }
    if (family_of(m.kind) == Family::Lia && m.slots[0] != kNoModule && m.slots[0] == m.slots[1]) {
      throw Error(ErrorCode::IntegrityError, describe(m) + " joins a module to itself");
    }
    if (!std::isfinite(m.bench_pos.x) || !std::isfinite(m.bench_pos.y)) {
      throw Error(ErrorCode::IntegrityError, describe(m) + " has a non-finite bench position");
    }
  }
  net.next_id_ = to_u64(next_id);
  return net;
}

}  // namespace pnet
