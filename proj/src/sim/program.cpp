#include "pnet/sim/program.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "pnet/core/error.hpp"

namespace pnet::sim {

std::optional<std::uint32_t> SimProgram::mat_index(ModuleId id) const {
  auto it = std::lower_bound(mat_ids.begin(), mat_ids.end(), id);
  if (it == mat_ids.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - mat_ids.begin());
}

std::optional<std::uint32_t> SimProgram::link_index(ModuleId id) const {
  auto it = std::lower_bound(link_ids.begin(), link_ids.end(), id);
  if (it == link_ids.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - link_ids.begin());
}

namespace {

LinkTag link_tag_of(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::RES: return LinkTag::Spring;
    case ModuleKind::FRO: return LinkTag::Damper;
    case ModuleKind::REF: return LinkTag::SpringDamper;
    case ModuleKind::BUT: return LinkTag::Buffer;
    default: return LinkTag::Nonlinear;
  }
}

void build_csr(std::size_t rows, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& entries,
               std::vector<std::uint32_t>& offset, std::vector<std::uint32_t>& column,
               std::vector<std::uint8_t>* flag = nullptr,
               const std::vector<std::uint8_t>* entry_flags = nullptr) {
  offset.assign(rows + 1, 0);
  for (const auto& [row, col] : entries) ++offset[row + 1];
  for (std::size_t r = 0; r < rows; ++r) offset[r + 1] += offset[r];
  column.assign(entries.size(), 0);
  if (flag != nullptr) flag->assign(entries.size(), 0);
  std::vector<std::uint32_t> cursor(offset.begin(), offset.end() - 1);
  // Entries arrive in ascending column order, so each row stays sorted.
  for (std::size_t e = 0; e < entries.size(); ++e) {
    auto [row, col] = entries[e];
    std::uint32_t at = cursor[row]++;
    column[at] = col;
    if (flag != nullptr) (*flag)[at] = (*entry_flags)[e];
  }
}

}  // namespace

SimProgram compile(const Network& network, const SimConfig& config, const SignalBank& signals,
                   const std::optional<ModuleSet>& traced) {
  config.check();
  ValidationReport report = network.validate([](std::string_view) { return true; });
  if (!report.ok()) {
    throw Error(ErrorCode::NotValidated, "network does not validate:\n" + report.summary());
  }

  SimProgram prog;
  prog.revision = network.revision();
  prog.sample_rate = config.sample_rate;
  prog.trace_decimation = config.trace_decimation;

  std::unordered_map<std::string, std::uint32_t> signal_index;
  auto use_signal = [&](const Module& m) -> std::uint32_t {
    auto known = signal_index.find(m.signal_ref);
    if (known != signal_index.end()) return known->second;
    auto it = signals.find(m.signal_ref);
    if (it == signals.end()) {
      throw Error(ErrorCode::MissingSignal, std::string(kind_name(m.kind)) + " " +
                                                to_string(m.id) + " needs signal '" +
                                                m.signal_ref + "' which is not loaded");
    }
    auto idx = static_cast<std::uint32_t>(prog.signals.size());
    prog.signals.push_back(it->second);
    prog.signal_names.push_back(m.signal_ref);
    signal_index.emplace(m.signal_ref, idx);
    return idx;
  };

  for (const auto& [id, m] : network.modules()) {
    if (has_position(m.kind)) {
      prog.mat_ids.push_back(id);
      double M = m.params.M;
      switch (m.kind) {
        case ModuleKind::MAS:
          prog.mat_tag.push_back(MatTag::Mass);
          prog.coef_a.push_back(2.0);
          prog.coef_b.push_back(-1.0);
          break;
        case ModuleKind::CEL:
          prog.mat_tag.push_back(MatTag::Cel);
          prog.coef_a.push_back(2.0 - m.params.K / M - m.params.Z / M);
          prog.coef_b.push_back(m.params.Z / M - 1.0);
          break;
        case ModuleKind::SOL:
          prog.mat_tag.push_back(MatTag::Fixed);
          prog.coef_a.push_back(0.0);
          prog.coef_b.push_back(0.0);
          break;
        default:
          prog.mat_tag.push_back(MatTag::Imposed);
          prog.coef_a.push_back(0.0);
          prog.coef_b.push_back(0.0);
          break;
      }
      prog.mass.push_back(M);
      prog.self_k.push_back(m.kind == ModuleKind::CEL ? m.params.K : 0.0);
      prog.self_z.push_back(m.kind == ModuleKind::CEL ? m.params.Z : 0.0);
      prog.x0.push_back(m.init.X0);
      prog.v0.push_back(m.kind == ModuleKind::SOL ? 0.0 : m.init.V0);
      prog.mat_signal.push_back(m.kind == ModuleKind::ENX ? use_signal(m) : kNone);
    } else if (family_of(m.kind) == Family::Lia) {
      prog.link_ids.push_back(id);
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> incidence;
  std::vector<std::uint8_t> incidence_is_a;
  for (std::uint32_t li = 0; li < prog.link_ids.size(); ++li) {
    const Module& m = network.at(prog.link_ids[li]);
    std::uint32_t a = *prog.mat_index(m.slots[0]);
    std::uint32_t b = *prog.mat_index(m.slots[1]);
    prog.link_tag.push_back(link_tag_of(m.kind));
    prog.link_a.push_back(a);
    prog.link_b.push_back(b);
    prog.link_k.push_back(m.kind == ModuleKind::FRO ? 0.0 : m.params.K);
    prog.link_z.push_back(m.kind == ModuleKind::RES ? 0.0 : m.params.Z);
    prog.link_s.push_back(m.kind == ModuleKind::BUT ? m.params.S : 0.0);
    if (m.kind == ModuleKind::LNL) {
      prog.link_table.push_back(static_cast<std::uint32_t>(prog.tables.size()));
      prog.tables.push_back(m.params.fK);
      prog.tables.push_back(m.params.fZ);
    } else {
      prog.link_table.push_back(kNone);
    }
    incidence.emplace_back(a, li);
    incidence_is_a.push_back(1);
    incidence.emplace_back(b, li);
    incidence_is_a.push_back(0);
  }
  build_csr(prog.mat_ids.size(), incidence, prog.incident_offset, prog.incident_link,
            &prog.incident_is_a, &incidence_is_a);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> injections;
  for (const auto& [id, m] : network.modules()) {
    if (m.kind == ModuleKind::ENF) {
      injections.emplace_back(*prog.mat_index(m.slots[0]), use_signal(m));
    } else if (m.kind == ModuleKind::SOX) {
      prog.channels.push_back({id, m.kind, *prog.mat_index(m.slots[0]), m.params.gain});
    } else if (m.kind == ModuleKind::SOF) {
      prog.channels.push_back({id, m.kind, *prog.link_index(m.slots[0]), m.params.gain});
    }
  }
  build_csr(prog.mat_ids.size(), injections, prog.inject_offset, prog.inject_signal);

  if (traced) {
    for (ModuleId id : *traced) {
      if (auto idx = prog.mat_index(id)) {
        prog.trace_mats.push_back(*idx);
        prog.trace_ids.push_back(id);
      }
    }
  } else if (config.trace_mode == TraceMode::All) {
    prog.trace_mats.resize(prog.mat_ids.size());
    for (std::uint32_t i = 0; i < prog.trace_mats.size(); ++i) prog.trace_mats[i] = i;
    prog.trace_ids = prog.mat_ids;
  }
  return prog;
}

SimProgram compile(const Model& model, const SignalBank& external) {
  SignalBank bank = external;
  for (const auto& [name, source] : model.signals()) {
    if (source.embedded()) bank[name] = source.samples;
  }
  const SimConfig& config = model.sim_config();
  std::optional<ModuleSet> traced;
  if (config.trace_mode == TraceMode::Picker) traced = model.pick(config.trace_picker);
  SimProgram prog = compile(model.network(), config, bank, traced);
  prog.revision = model.revision();
  return prog;
}

double stiffness_for_frequency(double hz, double mass, double sample_rate) {
  return 2.0 * mass * (1.0 - std::cos(2.0 * std::numbers::pi * hz / sample_rate));
}

double frequency_for_stiffness(double k, double mass, double sample_rate) {
  return sample_rate * std::acos(1.0 - k / (2.0 * mass)) / (2.0 * std::numbers::pi);
}

}  // namespace pnet::sim
