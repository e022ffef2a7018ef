#include "pnet/core/model.hpp"

#include <cmath>

#include "pnet/core/error.hpp"

namespace pnet {

void SimConfig::check() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorCode::InvalidValue, "sample_rate must be > 0");
  }
  if (trace_decimation < 1) {
    throw Error(ErrorCode::InvalidValue, "trace_decimation must be >= 1");
  }
  if (thread_count < 1) {
    throw Error(ErrorCode::InvalidValue, "thread_count must be >= 1");
  }
  if (trace_mode == TraceMode::Picker && trace_picker.empty()) {
    throw Error(ErrorCode::InvalidValue, "trace picker is empty");
  }
}

ModuleId Model::add_module(ModuleKind kind, Vec2 bench_pos) {
  ModuleId id = network_.add_module(kind, bench_pos);
  labels_.add_system(id, kind);
  ++revision_;
  return id;
}

void Model::remove_module(ModuleId id) {
  network_.remove_module(id);
  labels_.remove_module(id);
  ++revision_;
}

void Model::connect(ModuleId lia, ModuleId a, ModuleId b) {
  network_.connect(lia, a, b);
  ++revision_;
}

void Model::attach(ModuleId module, ModuleId target) {
  network_.attach(module, target);
  ++revision_;
}

void Model::disconnect(ModuleId id) {
  network_.disconnect(id);
  ++revision_;
}

std::size_t Model::set_param(std::span<const ModuleId> targets, Param param,
                             const ParamValue& value, SetMode mode) {
  std::size_t n = network_.set_param(targets, param, value, mode);
  if (n > 0) ++revision_;
  return n;
}

std::size_t Model::set_state(std::span<const ModuleId> targets, StateVar var, double value,
                             SetMode mode) {
  std::size_t n = network_.set_state(targets, var, value, mode);
  if (n > 0) ++revision_;
  return n;
}

void Model::set_signal_ref(ModuleId id, std::string name) {
  network_.set_signal(id, std::move(name));
  ++revision_;
}

void Model::move(ModuleId id, Vec2 bench_pos) {
  network_.move(id, bench_pos);
  ++revision_;
}

void Model::add_label(ModuleId id, std::string_view label) {
  labels_.add_label(id, label);
  ++revision_;
}

void Model::remove_label(std::string_view label) {
  labels_.remove_label(label);
  ++revision_;
}

std::uint64_t Model::add_note(Vec2 pos, std::string html) {
  if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) {
    throw Error(ErrorCode::InvalidValue, "bench position must be finite");
  }
  std::uint64_t id = next_note_id_++;
  notes_.emplace(id, BenchNote{id, pos, std::move(html)});
  ++revision_;
  return id;
}

void Model::remove_note(std::uint64_t id) {
  if (notes_.erase(id) == 0) {
    throw Error(ErrorCode::UnknownId, "no note " + std::to_string(id));
  }
  ++revision_;
}

void Model::edit_note(std::uint64_t id, std::string html) {
  auto it = notes_.find(id);
  if (it == notes_.end()) {
    throw Error(ErrorCode::UnknownId, "no note " + std::to_string(id));
  }
  it->second.html = std::move(html);
  ++revision_;
}

void Model::declare_signal(const std::string& name, SignalSource source) {
  if (name.empty()) throw Error(ErrorCode::InvalidValue, "signal name is empty");
  for (double v : source.samples) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidValue, "signal samples must be finite");
  }
  signals_[name] = std::move(source);
  ++revision_;
}

void Model::remove_signal(const std::string& name) {
  if (signals_.erase(name) == 0) {
    throw Error(ErrorCode::UnknownLabel, "no signal '" + name + "'");
  }
  ++revision_;
}

void Model::set_sim_config(const SimConfig& config) {
  config.check();
  sim_config_ = config;
  ++revision_;
}

void Model::set_script_refs(std::vector<std::string> refs) {
  script_refs_ = std::move(refs);
  ++revision_;
}

ValidationReport Model::validate() const {
  return network_.validate(
      [this](std::string_view name) { return signals_.count(std::string(name)) != 0; });
}

Model Model::restore(Network network, LabelIndex labels, std::map<std::uint64_t, BenchNote> notes,
                     std::uint64_t next_note_id, std::map<std::string, SignalSource> signals,
                     SimConfig sim_config, std::vector<std::string> script_refs) {
  for (const auto& [id, module] : network.modules()) {
    if (!labels.has_module(id)) {
      throw Error(ErrorCode::IntegrityError, "module " + to_string(id) + " has no system label");
    }
  }
  labels.for_each_label([&](std::string_view label, ModuleId id, LabelOrigin) {
    if (!network.contains(id)) {
      throw Error(ErrorCode::IntegrityError,
                  "label '" + std::string(label) + "' targets missing module " + to_string(id));
    }
  });
  for (const auto& [id, note] : notes) {
    if (id == 0 || id >= next_note_id || note.id != id) {
      throw Error(ErrorCode::IntegrityError, "bad note id " + std::to_string(id));
    }
  }
  sim_config.check();
  Model model;
  model.network_ = std::move(network);
  model.labels_ = std::move(labels);
  model.notes_ = std::move(notes);
  model.next_note_id_ = next_note_id;
  model.signals_ = std::move(signals);
  model.sim_config_ = std::move(sim_config);
  model.script_refs_ = std::move(script_refs);
  return model;
}

bool operator==(const Model& a, const Model& b) {
  return a.network_.modules() == b.network_.modules() &&
         a.network_.next_id() == b.network_.next_id() && a.labels_ == b.labels_ &&
         a.notes_ == b.notes_ && a.next_note_id_ == b.next_note_id_ &&
         a.signals_ == b.signals_ && a.sim_config_ == b.sim_config_ &&
         a.script_refs_ == b.script_refs_;
}

}  // namespace pnet
