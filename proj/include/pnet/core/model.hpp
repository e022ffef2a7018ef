#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pnet/core/network.hpp"
#include "pnet/labels/label_index.hpp"
#include "pnet/sim/config.hpp"

namespace pnet {

/// An HTML annotation placed on the workbench.
struct BenchNote {
  std::uint64_t id = 0;
  Vec2 pos;
  std::string html;
  friend bool operator==(const BenchNote&, const BenchNote&) = default;
};

/// Input signal for ENX/ENF modules: either embedded samples or a file
/// (WAV, or raw float64 with a declared rate) loaded when simulating.
struct SignalSource {
  std::string path;          // empty: samples are embedded
  double declared_rate = 0;  // raw files only
  std::vector<double> samples;

  bool embedded() const { return path.empty(); }
  friend bool operator==(const SignalSource&, const SignalSource&) = default;
};

/// The model at hand: network, labels, bench notes, input signals and
/// simulation settings. Every edit goes through here so that the network
/// and the label index stay consistent and the revision advances once per
/// atomic mutation.
class Model {
 public:
  ModuleId add_module(ModuleKind kind, Vec2 bench_pos = {});
  void remove_module(ModuleId id);
  void connect(ModuleId lia, ModuleId a, ModuleId b);
  void attach(ModuleId module, ModuleId target);
  void disconnect(ModuleId id);
  std::size_t set_param(std::span<const ModuleId> targets, Param param, const ParamValue& value,
                        SetMode mode = SetMode::Strict);
  std::size_t set_state(std::span<const ModuleId> targets, StateVar var, double value,
                        SetMode mode = SetMode::Strict);
  void set_signal_ref(ModuleId id, std::string name);
  void move(ModuleId id, Vec2 bench_pos);

  void add_label(ModuleId id, std::string_view label);
  void remove_label(std::string_view label);
  ModuleSet pick(std::string_view picker) const { return labels_.eval_picker(picker); }

  std::uint64_t add_note(Vec2 pos, std::string html);
  void remove_note(std::uint64_t id);
  void edit_note(std::uint64_t id, std::string html);
  const std::map<std::uint64_t, BenchNote>& notes() const { return notes_; }

  void declare_signal(const std::string& name, SignalSource source);
  void remove_signal(const std::string& name);
  const std::map<std::string, SignalSource>& signals() const { return signals_; }

  void set_sim_config(const SimConfig& config);
  const SimConfig& sim_config() const { return sim_config_; }

  void set_script_refs(std::vector<std::string> refs);
  const std::vector<std::string>& script_refs() const { return script_refs_; }

  ValidationReport validate() const;

  const Network& network() const { return network_; }
  const LabelIndex& labels() const { return labels_; }
  std::uint64_t revision() const { return revision_; }
  std::uint64_t next_note_id() const { return next_note_id_; }

  /// Assembles a model from stored parts (document loading). The label
  /// index must hold a system label for every module and nothing else
  /// referencing missing modules.
  static Model restore(Network network, LabelIndex labels, std::map<std::uint64_t, BenchNote> notes,
                       std::uint64_t next_note_id, std::map<std::string, SignalSource> signals,
                       SimConfig sim_config, std::vector<std::string> script_refs);

  /// Structural equality (revision excluded).
  friend bool operator==(const Model& a, const Model& b);

 private:
  Network network_;
  LabelIndex labels_;
  std::map<std::uint64_t, BenchNote> notes_;
  std::uint64_t next_note_id_ = 1;
  std::map<std::string, SignalSource> signals_;
  SimConfig sim_config_;
  std::vector<std::string> script_refs_;
  std::uint64_t revision_ = 0;
};

}  // namespace pnet
