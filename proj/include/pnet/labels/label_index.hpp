#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pnet/labels/label.hpp"
#include "pnet/labels/picker.hpp"

namespace pnet {

/// Bidirectional label <-> module index. Each label string targets exactly
/// one module; each module owns one permanent system label and any number of
/// user labels. A segment trie backs radical and picker queries.
class LabelIndex {
 public:
  LabelIndex();
  ~LabelIndex();
  LabelIndex(LabelIndex&&) noexcept;
  LabelIndex& operator=(LabelIndex&&) noexcept;
  LabelIndex(const LabelIndex& other);
  LabelIndex& operator=(const LabelIndex& other);

  /// Registers the permanent label of a new module.
  void add_system(ModuleId module, ModuleKind kind);
  /// Drops every label of a removed module.
  void remove_module(ModuleId module);

  void add_label(ModuleId module, std::string_view label);
  void remove_label(std::string_view label);

  /// System label first, then user labels in lexicographic order.
  std::vector<std::string> labels_of(ModuleId module) const;
  std::optional<ModuleId> target(std::string_view label) const;
  std::optional<LabelOrigin> origin(std::string_view label) const;
  bool has_module(ModuleId module) const { return by_module_.count(module) != 0; }

  ModuleSet resolve_radical(std::string_view radical) const;
  ModuleSet eval_picker(std::string_view expr) const;
  ModuleSet eval(const Picker& picker) const;

  std::size_t label_count() const { return by_label_.size(); }
  std::size_t user_label_count() const;
  void for_each_label(
      const std::function<void(std::string_view, ModuleId, LabelOrigin)>& fn) const;

  friend bool operator==(const LabelIndex& a, const LabelIndex& b);

 private:
  struct Node;
  struct ModuleLabels {
    std::string system;
    std::set<std::string> user;
  };

  void insert(const std::string& label, ModuleId module);
  void erase(const std::string& label);
  ModuleSet eval_node(const PickerNode& node) const;
  void rebuild_trie();

  std::unordered_map<std::string, ModuleId> by_label_;
  std::unordered_map<ModuleId, ModuleLabels> by_module_;
  std::unique_ptr<Node> root_;
};

}  // namespace pnet
