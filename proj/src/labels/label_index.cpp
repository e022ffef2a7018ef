#include "pnet/labels/label_index.hpp"

#include <algorithm>
#include <unordered_set>

#include "pnet/core/error.hpp"

namespace pnet {

struct LabelIndex::Node {
  std::map<std::string, std::unique_ptr<Node>, std::less<>> children;
  ModuleId target = kNoModule;
};

namespace {

struct VisitKey {
  const void* node;
  std::size_t depth;
  bool operator==(const VisitKey&) const = default;
};

struct VisitKeyHash {
  std::size_t operator()(const VisitKey& k) const noexcept {
    return std::hash<const void*>()(k.node) ^ (k.depth * 0x9e3779b97f4a7c15ULL);
  }
};

}  // namespace

LabelIndex::LabelIndex() : root_(std::make_unique<Node>()) {}
LabelIndex::~LabelIndex() = default;
LabelIndex::LabelIndex(LabelIndex&&) noexcept = default;
LabelIndex& LabelIndex::operator=(LabelIndex&&) noexcept = default;

LabelIndex::LabelIndex(const LabelIndex& other)
    : by_label_(other.by_label_), by_module_(other.by_module_), root_(std::make_unique<Node>()) {
  rebuild_trie();
}

LabelIndex& LabelIndex::operator=(const LabelIndex& other) {
  if (this != &other) {
    by_label_ = other.by_label_;
    by_module_ = other.by_module_;
    rebuild_trie();
  }
  return *this;
}

void LabelIndex::rebuild_trie() {
  root_ = std::make_unique<Node>();
  for (const auto& [label, module] : by_label_) {
    Node* node = root_.get();
    for (auto seg : split_segments(label)) {
      auto& child = node->children[std::string(seg)];
      if (!child) child = std::make_unique<Node>();
      node = child.get();
    }
    node->target = module;
  }
}

void LabelIndex::insert(const std::string& label, ModuleId module) {
  by_label_.emplace(label, module);
  Node* node = root_.get();
  for (auto seg : split_segments(label)) {
    auto it = node->children.find(seg);
    if (it == node->children.end()) {
      it = node->children.emplace(std::string(seg), std::make_unique<Node>()).first;
    }
    node = it->second.get();
  }
  node->target = module;
}

void LabelIndex::erase(const std::string& label) {
  by_label_.erase(label);
  auto segments = split_segments(label);
  std::vector<Node*> path{root_.get()};
  for (auto seg : segments) {
    auto it = path.back()->children.find(seg);
    if (it == path.back()->children.end()) return;
    path.push_back(it->second.get());
  }
  path.back()->target = kNoModule;
  // Prune nodes that no longer lead to any label.
  for (std::size_t i = segments.size(); i > 0; --i) {
    Node* node = path[i];
    if (node->target != kNoModule || !node->children.empty()) break;
    auto parent_it = path[i - 1]->children.find(segments[i - 1]);
    path[i - 1]->children.erase(parent_it);
  }
}

void LabelIndex::add_system(ModuleId module, ModuleKind kind) {
  std::string label = system_label(kind, module);
  if (by_label_.count(label) != 0 || by_module_.count(module) != 0) {
    throw Error(ErrorCode::LabelTaken, "module " + to_string(module) + " already registered");
  }
  by_module_[module].system = label;
  insert(label, module);
}

void LabelIndex::remove_module(ModuleId module) {
  auto it = by_module_.find(module);
  if (it == by_module_.end()) return;
  erase(it->second.system);
  for (const auto& label : it->second.user) erase(label);
  by_module_.erase(it);
}

void LabelIndex::add_label(ModuleId module, std::string_view label) {
  check_user_label(label);
  auto owner = by_module_.find(module);
  if (owner == by_module_.end()) {
    throw Error(ErrorCode::UnknownId, "no module " + to_string(module));
  }
  std::string text(label);
  if (auto it = by_label_.find(text); it != by_label_.end()) {
    if (it->second == module) return;
    throw Error(ErrorCode::LabelTaken,
                "label '" + text + "' already targets module " + to_string(it->second));
  }
  owner->second.user.insert(text);
  insert(text, module);
}

void LabelIndex::remove_label(std::string_view label) {
  std::string text(label);
  auto it = by_label_.find(text);
  if (it == by_label_.end()) {
    throw Error(ErrorCode::UnknownLabel, "no label '" + text + "'");
  }
  auto& owner = by_module_.at(it->second);
  if (owner.system == text) {
    throw Error(ErrorCode::SystemLabelProtected, "system label '" + text + "' is permanent");
  }
  owner.user.erase(text);
  erase(text);
}

std::vector<std::string> LabelIndex::labels_of(ModuleId module) const {
  auto it = by_module_.find(module);
  if (it == by_module_.end()) {
    throw Error(ErrorCode::UnknownId, "no module " + to_string(module));
  }
  std::vector<std::string> out;
  out.reserve(1 + it->second.user.size());
  out.push_back(it->second.system);
  out.insert(out.end(), it->second.user.begin(), it->second.user.end());
  return out;
}

std::optional<ModuleId> LabelIndex::target(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

std::optional<LabelOrigin> LabelIndex::origin(std::string_view label) const {
  auto module = target(label);
  if (!module) return std::nullopt;
  return by_module_.at(*module).system == label ? LabelOrigin::System : LabelOrigin::User;
}

std::size_t LabelIndex::user_label_count() const {
  return by_label_.size() - by_module_.size();
}

void LabelIndex::for_each_label(
    const std::function<void(std::string_view, ModuleId, LabelOrigin)>& fn) const {
  for (const auto& [module, labels] : by_module_) {
    fn(labels.system, module, LabelOrigin::System);
    for (const auto& label : labels.user) fn(label, module, LabelOrigin::User);
  }
}

namespace {

template <class NodeT>
void collect_subtree(const NodeT& node, ModuleSet& out) {
  if (node.target != kNoModule) out.push_back(node.target);
  for (const auto& [name, child] : node.children) collect_subtree(*child, out);
}

void normalize(ModuleSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

template <class NodeT>
class TrieMatcher {
 public:
  explicit TrieMatcher(const std::vector<std::string>& segments) : segments_(segments) {}

  ModuleSet run(const NodeT& root) {
    match(root, 0);
    normalize(out_);
    return std::move(out_);
  }

 private:
  void match(const NodeT& node, std::size_t depth) {
    if (!visited_.insert({&node, depth}).second) return;
    if (depth == segments_.size()) {
      if (node.target != kNoModule) out_.push_back(node.target);
      return;
    }
    const std::string& seg = segments_[depth];
    if (seg == "**") {
      match(node, depth + 1);
      for (const auto& [name, child] : node.children) match(*child, depth);
      return;
    }
    if (!segment_has_glob(seg)) {
      auto it = node.children.find(seg);
      if (it != node.children.end()) match(*it->second, depth + 1);
      return;
    }
    for (const auto& [name, child] : node.children) {
      if (glob_match(seg, name)) match(*child, depth + 1);
    }
  }

  const std::vector<std::string>& segments_;
  std::unordered_set<VisitKey, VisitKeyHash> visited_;
  ModuleSet out_;
};

}  // namespace

ModuleSet LabelIndex::resolve_radical(std::string_view radical) const {
  if (!is_well_formed_label(radical)) {
    throw Error(ErrorCode::MalformedLabel, "malformed radical '" + std::string(radical) + "'");
  }
  const Node* node = root_.get();
  for (auto seg : split_segments(radical)) {
    auto it = node->children.find(seg);
    if (it == node->children.end()) return {};
    node = it->second.get();
  }
  ModuleSet out;
  collect_subtree(*node, out);
  normalize(out);
  return out;
}

ModuleSet LabelIndex::eval_node(const PickerNode& node) const {
  switch (node.op) {
    case PickerNode::Op::Pattern: {
      if (node.radical) {
        std::string radical;
        for (const auto& s : node.segments) radical += "/" + s;
        return resolve_radical(radical);
      }
      return TrieMatcher<Node>(node.segments).run(*root_);
    }
    case PickerNode::Op::Union:
      return set_union(eval_node(*node.lhs), eval_node(*node.rhs));
    case PickerNode::Op::Intersection:
      return set_intersection(eval_node(*node.lhs), eval_node(*node.rhs));
    case PickerNode::Op::Difference:
      return set_difference(eval_node(*node.lhs), eval_node(*node.rhs));
  }
  return {};
}

ModuleSet LabelIndex::eval(const Picker& picker) const { return eval_node(picker.root()); }

ModuleSet LabelIndex::eval_picker(std::string_view expr) const {
  return eval(Picker::parse(expr));
}

bool operator==(const LabelIndex& a, const LabelIndex& b) {
  if (a.by_label_ != b.by_label_) return false;
  for (const auto& [module, labels] : a.by_module_) {
    auto it = b.by_module_.find(module);
    if (it == b.by_module_.end() || it->second.system != labels.system ||
        it->second.user != labels.user) {
      return false;
    }
  }
  return a.by_module_.size() == b.by_module_.size();
}

}  // namespace pnet
