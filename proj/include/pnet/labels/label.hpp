#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pnet/core/module_kind.hpp"
#include "pnet/core/network.hpp"

namespace pnet {

enum class LabelOrigin : std::uint8_t { System, User };

/// Characters that may not appear inside a label segment.
inline constexpr std::string_view kReservedLabelChars = "/*?[]()+&-|";

/// First segment of every system label; user labels may not claim it.
inline constexpr std::string_view kSystemRoot = "sys";

bool is_reserved_label_char(char c);

/// "/seg/seg/..." with non-empty segments free of whitespace and reserved
/// characters.
bool is_well_formed_label(std::string_view text);

/// Throws MalformedLabel unless `text` is a well-formed user label.
void check_user_label(std::string_view text);

/// Segments of a well-formed label, without the separators.
std::vector<std::string_view> split_segments(std::string_view label);

/// The permanent label a module receives on creation: "/sys/<KIND>/<id>".
std::string system_label(ModuleKind kind, ModuleId id);

/// Sorted, duplicate-free module set.
using ModuleSet = std::vector<ModuleId>;

ModuleSet set_union(const ModuleSet& a, const ModuleSet& b);
ModuleSet set_intersection(const ModuleSet& a, const ModuleSet& b);
ModuleSet set_difference(const ModuleSet& a, const ModuleSet& b);

}  // namespace pnet
