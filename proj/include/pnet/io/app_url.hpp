#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pnet/core/model.hpp"

namespace pnet::io {

inline constexpr std::string_view kAppScheme = "pnet:";

enum class AppAction : std::uint8_t { Select, Goto, Run };

std::string_view action_name(AppAction action);

/// "pnet:<action>?key=value&key=value". Values are percent-decoded; a
/// literal "&" inside a picker must be written %26.
///   select  picker=<picker expression>
///   goto    module=<id>
///   run     script=<script path or library name>
struct AppUrl {
  AppAction action = AppAction::Select;
  std::map<std::string, std::string> params;

  const std::string& picker() const { return params.at("picker"); }
  ModuleId module() const;
  const std::string& script() const { return params.at("script"); }
};

/// Throws BadScheme (not a pnet: URL or unknown action), MissingParameter or
/// PickerSyntaxError.
AppUrl parse_app_url(std::string_view text);

/// Throws BadScheme on a "%" not followed by two hex digits.
std::string percent_decode(std::string_view text);

struct NoteLinks {
  std::vector<AppUrl> actions;
  std::vector<std::string> external;
  std::vector<std::string> broken;  // pnet: links that failed to parse
  bool balanced = true;             // every opened tag is closed
  bool flagged() const { return !broken.empty() || !balanced; }
};

/// Scans href attributes in a note body and checks tag balance. Never throws.
NoteLinks scan_note(std::string_view html);

}  // namespace pnet::io
