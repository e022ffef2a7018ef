#include "pnet/labels/label.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

#include "pnet/core/error.hpp"

namespace pnet {

bool is_reserved_label_char(char c) {
  return kReservedLabelChars.find(c) != std::string_view::npos;
}

bool is_well_formed_label(std::string_view text) {
  if (text.size() < 2 || text.front() != '/' || text.back() == '/') return false;
  bool segment_empty = true;
  for (std::size_t i = 1; i < text.size(); ++i) {
    char c = text[i];
    if (c == '/') {
      if (segment_empty) return false;
      segment_empty = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) || is_reserved_label_char(c) ||
        std::iscntrl(static_cast<unsigned char>(c))) {
      return false;
    }
    segment_empty = false;
  }
  return !segment_empty;
}

void check_user_label(std::string_view text) {
  if (!is_well_formed_label(text)) {
    throw Error(ErrorCode::MalformedLabel, "malformed label '" + std::string(text) + "'");
  }
  auto segments = split_segments(text);
  if (segments.front() == kSystemRoot) {
    throw Error(ErrorCode::MalformedLabel,
                "'/" + std::string(kSystemRoot) + "' is reserved for system labels");
  }
}

std::vector<std::string_view> split_segments(std::string_view label) {
  std::vector<std::string_view> out;
  std::size_t start = 1;
  while (start <= label.size()) {
    std::size_t end = label.find('/', start);
    if (end == std::string_view::npos) end = label.size();
    out.push_back(label.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string system_label(ModuleKind kind, ModuleId id) {
  std::string out = "/";
  out += kSystemRoot;
  out += '/';
  out += kind_name(kind);
  out += '/';
  out += to_string(id);
  return out;
}

ModuleSet set_union(const ModuleSet& a, const ModuleSet& b) {
  ModuleSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ModuleSet set_intersection(const ModuleSet& a, const ModuleSet& b) {
  ModuleSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ModuleSet set_difference(const ModuleSet& a, const ModuleSet& b) {
  ModuleSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace pnet
