#include "pnet/io/app_url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "pnet/core/error.hpp"
#include "pnet/labels/picker.hpp"

namespace pnet::io {

std::string_view action_name(AppAction action) {
  switch (action) {
    case AppAction::Select: return "select";
    case AppAction::Goto: return "goto";
    case AppAction::Run: return "run";
  }
  return "?";
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::optional<std::uint64_t> parse_id(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) return std::nullopt;
  return v;
}

const std::string& need(const AppUrl& url, const char* key) {
  auto it = url.params.find(key);
  if (it == url.params.end() || it->second.empty()) {
    throw Error(ErrorCode::MissingParameter, std::string("pnet:") +
                                                 std::string(action_name(url.action)) +
                                                 " needs a '" + key + "' parameter");
  }
  return it->second;
}

}  // namespace

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out.push_back(text[i]);
      continue;
    }
    int hi = i + 1 < text.size() ? hex_value(text[i + 1]) : -1;
    int lo = i + 2 < text.size() ? hex_value(text[i + 2]) : -1;
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::BadScheme, "malformed percent escape in '" + std::string(text) + "'");
    }
    out.push_back(static_cast<char>(hi * 16 + lo));
    i += 2;
  }
  return out;
}

ModuleId AppUrl::module() const {
  auto id = parse_id(params.at("module"));
  return id ? ModuleId{*id} : kNoModule;
}

AppUrl parse_app_url(std::string_view text) {
  if (text.substr(0, kAppScheme.size()) != kAppScheme) {
    throw Error(ErrorCode::BadScheme, "not a pnet: URL: '" + std::string(text) + "'");
  }
  std::string_view rest = text.substr(kAppScheme.size());
  std::size_t q = rest.find('?');
  std::string_view action = rest.substr(0, q);
  std::string_view query = q == std::string_view::npos ? std::string_view{} : rest.substr(q + 1);

  AppUrl url;
  if (action == "select") {
    url.action = AppAction::Select;
  } else if (action == "goto") {
    url.action = AppAction::Goto;
  } else if (action == "run") {
    url.action = AppAction::Run;
  } else {
    throw Error(ErrorCode::BadScheme, "unknown pnet: action '" + std::string(action) + "'");
  }

  while (!query.empty()) {
    std::size_t amp = query.find('&');
    std::string_view pair = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    if (pair.empty()) continue;
    std::size_t eq = pair.find('=');
    std::string key = percent_decode(pair.substr(0, eq));
    std::string value =
        eq == std::string_view::npos ? std::string{} : percent_decode(pair.substr(eq + 1));
    url.params[key] = value;
  }

  switch (url.action) {
    case AppAction::Select:
      Picker::parse(need(url, "picker"));
      break;
    case AppAction::Goto:
      if (!parse_id(need(url, "module"))) {
        throw Error(ErrorCode::MissingParameter,
                    "pnet:goto needs a positive module id, got '" + url.params["module"] + "'");
      }
      break;
    case AppAction::Run:
      need(url, "script");
      break;
  }
  return url;
}

namespace {

bool is_void_element(std::string_view tag) {
  static constexpr std::string_view kVoid[] = {"area", "base",  "br",    "col",   "embed",
                                               "hr",   "img",   "input", "link",  "meta",
                                               "param", "source", "track", "wbr"};
  return std::find(std::begin(kVoid), std::end(kVoid), tag) != std::end(kVoid);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Pulls href values out of one tag body ("a href='x' class=y").
void collect_hrefs(std::string_view tag, NoteLinks& links) {
  std::string low = lower(tag);
  std::size_t at = 0;
  while ((at = low.find("href", at)) != std::string::npos) {
    bool word_start = at == 0 || std::isspace(static_cast<unsigned char>(low[at - 1]));
    std::size_t i = at + 4;
    at = i;
    if (!word_start) continue;
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    if (i >= tag.size() || tag[i] != '=') continue;
    ++i;
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    if (i >= tag.size()) break;
    std::string value;
    if (tag[i] == '"' || tag[i] == '\'') {
      char quote = tag[i];
      std::size_t end = tag.find(quote, i + 1);
      if (end == std::string_view::npos) {
        links.balanced = false;
        end = tag.size();
      }
      value = std::string(tag.substr(i + 1, end - i - 1));
      at = end;
    } else {
      std::size_t end = i;
      while (end < tag.size() && !std::isspace(static_cast<unsigned char>(tag[end]))) ++end;
      value = std::string(tag.substr(i, end - i));
      at = end;
    }
    if (value.rfind("pnet:", 0) == 0) {
      try {
        links.actions.push_back(parse_app_url(value));
      } catch (const Error&) {
        links.broken.push_back(value);
      }
    } else {
      links.external.push_back(value);
    }
  }
}

}  // namespace

NoteLinks scan_note(std::string_view html) {
  NoteLinks links;
  std::vector<std::string> open;
  std::size_t i = 0;
  while ((i = html.find('<', i)) != std::string_view::npos) {
    if (html.substr(i, 4) == "<!--") {
      std::size_t end = html.find("-->", i + 4);
      if (end == std::string_view::npos) {
        links.balanced = false;
        break;
      }
      i = end + 3;
      continue;
    }
    std::size_t end = html.find('>', i + 1);
    if (end == std::string_view::npos) {
      links.balanced = false;
      break;
    }
    std::string_view body = html.substr(i + 1, end - i - 1);
    i = end + 1;
    if (body.empty() || body[0] == '!' || body[0] == '?') continue;
    bool closing = body[0] == '/';
    if (closing) body.remove_prefix(1);
    bool self_closing = !body.empty() && body.back() == '/';
    std::size_t name_end = 0;
    while (name_end < body.size() && (std::isalnum(static_cast<unsigned char>(body[name_end])) ||
                                      body[name_end] == '-')) {
      ++name_end;
    }
    std::string name = lower(body.substr(0, name_end));
    if (name.empty()) continue;  // stray "<"
    if (closing) {
      if (open.empty() || open.back() != name) {
        links.balanced = false;
      } else {
        open.pop_back();
      }
      continue;
    }
    collect_hrefs(body.substr(name_end), links);
    if (!self_closing && !is_void_element(name)) open.push_back(name);
  }
  if (!open.empty()) links.balanced = false;
  return links;
}

}  // namespace pnet::io
