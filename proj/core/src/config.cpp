#include "hardygeo/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hardygeo {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = (char)std::tolower((unsigned char)c);
  return s;
}

[[noreturn]] void parse_fail(const std::string& name, int line, int col,
                             const std::string& what) {
  std::ostringstream os;
  os << name << ":" << line << ":" << col << ": " << what;
  throw ConfigurationError(os.str());
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigurationError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.origin_ = name;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t first = raw.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const char c0 = raw[first];
    if (c0 == '#' || c0 == ';') continue;
    if (c0 == '[') {
      const std::size_t close = raw.find(']', first);
      if (close == std::string::npos)
        parse_fail(name, lineno, (int)raw.size() + 1, "missing ']' in section header");
      section = trim(raw.substr(first + 1, close - first - 1));
      if (section.empty())
        parse_fail(name, lineno, (int)first + 2, "empty section name");
      const std::string rest = trim(raw.substr(close + 1));
      if (!rest.empty() && rest[0] != '#' && rest[0] != ';')
        parse_fail(name, lineno, (int)close + 2, "unexpected text after section header");
      continue;
    }
    const std::size_t eq = raw.find('=');
    if (eq == std::string::npos)
      parse_fail(name, lineno, (int)first + 1, "expected 'key = value'");
    std::string key = trim(raw.substr(0, eq));
    if (key.empty())
      parse_fail(name, lineno, (int)first + 1, "empty key");
    std::string value = raw.substr(eq + 1);
    const std::size_t hash = value.find_first_of("#;");
    if (hash != std::string::npos) value = value.substr(0, hash);
    value = trim(value);
    if (value.empty())
      parse_fail(name, lineno, (int)eq + 2, "empty value for key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.set(full, value);
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    items_[it->second].second = value;
    return;
  }
  index_[key] = items_.size();
  items_.emplace_back(key, value);
}

bool Config::has(const std::string& key) const {
  return index_.count(key) != 0;
}

std::string Config::get_string(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) fail(key, "missing required key");
  return items_[it->second].second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  auto it = index_.find(key);
  return it == index_.end() ? fallback : items_[it->second].second;
}

double Config::get_number(const std::string& key) const {
  const std::string v = get_string(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') fail(key, "expected a number, got '" + v + "'");
  return x;
}

double Config::get_number(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') fail(key, "expected an integer, got '" + v + "'");
  return x;
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = lower(get_string(key));
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(key, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> Config::section_keys(const std::string& section) const {
  const std::string prefix = section + ".";
  std::vector<std::string> out;
  for (const auto& kv : items_)
    if (kv.first.rfind(prefix, 0) == 0) out.push_back(kv.first.substr(prefix.size()));
  return out;
}

void Config::fail(const std::string& key, const std::string& what) const {
  throw ConfigurationError(origin_ + ": key '" + key + "': " + what);
}

}  // namespace hardygeo
