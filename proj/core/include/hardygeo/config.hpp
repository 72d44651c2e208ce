#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardygeo {

// User-facing configuration problem (bad file, bad value, grid too coarse).
// CLI maps this to exit code 1.
struct ConfigurationError : std::runtime_error {
  explicit ConfigurationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A declared invariant failed at runtime. CLI maps this to exit code 2.
struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// INI-style configuration: [section] headers, key = value pairs, # and ;
// comments, blank lines ignored. Keys are reported as "section.key".
class Config {
 public:
  Config() = default;

  // Throws ConfigurationError with file:line:col on malformed input.
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& name = "<string>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_number(const std::string& key) const;
  double get_number(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Keys of one section, in file order, with the section prefix stripped.
  std::vector<std::string> section_keys(const std::string& section) const;

  void set(const std::string& key, const std::string& value);
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<std::pair<std::string, std::string>> items_;  // file order
  std::map<std::string, std::size_t> index_;

  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

}  // namespace hardygeo
