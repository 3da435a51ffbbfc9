#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace dpmix {

// Plain-text structured config.
//
// Format: `key = value` lines, optional `[section]` headers that prefix the
// keys that follow as `section.key`.  Dotted keys may also be written
// directly.  `#` and `;` start comments.  Duplicate keys are errors, as are
// keys outside the allowed set passed to validate_keys (callers document
// their exact schema).
class Config {
 public:
  static Config parse_string(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  const std::string& get_raw(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long_or(const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long> get_long_list(const std::string& key) const;

  // throws listing every key not in `allowed`
  void validate_keys(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace dpmix
