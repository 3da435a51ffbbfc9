#include "dpmix/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dpmix {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty() && key.find('.') == std::string::npos)
      key = section + "." + key;
    if (cfg.kv_.count(key))
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

const std::string& Config::get_raw(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end())
    throw std::invalid_argument("config: missing required key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get_raw(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: key '" + key + "' is not a number: '" + v + "'");
  return x;
}

double Config::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_long(const std::string& key) const {
  const double x = get_double(key);
  const long n = static_cast<long>(x);
  if (static_cast<double>(n) != x)
    throw std::invalid_argument("config: key '" + key + "' is not an integer");
  return n;
}

long Config::get_long_or(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get_raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::string Config::get_string(const std::string& key) const { return get_raw(key); }

std::string Config::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_raw(key) : fallback;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  const std::string& v = get_raw(key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw std::invalid_argument("config: key '" + key + "' has a non-numeric entry: '" +
                                  tok + "'");
    out.push_back(x);
  }
  if (out.empty())
    throw std::invalid_argument("config: key '" + key + "' is an empty list");
  return out;
}

std::vector<long> Config::get_long_list(const std::string& key) const {
  std::vector<long> out;
  for (double x : get_double_list(key)) {
    const long n = static_cast<long>(x);
    if (static_cast<double>(n) != x)
      throw std::invalid_argument("config: key '" + key + "' has a non-integer entry");
    out.push_back(n);
  }
  return out;
}

void Config::validate_keys(const std::set<std::string>& allowed) const {
  std::string bad;
  for (const auto& [k, v] : kv_)
    if (!allowed.count(k)) bad += (bad.empty() ? "" : ", ") + k;
  if (!bad.empty())
    throw std::invalid_argument("config: unknown key(s): " + bad);
}

}  // namespace dpmix
