#pragma once

// Minimal flat config format: [section] headers, key = value lines, '#'
// comments. Values are plain tokens or whitespace-separated lists. Parsing
// is strict: duplicate keys, unknown sections at use time and malformed
// lines are all errors that name the offending location.

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace creepdam {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config from_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    cfg.parse(in);
    return cfg;
  }

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    Config cfg;
    cfg.origin_ = path;
    cfg.parse(in);
    return cfg;
  }

  const std::string& origin() const { return origin_; }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    return s != values_.end() && s->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    if (s == values_.end())
      throw ConfigError(origin_ + ": missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
      throw ConfigError(origin_ + ": missing key [" + section + "]." + key);
    return k->second.text;
  }

  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) const {
    return to_double(get_string(section, key), section, key);
  }

  double get_double_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
  }

  int get_int(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    size_t used = 0;
    long r = 0;
    try {
      r = std::stol(v, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != v.size())
      throw ConfigError(origin_ + ": [" + section + "]." + key + " = '" + v +
                        "' is not an integer");
    return static_cast<int>(r);
  }

  int get_int_or(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
  }

  std::vector<double> get_doubles(const std::string& section, const std::string& key) const {
    std::istringstream in(get_string(section, key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(tok, section, key));
    if (out.empty())
      throw ConfigError(origin_ + ": [" + section + "]." + key + " is empty");
    return out;
  }

  // Replaces (or adds) one value; used by parameter sweeps.
  Config with_override(const std::string& section, const std::string& key,
                       const std::string& value) const {
    Config cfg = *this;
    cfg.values_[section][key] = Entry{value, 0};
    return cfg;
  }

  // Strict-schema check: every present key must be expected.
  void reject_unknown_keys(
      const std::map<std::string, std::vector<std::string>>& schema) const {
    for (const auto& [section, keys] : values_) {
      const auto s = schema.find(section);
      if (s == schema.end())
        throw ConfigError(origin_ + ": unknown section [" + section + "]");
      for (const auto& [key, entry] : keys) {
        bool known = false;
        for (const auto& k : s->second) known = known || k == key;
        if (!known)
          throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": unknown key [" +
                            section + "]." + key);
      }
    }
  }

 private:
  struct Entry {
    std::string text;
    int line = 0;
  };

  static std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  double to_double(const std::string& v, const std::string& section,
                   const std::string& key) const {
    size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(v, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != v.size())
      throw ConfigError(origin_ + ": [" + section + "]." + key + " = '" + v +
                        "' is not a number");
    return r;
  }

  void parse(std::istream& in) {
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError(origin_ + ":" + std::to_string(line_no) +
                            ": malformed section header '" + line + "'");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw ConfigError(origin_ + ":" + std::to_string(line_no) + ": empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin_ + ":" + std::to_string(line_no) +
                          ": expected 'key = value', got '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty())
        throw ConfigError(origin_ + ":" + std::to_string(line_no) +
                          ": empty key or value in '" + line + "'");
      if (section.empty())
        throw ConfigError(origin_ + ":" + std::to_string(line_no) + ": key '" + key +
                          "' outside any [section]");
      if (values_[section].count(key))
        throw ConfigError(origin_ + ":" + std::to_string(line_no) + ": duplicate key [" +
                          section + "]." + key);
      values_[section][key] = Entry{value, line_no};
    }
  }

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> values_;
};

}  // namespace creepdam
