#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/algorithm/string/trim.hpp>

namespace levydc {

/// Malformed config text, unknown key or bad value. `line` is 0 for command-line overrides.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& key, std::size_t line, const std::string& what)
      : std::runtime_error(describe(key, line, what)), key_(key), line_(line) {}
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  static std::string describe(const std::string& key, std::size_t line, const std::string& what) {
    std::string s = line ? "line " + std::to_string(line) + ": " : std::string("override: ");
    if (!key.empty()) s += "key '" + key + "': ";
    return s + what;
  }
  std::string key_;
  std::size_t line_;
};

/// Flat `dotted.key = value` file. '#' starts a comment; strings may be double-quoted; lists are
/// written `[a, b, c]`.
class Config {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  static inline const std::vector<std::string> known_keys = {
      "levy.kind",          "levy.alpha",        "cut.epsilon",     "cut.h",
      "cut.h_mode",         "cut.T",             "cut.size_law",    "ar.threshold_eps",
      "sde.example",        "sde.sigma_mode",    "sde.x0",          "sde.coupling",
      "sde.compensate",     "grid.benchmark_k",  "grid.coarse_ks",  "grid.n",
      "scheme",             "method",            "seed",            "mc.loops",
      "mc.trajectories",    "error.ps",          "sim.trajectories", "out.dir",
      "validate.ks_samples", "validate.count_runs", "validate.laplace_samples", "validate.laplace_t",
  };

  static inline const std::map<std::string, std::string> aliases = {
      {"alpha", "levy.alpha"}, {"n", "grid.n"},       {"trajectories", "sim.trajectories"},
      {"epsilon", "cut.epsilon"}, {"h", "cut.h"},     {"out", "out.dir"},
      {"loops", "mc.loops"},   {"benchmark-k", "grid.benchmark_k"},
  };

  static std::string canonical(const std::string& key) {
    const auto it = aliases.find(key);
    return it == aliases.end() ? key : it->second;
  }

  static Config parse(std::istream& in) {
    Config c;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      if (const auto hash = find_comment(line); hash != std::string::npos) line.erase(hash);
      boost::algorithm::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw config_error("", line_no, "expected 'key = value'");
      std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      boost::algorithm::trim(key);
      boost::algorithm::trim(value);
      if (key.empty()) throw config_error("", line_no, "empty key");
      c.set(key, value, line_no);
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("", 0, "cannot open config file '" + path + "'");
    return parse(f);
  }

  void set(const std::string& key, const std::string& value, std::size_t line = 0) {
    const std::string k = canonical(key);
    if (std::find(known_keys.begin(), known_keys.end(), k) == known_keys.end())
      throw config_error(key, line, "unknown key");
    if (value.empty()) throw config_error(k, line, "missing value");
    entries_[k] = {unquote(value), line};
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : to_double(key, it->second.value, it->second.line);
  }

  double require_double(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw config_error(key, 0, "required key is missing");
    return to_double(key, it->second.value, it->second.line);
  }

  long long get_int(const std::string& key, long long fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    std::size_t pos = 0;
    long long out = 0;
    try {
      out = std::stoll(v, &pos);
    } catch (const std::exception&) {
      throw config_error(key, it->second.line, "not an integer: '" + v + "'");
    }
    if (pos != v.size()) throw config_error(key, it->second.line, "not an integer: '" + v + "'");
    return out;
  }

  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::string v = it->second.value;
    if (!v.empty() && v.front() == '[') {
      if (v.back() != ']') throw config_error(key, it->second.line, "unterminated list");
      v = v.substr(1, v.size() - 2);
    }
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      boost::algorithm::trim(item);
      if (item.empty()) throw config_error(key, it->second.line, "empty list element");
      out.push_back(unquote(item));
    }
    if (out.empty()) throw config_error(key, it->second.line, "empty list");
    return out;
  }

  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& s : get_list(key, {})) out.push_back(to_double(key, s, entries_.at(key).line));
    return out;
  }

  std::size_t line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  /// Sorted `key = value` lines; the resolved snapshot stored in manifests.
  std::string dump() const {
    std::string s;
    for (const auto& [k, e] : entries_) s += k + " = " + e.value + "\n";
    return s;
  }

 private:
  static std::size_t find_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return i;
    }
    return std::string::npos;
  }

  static std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
  }

  static double to_double(const std::string& key, const std::string& v, std::size_t line) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &pos);
    } catch (const std::exception&) {
      throw config_error(key, line, "not a number: '" + v + "'");
    }
    if (pos != v.size()) throw config_error(key, line, "not a number: '" + v + "'");
    return out;
  }

  std::map<std::string, Entry> entries_;
};

}  // namespace levydc
