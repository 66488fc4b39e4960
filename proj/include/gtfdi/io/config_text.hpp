#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gtfdi/errors.hpp"

namespace gtfdi {

/// Minimal key/value configuration format with nested tables:
///
///   # comment
///   [section.subsection]
///   key = 1.25
///   name = "text"
///   flag = true
///   coeffs = [0.8, -0.12, 0.0]
///
/// Keys are addressed with dotted paths ("section.subsection.key").
class ConfigText {
 public:
  struct Value {
    enum class Kind { kNumber, kString, kBool, kArray };
    Kind kind = Kind::kNumber;
    double number = 0.0;
    std::string text;
    bool flag = false;
    std::vector<double> array;
  };

  static ConfigText parse_string(const std::string& content, const std::string& origin = "<string>") {
    ConfigText cfg;
    std::istringstream in(content);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = strip(line);
      if (s.empty() || s[0] == '#') continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(origin, lineno, "unterminated section header");
        section = strip(s.substr(1, s.size() - 2));
        if (section.empty()) fail(origin, lineno, "empty section name");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
      std::string key = strip(s.substr(0, eq));
      std::string raw = strip(s.substr(eq + 1));
      if (key.empty()) fail(origin, lineno, "empty key");
      std::string path = section.empty() ? key : section + "." + key;
      cfg.values_[path] = parse_value(raw, origin, lineno);
    }
    return cfg;
  }

  static ConfigText parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key) const {
    const Value& v = fetch(key);
    if (v.kind != Value::Kind::kNumber) throw ConfigError("config key is not a number: " + key);
    return v.number;
  }
  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  bool boolean(const std::string& key) const {
    const Value& v = fetch(key);
    if (v.kind != Value::Kind::kBool) throw ConfigError("config key is not a boolean: " + key);
    return v.flag;
  }
  const std::string& text(const std::string& key) const {
    const Value& v = fetch(key);
    if (v.kind != Value::Kind::kString) throw ConfigError("config key is not a string: " + key);
    return v.text;
  }
  const std::vector<double>& array(const std::string& key) const {
    const Value& v = fetch(key);
    if (v.kind != Value::Kind::kArray) throw ConfigError("config key is not an array: " + key);
    return v.array;
  }

  void set_number(const std::string& key, double v) {
    Value val;
    val.kind = Value::Kind::kNumber;
    val.number = v;
    values_[key] = val;
  }
  void set_text(const std::string& key, const std::string& v) {
    Value val;
    val.kind = Value::Kind::kString;
    val.text = v;
    values_[key] = val;
  }
  void set_bool(const std::string& key, bool v) {
    Value val;
    val.kind = Value::Kind::kBool;
    val.flag = v;
    values_[key] = val;
  }
  void set_array(const std::string& key, const std::vector<double>& v) {
    Value val;
    val.kind = Value::Kind::kArray;
    val.array = v;
    values_[key] = val;
  }

  /// Serialize grouped by section, keys sorted; numbers round-trip exactly.
  std::string serialize() const {
    std::map<std::string, std::map<std::string, const Value*>> sections;
    for (const auto& [path, value] : values_) {
      const auto dot = path.rfind('.');
      std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
      std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
      sections[section][key] = &value;
    }
    std::ostringstream out;
    out.precision(17);
    bool first = true;
    for (const auto& [section, keys] : sections) {
      if (!first) out << "\n";
      first = false;
      if (!section.empty()) out << "[" << section << "]\n";
      for (const auto& [key, value] : keys) {
        out << key << " = ";
        write_value(out, *value);
        out << "\n";
      }
    }
    return out.str();
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << serialize();
  }

 private:
  static void fail(const std::string& origin, int lineno, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  }

  static std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static double parse_number(const std::string& raw, const std::string& origin, int lineno) {
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || strip(std::string(end)) != "")
      fail(origin, lineno, "malformed number: " + raw);
    return v;
  }

  static Value parse_value(const std::string& raw, const std::string& origin, int lineno) {
    Value v;
    if (raw.empty()) fail(origin, lineno, "empty value");
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"') fail(origin, lineno, "unterminated string");
      v.kind = Value::Kind::kString;
      v.text = raw.substr(1, raw.size() - 2);
    } else if (raw == "true" || raw == "false") {
      v.kind = Value::Kind::kBool;
      v.flag = raw == "true";
    } else if (raw.front() == '[') {
      if (raw.back() != ']') fail(origin, lineno, "unterminated array");
      v.kind = Value::Kind::kArray;
      std::string inner = raw.substr(1, raw.size() - 2);
      std::string item;
      std::istringstream items(inner);
      while (std::getline(items, item, ',')) {
        item = strip(item);
        if (item.empty()) fail(origin, lineno, "empty array element");
        v.array.push_back(parse_number(item, origin, lineno));
      }
    } else {
      v.kind = Value::Kind::kNumber;
      v.number = parse_number(raw, origin, lineno);
    }
    return v;
  }

  static void write_value(std::ostream& out, const Value& v) {
    switch (v.kind) {
      case Value::Kind::kNumber:
        out << v.number;
        break;
      case Value::Kind::kString:
        out << '"' << v.text << '"';
        break;
      case Value::Kind::kBool:
        out << (v.flag ? "true" : "false");
        break;
      case Value::Kind::kArray: {
        out << "[";
        for (std::size_t i = 0; i < v.array.size(); ++i)
          out << (i ? ", " : "") << v.array[i];
        out << "]";
        break;
      }
    }
  }

  const Value& fetch(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
  }

  std::map<std::string, Value> values_;
};

}  // namespace gtfdi
