#include "newsseg/tomlcfg.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "newsseg/error.hpp"

namespace newsseg {

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool looks_like_int(const std::string& s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])) && s[i] != '_') {
      return false;
    }
  }
  return true;
}

}  // namespace

TomlConfig TomlConfig::parse(const std::string& text) {
  TomlConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string table;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw SchemaError("TOML line " + std::to_string(line_no) +
                          ": unterminated table header");
      }
      table = strip(line.substr(1, line.size() - 2));
      if (table.empty()) {
        throw SchemaError("TOML line " + std::to_string(line_no) +
                          ": empty table name");
      }
      cfg.tables_[table];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw SchemaError("TOML line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = strip(line.substr(0, eq));
    std::string raw = strip(line.substr(eq + 1));
    if (key.empty() || raw.empty()) {
      throw SchemaError("TOML line " + std::to_string(line_no) +
                        ": empty key or value");
    }

    Value v;
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"') {
        throw SchemaError("TOML line " + std::to_string(line_no) +
                          ": unterminated string");
      }
      v.kind = Value::Kind::String;
      v.str = raw.substr(1, raw.size() - 2);
    } else if (raw == "true" || raw == "false") {
      v.kind = Value::Kind::Bool;
      v.boolean = raw == "true";
    } else if (raw.front() == '[') {
      if (raw.back() != ']') {
        throw SchemaError("TOML line " + std::to_string(line_no) +
                          ": unterminated array");
      }
      v.kind = Value::Kind::IntArray;
      std::string body = raw.substr(1, raw.size() - 2);
      std::istringstream items(body);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = strip(item);
        if (item.empty()) continue;
        if (!looks_like_int(item)) {
          throw SchemaError("TOML line " + std::to_string(line_no) +
                            ": only integer arrays are supported");
        }
        v.int_array.push_back(std::stoll(item));
      }
    } else if (looks_like_int(raw)) {
      v.kind = Value::Kind::Int;
      v.integer = std::stoll(raw);
    } else {
      try {
        size_t consumed = 0;
        v.real = std::stod(raw, &consumed);
        if (consumed != raw.size()) throw std::invalid_argument(raw);
      } catch (const std::exception&) {
        throw SchemaError("TOML line " + std::to_string(line_no) +
                          ": cannot parse value \"" + raw + "\"");
      }
      v.kind = Value::Kind::Float;
    }
    cfg.tables_[table][key] = std::move(v);
  }
  return cfg;
}

TomlConfig TomlConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const TomlConfig::Value* TomlConfig::find(const std::string& table,
                                          const std::string& key) const {
  auto t = tables_.find(table);
  if (t == tables_.end()) return nullptr;
  auto k = t->second.find(key);
  if (k == t->second.end()) return nullptr;
  return &k->second;
}

bool TomlConfig::has(const std::string& table, const std::string& key) const {
  return find(table, key) != nullptr;
}

std::optional<std::string> TomlConfig::get_string(
    const std::string& table, const std::string& key) const {
  const Value* v = find(table, key);
  if (v == nullptr) return std::nullopt;
  if (v->kind != Value::Kind::String) {
    throw SchemaError("config " + table + "." + key + " must be a string");
  }
  return v->str;
}

std::optional<int64_t> TomlConfig::get_int(const std::string& table,
                                           const std::string& key) const {
  const Value* v = find(table, key);
  if (v == nullptr) return std::nullopt;
  if (v->kind != Value::Kind::Int) {
    throw SchemaError("config " + table + "." + key + " must be an integer");
  }
  return v->integer;
}

std::optional<double> TomlConfig::get_double(const std::string& table,
                                             const std::string& key) const {
  const Value* v = find(table, key);
  if (v == nullptr) return std::nullopt;
  if (v->kind == Value::Kind::Int) return static_cast<double>(v->integer);
  if (v->kind != Value::Kind::Float) {
    throw SchemaError("config " + table + "." + key + " must be a number");
  }
  return v->real;
}

std::optional<bool> TomlConfig::get_bool(const std::string& table,
                                         const std::string& key) const {
  const Value* v = find(table, key);
  if (v == nullptr) return std::nullopt;
  if (v->kind != Value::Kind::Bool) {
    throw SchemaError("config " + table + "." + key + " must be a boolean");
  }
  return v->boolean;
}

std::optional<std::vector<int64_t>> TomlConfig::get_int_array(
    const std::string& table, const std::string& key) const {
  const Value* v = find(table, key);
  if (v == nullptr) return std::nullopt;
  if (v->kind != Value::Kind::IntArray) {
    throw SchemaError("config " + table + "." + key +
                      " must be an integer array");
  }
  return v->int_array;
}

}  // namespace newsseg
