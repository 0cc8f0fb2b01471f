#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace newsseg {

/// Flat-table TOML subset: [table] headers, key = value pairs with string,
/// integer, float, boolean, and homogeneous scalar-array values, and #
/// comments. Covers the per-module config tables; nested tables and dates
/// are out of scope.
class TomlConfig {
 public:
  static TomlConfig parse(const std::string& text);
  static TomlConfig parse_file(const std::string& path);

  bool has(const std::string& table, const std::string& key) const;

  std::optional<std::string> get_string(const std::string& table,
                                        const std::string& key) const;
  std::optional<int64_t> get_int(const std::string& table,
                                 const std::string& key) const;
  std::optional<double> get_double(const std::string& table,
                                   const std::string& key) const;
  std::optional<bool> get_bool(const std::string& table,
                               const std::string& key) const;
  std::optional<std::vector<int64_t>> get_int_array(
      const std::string& table, const std::string& key) const;

 private:
  struct Value {
    enum class Kind { String, Int, Float, Bool, IntArray } kind;
    std::string str;
    int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<int64_t> int_array;
  };

  const Value* find(const std::string& table, const std::string& key) const;

  std::map<std::string, std::map<std::string, Value>> tables_;
};

}  // namespace newsseg
