#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace densnav::toml {

/// Error with the 1-based source line it was detected on.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

/// Value tree for the TOML subset used by the scenario configs: tables,
/// arrays of tables, key/value pairs with booleans, integers, floats,
/// strings and (nested) arrays.
class Value {
 public:
  using Array = std::vector<Value>;
  using Table = std::map<std::string, Value>;

  Value() : v_(Table{}) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(int64_t i) : v_(i) {}
  explicit Value(double d) : v_(d) {}
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(Array a) : v_(std::move(a)) {}
  explicit Value(Table t) : v_(std::move(t)) {}

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<int64_t>(v_); }
  bool is_float() const { return std::holds_alternative<double>(v_); }
  bool is_number() const { return is_int() || is_float(); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  bool is_table() const { return std::holds_alternative<Table>(v_); }

  bool as_bool() const { return std::get<bool>(v_); }
  int64_t as_int() const { return std::get<int64_t>(v_); }
  double as_double() const {
    if (is_int()) return static_cast<double>(std::get<int64_t>(v_));
    return std::get<double>(v_);
  }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  const Array& as_array() const { return std::get<Array>(v_); }
  Array& as_array() { return std::get<Array>(v_); }
  const Table& as_table() const { return std::get<Table>(v_); }
  Table& as_table() { return std::get<Table>(v_); }

  bool contains(const std::string& key) const {
    return is_table() && as_table().count(key) > 0;
  }
  const Value& at(const std::string& key) const { return as_table().at(key); }

  bool operator==(const Value& other) const { return v_ == other.v_; }

 private:
  std::variant<bool, int64_t, double, std::string, Array, Table> v_;
};

/// Parses the documented subset; throws ParseError with the offending line.
Value parse(const std::string& text);
Value parse_file(const std::string& path);

/// Canonical serialization (sorted keys); parse(serialize(v)) == v.
std::string serialize(const Value& root);

}  // namespace densnav::toml
