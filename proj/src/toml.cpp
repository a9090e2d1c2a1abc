#include "densnav/toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace densnav::toml {

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  char get() { return s[pos++]; }

  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos;
  }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) { throw ParseError(c.line, msg); }

bool is_bare_key_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
}

std::string parse_key(Cursor& c) {
  c.skip_ws_inline();
  std::string key;
  while (!c.eof() && is_bare_key_char(c.peek())) key.push_back(c.get());
  if (key.empty()) fail(c, "expected a key");
  return key;
}

Value parse_value(Cursor& c);

Value parse_string(Cursor& c) {
  c.get();  // opening quote
  std::string out;
  while (true) {
    if (c.eof() || c.peek() == '\n') fail(c, "unterminated string");
    char ch = c.get();
    if (ch == '"') break;
    if (ch == '\\') {
      if (c.eof()) fail(c, "unterminated escape");
      char esc = c.get();
      switch (esc) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(c, std::string("unsupported escape \\") + esc);
      }
    } else {
      out.push_back(ch);
    }
  }
  return Value(std::move(out));
}

Value parse_number(Cursor& c) {
  std::string tok;
  while (!c.eof() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '+' ||
                      c.peek() == '-' || c.peek() == '.' || c.peek() == 'e' || c.peek() == 'E' ||
                      c.peek() == '_'))
    tok.push_back(c.get());
  std::string clean;
  for (char ch : tok)
    if (ch != '_') clean.push_back(ch);
  const bool is_float = clean.find_first_of(".eE") != std::string::npos;
  if (!is_float) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), v);
    if (ec != std::errc() || p != clean.data() + clean.size()) fail(c, "bad integer '" + tok + "'");
    return Value(v);
  }
  try {
    size_t used = 0;
    const double v = std::stod(clean, &used);
    if (used != clean.size()) fail(c, "bad number '" + tok + "'");
    if (!std::isfinite(v)) fail(c, "non-finite number '" + tok + "'");
    return Value(v);
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    fail(c, "bad number '" + tok + "'");
  }
}

Value parse_array(Cursor& c) {
  c.get();  // '['
  Value::Array arr;
  while (true) {
    c.skip_ws_inline();
    // Arrays may span lines.
    while (!c.eof() && (c.peek() == '\n' || c.peek() == '\r' || c.peek() == '#')) {
      c.skip_comment();
      if (!c.eof() && c.peek() == '\r') c.get();
      if (!c.eof() && c.peek() == '\n') {
        c.get();
        ++c.line;
      }
      c.skip_ws_inline();
    }
    if (c.eof()) fail(c, "unterminated array");
    if (c.peek() == ']') {
      c.get();
      break;
    }
    arr.push_back(parse_value(c));
    c.skip_ws_inline();
    while (!c.eof() && (c.peek() == '\n' || c.peek() == '\r' || c.peek() == '#')) {
      c.skip_comment();
      if (!c.eof() && c.peek() == '\r') c.get();
      if (!c.eof() && c.peek() == '\n') {
        c.get();
        ++c.line;
      }
      c.skip_ws_inline();
    }
    if (c.eof()) fail(c, "unterminated array");
    if (c.peek() == ',') {
      c.get();
      continue;
    }
    if (c.peek() == ']') {
      c.get();
      break;
    }
    fail(c, "expected ',' or ']' in array");
  }
  return Value(std::move(arr));
}

Value parse_value(Cursor& c) {
  c.skip_ws_inline();
  if (c.eof()) fail(c, "expected a value");
  const char ch = c.peek();
  if (ch == '"') return parse_string(c);
  if (ch == '[') return parse_array(c);
  if (std::isalpha(static_cast<unsigned char>(ch))) {
    std::string word;
    while (!c.eof() && std::isalpha(static_cast<unsigned char>(c.peek()))) word.push_back(c.get());
    if (word == "true") return Value(true);
    if (word == "false") return Value(false);
    fail(c, "unexpected token '" + word + "'");
  }
  if (ch == '+' || ch == '-' || ch == '.' || std::isdigit(static_cast<unsigned char>(ch)))
    return parse_number(c);
  fail(c, std::string("unexpected character '") + ch + "'");
}

void expect_line_end(Cursor& c) {
  c.skip_ws_inline();
  c.skip_comment();
  if (c.eof()) return;
  if (c.peek() == '\r') c.get();
  if (c.eof()) return;
  if (c.peek() != '\n') fail(c, "unexpected trailing content");
  c.get();
  ++c.line;
}

}  // namespace

Value parse(const std::string& text) {
  Cursor c{text};
  Value root;
  Value* current = &root;

  while (!c.eof()) {
    c.skip_ws_inline();
    if (c.eof()) break;
    const char ch = c.peek();
    if (ch == '\n') {
      c.get();
      ++c.line;
      continue;
    }
    if (ch == '\r') {
      c.get();
      continue;
    }
    if (ch == '#') {
      c.skip_comment();
      continue;
    }
    if (ch == '[') {
      c.get();
      const bool array_of_tables = !c.eof() && c.peek() == '[';
      if (array_of_tables) c.get();
      const std::string name = parse_key(c);
      c.skip_ws_inline();
      if (c.eof() || c.get() != ']') fail(c, "expected ']' after table name");
      if (array_of_tables) {
        if (c.eof() || c.get() != ']') fail(c, "expected ']]' after table-array name");
      }
      expect_line_end(c);
      auto& table = root.as_table();
      if (array_of_tables) {
        auto it = table.find(name);
        if (it == table.end()) {
          table.emplace(name, Value(Value::Array{}));
          it = table.find(name);
        } else if (!it->second.is_array()) {
          fail(c, "'" + name + "' is already a non-array value");
        }
        it->second.as_array().push_back(Value(Value::Table{}));
        current = &it->second.as_array().back();
      } else {
        auto it = table.find(name);
        if (it == table.end()) {
          table.emplace(name, Value(Value::Table{}));
          it = table.find(name);
        } else if (!it->second.is_table()) {
          fail(c, "'" + name + "' is already a non-table value");
        }
        current = &it->second;
      }
      continue;
    }
    // key = value
    const int key_line = c.line;
    const std::string key = parse_key(c);
    c.skip_ws_inline();
    if (c.eof() || c.get() != '=') throw ParseError(key_line, "expected '=' after key '" + key + "'");
    Value v = parse_value(c);
    expect_line_end(c);
    auto& table = current->as_table();
    if (table.count(key)) throw ParseError(key_line, "duplicate key '" + key + "'");
    table.emplace(key, std::move(v));
  }
  return root;
}

Value parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

void serialize_scalar(std::ostringstream& out, const Value& v) {
  if (v.is_bool()) {
    out << (v.as_bool() ? "true" : "false");
  } else if (v.is_int()) {
    out << v.as_int();
  } else if (v.is_float()) {
    std::ostringstream num;
    num.precision(17);
    num << v.as_double();
    std::string s = num.str();
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    out << s;
  } else if (v.is_string()) {
    out << '"';
    for (char ch : v.as_string()) {
      switch (ch) {
        case '"': out << "\\\""; break;
        case '\\': out << "\\\\"; break;
        case '\n': out << "\\n"; break;
        case '\t': out << "\\t"; break;
        default: out << ch;
      }
    }
    out << '"';
  } else if (v.is_array()) {
    out << '[';
    const auto& arr = v.as_array();
    for (size_t i = 0; i < arr.size(); ++i) {
      serialize_scalar(out, arr[i]);
      if (i + 1 < arr.size()) out << ", ";
    }
    out << ']';
  }
}

}  // namespace

std::string serialize(const Value& root) {
  std::ostringstream out;
  const auto& table = root.as_table();
  // Plain keys first, then [table] and [[array-of-table]] sections.
  for (const auto& [k, v] : table) {
    if (v.is_table() || (v.is_array() && !v.as_array().empty() && v.as_array()[0].is_table()))
      continue;
    out << k << " = ";
    serialize_scalar(out, v);
    out << '\n';
  }
  for (const auto& [k, v] : table) {
    if (v.is_table()) {
      out << "\n[" << k << "]\n";
      for (const auto& [kk, vv] : v.as_table()) {
        out << kk << " = ";
        serialize_scalar(out, vv);
        out << '\n';
      }
    } else if (v.is_array() && !v.as_array().empty() && v.as_array()[0].is_table()) {
      for (const auto& elem : v.as_array()) {
        out << "\n[[" << k << "]]\n";
        for (const auto& [kk, vv] : elem.as_table()) {
          out << kk << " = ";
          serialize_scalar(out, vv);
          out << '\n';
        }
      }
    }
  }
  return out.str();
}

}  // namespace densnav::toml
