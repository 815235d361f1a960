// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reader for the TOML subset used by bench matrices: tables, arrays of tables, dotted keys, basic and literal
// strings, integers, floats, booleans, (multi-line) arrays and inline tables. Dates and multi-line strings are
// rejected.

#include <cctype>
#include <charconv>
#include <string>

#include "json.hpp"
#include "lcslis/core.hpp"

namespace lcslis::toml {

class Reader {
 public:
  explicit Reader(std::string text) : s_(std::move(text)) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }
  char get() {
    const char c = s_[i_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("toml line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') get();
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') get();
      if (peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
        continue;
      }
      break;
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') get();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    get();
  }

  std::string bare_or_quoted_key() {
    skip_ws();
    if (peek() == '"' || peek() == '\'') return string_value();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) k += get();
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_or_quoted_key()};
    skip_ws();
    while (peek() == '.') {
      get();
      parts.push_back(bare_or_quoted_key());
      skip_ws();
    }
    return parts;
  }

  nlohmann::json* descend(nlohmann::json& from, const std::vector<std::string>& path, std::size_t upto) {
    nlohmann::json* cur = &from;
    for (std::size_t p = 0; p < upto; ++p) {
      auto& next = (*cur)[path[p]];
      if (next.is_null()) next = nlohmann::json::object();
      if (next.is_array() && !next.empty() && next.back().is_object()) {
        cur = &next.back();
      } else if (next.is_object()) {
        cur = &next;
      } else {
        fail("key '" + path[p] + "' is not a table");
      }
    }
    return cur;
  }

  nlohmann::json* header(nlohmann::json& root) {
    get();
    const bool array = peek() == '[';
    if (array) get();
    const auto path = dotted_key();
    if (get() != ']' || (array && get() != ']')) fail("malformed table header");
    nlohmann::json* parent = descend(root, path, path.size() - 1);
    auto& slot = (*parent)[path.back()];
    if (array) {
      if (slot.is_null()) slot = nlohmann::json::array();
      if (!slot.is_array()) fail("'" + path.back() + "' is not an array of tables");
      slot.push_back(nlohmann::json::object());
      return &slot.back();
    }
    if (slot.is_null()) slot = nlohmann::json::object();
    if (!slot.is_object()) fail("'" + path.back() + "' redefined");
    return &slot;
  }

  void key_value(nlohmann::json& table) {
    const auto path = dotted_key();
    skip_ws();
    if (get() != '=') fail("expected '='");
    skip_ws();
    nlohmann::json v = value();
    nlohmann::json* parent = descend(table, path, path.size() - 1);
    if (parent->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*parent)[path.back()] = std::move(v);
  }

  std::string string_value() {
    const char quote = get();
    if (peek() == quote && i_ + 1 < s_.size() && s_[i_ + 1] == quote) fail("multi-line strings are not supported");
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == quote) break;
      if (quote == '"' && c == '\\') {
        if (eof()) fail("unterminated escape");
        c = get();
        switch (c) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + c);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  nlohmann::json number_or_bool() {
    std::string tok;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_'))
      tok += get();
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (char c : tok)
      if (c != '_') clean += c;
    if (clean.empty()) fail("expected a value");
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    const char* b = clean.data() + (clean[0] == '+' ? 1 : 0);
    const char* e = clean.data() + clean.size();
    if (is_float) {
      double d = 0;
      const auto [ptr, ec] = std::from_chars(b, e, d);
      if (ec != std::errc() || ptr != e) fail("bad float '" + tok + "'");
      return d;
    }
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) fail("bad value '" + tok + "'");
    return v;
  }

  nlohmann::json value() {
    const char c = peek();
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') {
      get();
      nlohmann::json arr = nlohmann::json::array();
      skip_array_space();
      while (peek() != ']') {
        arr.push_back(value());
        skip_array_space();
        if (peek() == ',') {
          get();
          skip_array_space();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      get();
      return arr;
    }
    if (c == '{') {
      get();
      nlohmann::json obj = nlohmann::json::object();
      skip_ws();
      while (peek() != '}') {
        key_value(obj);
        skip_ws();
        if (peek() == ',') {
          get();
          skip_ws();
        } else if (peek() != '}') {
          fail("expected ',' or '}' in inline table");
        }
      }
      get();
      return obj;
    }
    return number_or_bool();
  }
};

inline nlohmann::json parse(const std::string& text) { return Reader(text).parse(); }

}  // namespace lcslis::toml
