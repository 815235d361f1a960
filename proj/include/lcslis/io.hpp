// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lcslis/core.hpp"

namespace lcslis {

enum class InputMode { Text, Numeric };

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), "cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Whitespace-separated non-negative decimal integers.
inline std::vector<Symbol> parse_numeric(const std::string& text, const std::string& origin = "input") {
  std::vector<Symbol> out;
  std::size_t i = 0;
  const auto space = [](char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !space(text[j])) ++j;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, v);
    require(ec == std::errc() && ptr == text.data() + j,
            origin + ": not a non-negative integer: '" + text.substr(i, j - i) + "'");
    require(v < std::uint64_t(std::numeric_limits<Symbol>::max()), origin + ": value too large");
    out.push_back(Symbol(v));
    i = j;
  }
  return out;
}

// Bytes of all texts share one dense code table, ordered by byte value; the alphabet is the distinct-byte count.
inline std::vector<Sequence> encode_texts(const std::vector<std::string>& texts) {
  std::array<bool, 256> seen{};
  for (const auto& t : texts)
    for (unsigned char c : t) seen[c] = true;
  std::array<Symbol, 256> code{};
  Symbol next = 0;
  for (std::size_t c = 0; c < 256; ++c)
    if (seen[c]) code[c] = next++;
  const Symbol alphabet = std::max<Symbol>(1, next);
  std::vector<Sequence> out;
  for (const auto& t : texts) {
    std::vector<Symbol> s;
    s.reserve(t.size());
    for (unsigned char c : t) s.push_back(code[c]);
    out.emplace_back(std::move(s), alphabet);
  }
  return out;
}

// Numeric sequences share an alphabet of max value + 1.
inline std::vector<Sequence> encode_numeric(const std::vector<std::vector<Symbol>>& lists) {
  Symbol top = 0;
  for (const auto& l : lists)
    for (Symbol v : l) top = std::max(top, v);
  std::vector<Sequence> out;
  for (const auto& l : lists) out.emplace_back(l, top + 1);
  return out;
}

inline std::vector<Sequence> load_sequences(const std::vector<std::string>& paths, InputMode mode) {
  if (mode == InputMode::Text) {
    std::vector<std::string> texts;
    for (const auto& p : paths) texts.push_back(read_file(p));
    return encode_texts(texts);
  }
  std::vector<std::vector<Symbol>> lists;
  for (const auto& p : paths) lists.push_back(parse_numeric(read_file(p), p));
  return encode_numeric(lists);
}

inline Sequence load_sequence(const std::string& path, InputMode mode) { return load_sequences({path}, mode).front(); }

inline std::string format_numeric(const std::vector<Symbol>& s) {
  std::string out;
  for (Symbol v : s) {
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

}  // namespace lcslis
