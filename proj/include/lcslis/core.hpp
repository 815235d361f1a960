// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lcslis {

using Symbol = std::uint32_t;
using Index = std::uint32_t;
using SymbolView = std::span<const Symbol>;

// Absolute slack applied to every real-valued threshold comparison.
inline constexpr double kSlack = 1e-9;

// Bad user input (CLI maps this to exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Broken internal invariant (CLI maps this to exit code 3).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void ensure(bool ok, const char* what) {
  if (!ok) throw InternalError(what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

struct Sequence {
  std::vector<Symbol> symbols;
  Symbol alphabet_size = 1;

  Sequence() = default;
  Sequence(std::vector<Symbol> s, Symbol alphabet) : symbols(std::move(s)), alphabet_size(alphabet) {
    require(alphabet_size >= 1, "alphabet_size must be positive");
    for (Symbol c : symbols) require(c < alphabet_size, "symbol outside alphabet");
  }

  // Alphabet inferred as max symbol + 1.
  static Sequence from_symbols(std::vector<Symbol> s) {
    Symbol top = 0;
    for (Symbol c : s) top = std::max(top, c);
    const Symbol alphabet = s.empty() ? 1 : top + 1;
    return Sequence(std::move(s), alphabet);
  }

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  Symbol operator[](std::size_t i) const { return symbols[i]; }
  SymbolView view() const { return SymbolView(symbols.data(), symbols.size()); }
  bool operator==(const Sequence&) const = default;
};

enum class Side : std::uint8_t { A, B };

struct Window {
  Side side = Side::A;
  Index left = 0;
  Index length = 0;
  int layer = 0;  // equal-length group id
  int level = 0;  // construction level i of the scheme
  Index right() const { return left + length; }
  bool operator==(const Window&) const = default;
};

struct IndexPair {
  Index i = 0;
  Index j = 0;
  auto operator<=>(const IndexPair&) const = default;
};

struct Matching {
  std::vector<IndexPair> pairs;
  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  bool operator==(const Matching&) const = default;
};

inline Matching transpose(const Matching& m) {
  Matching out;
  out.pairs.reserve(m.size());
  for (const auto& p : m.pairs) out.pairs.push_back({p.j, p.i});
  return out;
}

inline Matching identity_matching(std::size_t len) {
  Matching m;
  m.pairs.reserve(len);
  for (std::size_t t = 0; t < len; ++t) m.pairs.push_back({Index(t), Index(t)});
  return m;
}

inline Matching offset(const Matching& m, Index di, Index dj) {
  Matching out;
  out.pairs.reserve(m.size());
  for (const auto& p : m.pairs) out.pairs.push_back({p.i + di, p.j + dj});
  return out;
}

inline double normalize_lcs(std::size_t matched, std::size_t len_x, std::size_t len_y) {
  require(len_x >= 1 && len_y >= 1, "normalize_lcs: lengths must be positive");
  return static_cast<double>(matched) / std::sqrt(static_cast<double>(len_x) * static_cast<double>(len_y));
}

inline double normalize_lcs(const Matching& m, std::size_t len_x, std::size_t len_y) {
  return normalize_lcs(m.size(), len_x, len_y);
}

inline double ed_lcs_duality(std::size_t n, std::size_t lcs_len) {
  require(n >= 1, "ed_lcs_duality: n must be positive");
  require(lcs_len <= n, "ed_lcs_duality: lcs_len exceeds n");
  return 1.0 - static_cast<double>(lcs_len) / static_cast<double>(n);
}

inline bool is_monotone(const Matching& m) {
  for (std::size_t t = 1; t < m.size(); ++t) {
    if (!(m.pairs[t - 1].i < m.pairs[t].i && m.pairs[t - 1].j < m.pairs[t].j)) return false;
  }
  return true;
}

inline bool verify_common_subsequence(const Matching& m, SymbolView x, SymbolView y) {
  if (!is_monotone(m)) return false;
  for (const auto& p : m.pairs) {
    if (p.i >= x.size() || p.j >= y.size()) return false;
    if (x[p.i] != y[p.j]) return false;
  }
  return true;
}

inline bool verify_common_subsequence(const Matching& m, const Sequence& x, const Sequence& y) {
  return verify_common_subsequence(m, x.view(), y.view());
}

namespace detail {
// Join two monotone matchings on the shared middle coordinate (m1.j == m2.i).
inline Matching compose(const Matching& m1, const Matching& m2) {
  Matching out;
  std::size_t p = 0, q = 0;
  while (p < m1.size() && q < m2.size()) {
    Index mid1 = m1.pairs[p].j, mid2 = m2.pairs[q].i;
    if (mid1 < mid2) {
      ++p;
    } else if (mid2 < mid1) {
      ++q;
    } else {
      out.pairs.push_back({m1.pairs[p].i, m2.pairs[q].j});
      ++p;
      ++q;
    }
  }
  return out;
}

inline std::size_t compose3_size(const Matching& m1, const Matching& m2, const Matching& m3) {
  std::size_t count = 0, p = 0, q = 0, r = 0;
  while (p < m1.size() && q < m2.size()) {
    Index mid1 = m1.pairs[p].j, mid2 = m2.pairs[q].i;
    if (mid1 < mid2) {
      ++p;
    } else if (mid2 < mid1) {
      ++q;
    } else {
      Index x2 = m2.pairs[q].j;
      while (r < m3.size() && m3.pairs[r].i < x2) ++r;
      if (r == m3.size()) break;
      if (m3.pairs[r].i == x2) {
        ++count;
        ++r;
      }
      ++p;
      ++q;
    }
  }
  return count;
}

inline Index max_left(const Matching& m) { return m.empty() ? 0 : m.pairs.back().i + 1; }
inline Index max_right(const Matching& m) { return m.empty() ? 0 : m.pairs.back().j + 1; }
}  // namespace detail

// Chains (x,y') in m_ia, (y',x') in m_ab, (x',y) in m_bj into {(x,y)}.
// len_a / len_b are the lengths of the two middle sequences.
inline Matching intersect_three(const Matching& m_ia, const Matching& m_ab, const Matching& m_bj, std::size_t len_a,
                                std::size_t len_b) {
  require(is_monotone(m_ia) && is_monotone(m_ab) && is_monotone(m_bj), "intersect_three: non-monotone input");
  require(detail::max_right(m_ia) <= len_a && detail::max_left(m_ab) <= len_a,
          "intersect_three: first middle dimension mismatch");
  require(detail::max_right(m_ab) <= len_b && detail::max_left(m_bj) <= len_b,
          "intersect_three: second middle dimension mismatch");
  return detail::compose(detail::compose(m_ia, m_ab), m_bj);
}

// Same chain without dimension checks; used on hot paths where the caller owns the shapes.
inline Matching intersect_three(const Matching& m_ia, const Matching& m_ab, const Matching& m_bj) {
  return detail::compose(detail::compose(m_ia, m_ab), m_bj);
}

inline std::size_t intersect_three_size(const Matching& m_ia, const Matching& m_ab, const Matching& m_bj) {
  return detail::compose3_size(m_ia, m_ab, m_bj);
}

// Keeps the first `count` pairs (still a valid common subsequence).
inline Matching truncate(const Matching& m, std::size_t count) {
  Matching out;
  out.pairs.assign(m.pairs.begin(), m.pairs.begin() + std::min(count, m.size()));
  return out;
}

}  // namespace lcslis
