// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "lcslis/core.hpp"

namespace lcslis {

// Shared operation counters. Atomic so parallel maps can bump them.
struct Counters {
  std::atomic<std::uint64_t> lcs_exact_calls{0};
  std::atomic<std::uint64_t> lcs_bounded_calls{0};
  std::atomic<std::uint64_t> successor_queries{0};
  std::atomic<std::uint64_t> window_pairs_touched{0};
  std::atomic<std::uint64_t> dp_cells{0};
  std::atomic<std::uint64_t> tuple_checks{0};
  std::atomic<std::uint64_t> cmp_queries{0};
  std::atomic<std::uint64_t> nearby_sampled{0};
  std::atomic<std::uint64_t> nearby_repairs{0};

  std::map<std::string, std::uint64_t> snapshot() const {
    return {{"lcs_exact_calls", lcs_exact_calls.load()},
            {"lcs_bounded_calls", lcs_bounded_calls.load()},
            {"successor_queries", successor_queries.load()},
            {"window_pairs_touched", window_pairs_touched.load()},
            {"dp_cells", dp_cells.load()},
            {"tuple_checks", tuple_checks.load()},
            {"cmp_queries", cmp_queries.load()},
            {"nearby_sampled", nearby_sampled.load()},
            {"nearby_repairs", nearby_repairs.load()}};
  }
};

inline void bump(Counters* c, std::atomic<std::uint64_t> Counters::*field, std::uint64_t by = 1) {
  if (c) (c->*field).fetch_add(by, std::memory_order_relaxed);
}

namespace detail {
inline std::vector<std::uint32_t>& dp_buffer() {
  thread_local std::vector<std::uint32_t> buf;
  return buf;
}
}  // namespace detail

// Exact LCS length in linear space.
inline std::size_t lcs_length(SymbolView x, SymbolView y) {
  if (x.empty() || y.empty()) return 0;
  std::vector<std::uint32_t> prev(y.size() + 1, 0), cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = 0;
    const Symbol c = x[i - 1];
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = (c == y[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

// Canonical maximum matching: full DP, backtrack preferring match, then up, then left.
inline Matching lcs_exact(SymbolView x, SymbolView y) {
  Matching m;
  const std::size_t n = x.size(), w = y.size();
  if (n == 0 || w == 0) return m;
  auto& dp = detail::dp_buffer();
  const std::size_t stride = w + 1;
  dp.assign((n + 1) * stride, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    const Symbol c = x[i - 1];
    std::uint32_t* row = dp.data() + i * stride;
    const std::uint32_t* up = row - stride;
    for (std::size_t j = 1; j <= w; ++j) {
      row[j] = (c == y[j - 1]) ? up[j - 1] + 1 : std::max(up[j], row[j - 1]);
    }
  }
  std::size_t i = n, j = w;
  m.pairs.reserve(dp[n * stride + w]);
  while (i > 0 && j > 0) {
    const std::uint32_t v = dp[i * stride + j];
    if (x[i - 1] == y[j - 1] && v == dp[(i - 1) * stride + (j - 1)] + 1) {
      m.pairs.push_back({Index(i - 1), Index(j - 1)});
      --i;
      --j;
    } else if (dp[(i - 1) * stride + j] == v) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(m.pairs.begin(), m.pairs.end());
  return m;
}

inline Matching lcs_exact(const Sequence& x, const Sequence& y) { return lcs_exact(x.view(), y.view()); }

// Successor index over a fixed sequence y. Positions are 1-based; `none()` = |y|+1.
class CharIndex {
 public:
  explicit CharIndex(SymbolView y) : n_(Index(y.size())) {
    Symbol top = 0;
    for (Symbol c : y) top = std::max(top, c);
    occ_.assign(y.empty() ? 0 : std::size_t(top) + 1, {});
    for (std::size_t p = 0; p < y.size(); ++p) occ_[y[p]].push_back(Index(p + 1));
  }

  Index none() const { return n_ + 1; }
  Index size() const { return n_; }

  // Smallest 1-based position k >= from with y_k == c, else none().
  Index successor(Symbol c, Index from) const {
    if (c >= occ_.size()) return none();
    const auto& list = occ_[c];
    auto it = std::lower_bound(list.begin(), list.end(), from);
    return it == list.end() ? none() : *it;
  }

 private:
  Index n_;
  std::vector<std::vector<Index>> occ_;
};

// Decides lcs(x,y) >= q via the successor-table DP; returns a matching of size exactly q when it holds.
inline std::optional<Matching> lcs_bounded(SymbolView x, SymbolView y, std::int64_t q, const CharIndex& idx,
                                           Counters* counters = nullptr) {
  require(q > 0, "lcs_bounded: q must be positive");
  require(idx.size() == y.size(), "lcs_bounded: index built over a different sequence");
  bump(counters, &Counters::lcs_bounded_calls);
  const std::size_t qq = static_cast<std::size_t>(q);
  if (qq > x.size() || qq > y.size()) return std::nullopt;
  const Index inf = idx.none();
  const std::size_t stride = qq + 1;
  thread_local std::vector<Index> T;
  T.assign(std::min(x.size() + 1, std::size_t(1) + x.size()) * stride, inf);
  T[0] = 0;
  std::uint64_t queries = 0;
  std::size_t hit_row = 0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    Index* row = T.data() + i * stride;
    const Index* up = row - stride;
    row[0] = 0;
    const std::size_t jmax = std::min(i, qq);
    for (std::size_t j = 1; j <= jmax; ++j) {
      Index best = up[j];
      if (up[j - 1] < inf) {
        ++queries;
        best = std::min(best, idx.successor(x[i - 1], up[j - 1] + 1));
      }
      row[j] = best;
    }
    if (row[qq] < inf) {
      hit_row = i;
      break;
    }
  }
  bump(counters, &Counters::successor_queries, queries);
  if (hit_row == 0) return std::nullopt;
  Matching m;
  m.pairs.reserve(qq);
  std::size_t i = hit_row, j = qq;
  while (j > 0) {
    ensure(i > 0, "lcs_bounded: backtrack underflow");
    const Index v = T[i * stride + j];
    if (v == T[(i - 1) * stride + j]) {
      --i;
    } else {
      m.pairs.push_back({Index(i - 1), v - 1});
      --i;
      --j;
    }
  }
  std::reverse(m.pairs.begin(), m.pairs.end());
  return m;
}

inline std::optional<Matching> lcs_bounded(SymbolView x, SymbolView y, std::int64_t q, Counters* counters = nullptr) {
  CharIndex idx(y);
  return lcs_bounded(x, y, q, idx, counters);
}

// Same successor-table DP without a cap: a maximum matching in O(|x|·lcs·log|y|) queries.
inline Matching lcs_successor(SymbolView x, SymbolView y, const CharIndex& idx, Counters* counters = nullptr) {
  require(idx.size() == y.size(), "lcs_successor: index built over a different sequence");
  bump(counters, &Counters::lcs_bounded_calls);
  const Index inf = idx.none();
  // rows[i][j] = smallest 1-based end in y of a length-j common subsequence of x[0..i) and y.
  std::vector<std::vector<Index>> rows(x.size() + 1);
  rows[0] = {0};
  std::uint64_t queries = 0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    const auto& up = rows[i - 1];
    auto& row = rows[i];
    row = up;
    for (std::size_t j = 1; j <= up.size(); ++j) {
      ++queries;
      const Index cand = idx.successor(x[i - 1], up[j - 1] + 1);
      if (cand == inf) continue;
      if (j < row.size()) {
        row[j] = std::min(row[j], cand);
      } else {
        row.push_back(cand);
      }
    }
  }
  bump(counters, &Counters::successor_queries, queries);
  Matching m;
  std::size_t j = rows[x.size()].size() - 1;
  m.pairs.reserve(j);
  for (std::size_t i = x.size(); j > 0; --i) {
    ensure(i > 0, "lcs_successor: backtrack underflow");
    const Index v = rows[i][j];
    if (j < rows[i - 1].size() && rows[i - 1][j] == v) continue;
    m.pairs.push_back({Index(i - 1), v - 1});
    --j;
  }
  std::reverse(m.pairs.begin(), m.pairs.end());
  return m;
}

// Strictly increasing LIS by patience sorting.
template <typename Range>
std::size_t lis_exact(const Range& a) {
  std::vector<std::uint64_t> tails;
  for (auto v : a) {
    auto it = std::lower_bound(tails.begin(), tails.end(), static_cast<std::uint64_t>(v));
    if (it == tails.end()) {
      tails.push_back(static_cast<std::uint64_t>(v));
    } else {
      *it = static_cast<std::uint64_t>(v);
    }
  }
  return tails.size();
}

inline std::size_t lis_exact(const Sequence& a) { return lis_exact(a.symbols); }

// LIS restricted to values in [lo, hi] (closed).
template <typename Range>
std::size_t lis_range(const Range& a, std::uint64_t lo, std::uint64_t hi) {
  require(lo <= hi, "lis_range: lo > hi");
  std::vector<std::uint64_t> tails;
  for (auto v0 : a) {
    const auto v = static_cast<std::uint64_t>(v0);
    if (v < lo || v > hi) continue;
    auto it = std::lower_bound(tails.begin(), tails.end(), v);
    if (it == tails.end()) {
      tails.push_back(v);
    } else {
      *it = v;
    }
  }
  return tails.size();
}

// LCS of the common subsequence carried by opt_ia (read on the w_i side) against w_j.
inline std::size_t lcs_via_witness(const Matching& opt_ia, SymbolView w_i, SymbolView w_j) {
  std::vector<Symbol> proj;
  proj.reserve(opt_ia.size());
  for (const auto& p : opt_ia.pairs) {
    require(p.i < w_i.size(), "lcs_via_witness: matching outside w_i");
    proj.push_back(w_i[p.i]);
  }
  return lcs_length(SymbolView(proj), w_j);
}

// Symmetric cache of canonical matchings keyed by unordered id pair.
// The stored matching is computed as lcs_exact(view(lo), view(hi)); callers get it oriented.
class OptCache {
 public:
  using Fetch = std::function<SymbolView(std::size_t)>;

  OptCache(Fetch fetch, Counters* counters) : fetch_(std::move(fetch)), counters_(counters) {}

  // Matching oriented from window i to window j.
  const Matching& get(std::size_t i, std::size_t j) {
    const bool flipped = i > j;
    const std::uint64_t key = make_key(i, j);
    {
      std::shared_lock lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return flipped ? it->second.backward : it->second.forward;
    }
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    Entry e;
    e.forward = lcs_exact(fetch_(lo), fetch_(hi));
    e.backward = transpose(e.forward);
    std::unique_lock lock(mu_);
    auto [it, inserted] = map_.try_emplace(key, std::move(e));
    if (inserted) bump(counters_, &Counters::lcs_exact_calls);
    return flipped ? it->second.backward : it->second.forward;
  }

  // Lookup only; nullptr when absent.
  const Matching* find(std::size_t i, std::size_t j) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(make_key(i, j));
    if (it == map_.end()) return nullptr;
    return i > j ? &it->second.backward : &it->second.forward;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

 private:
  struct Entry {
    Matching forward;
    Matching backward;
  };
  static std::uint64_t make_key(std::size_t i, std::size_t j) {
    const std::uint64_t lo = std::min(i, j), hi = std::max(i, j);
    return (lo << 32) | hi;
  }
  Fetch fetch_;
  Counters* counters_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::uint64_t, Entry> map_;
};

}  // namespace lcslis
