// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "lcslis/core.hpp"

namespace lcslis {

enum class WindowKind { ConstantLambda, ArbitraryLambda };

struct WindowScheme {
  WindowKind kind = WindowKind::ConstantLambda;
  Index n = 0;
  Index d = 0;
  double eps0 = 0.5;
  int f = 0;
};

struct WindowSet {
  std::vector<Window> windows;
  std::map<int, std::vector<std::size_t>> by_layer;
  Index w_max = 0;
  Index w_min = 0;
  double w_gap = 0.0;
  std::size_t w_layers = 0;

  std::size_t size() const { return windows.size(); }
  const Window& operator[](std::size_t i) const { return windows[i]; }
};

struct WindowPair {
  WindowScheme scheme;
  WindowSet a;
  WindowSet b;
  std::size_t k() const { return a.size() + b.size(); }
};

namespace detail {

inline void finalize(WindowSet& s) {
  s.by_layer.clear();
  s.w_max = 0;
  s.w_min = std::numeric_limits<Index>::max();
  std::set<Index> lengths;
  for (std::size_t t = 0; t < s.windows.size(); ++t) {
    const auto& w = s.windows[t];
    s.by_layer[w.layer].push_back(t);
    s.w_max = std::max(s.w_max, w.length);
    s.w_min = std::min(s.w_min, w.length);
    lengths.insert(w.length);
  }
  if (s.windows.empty()) s.w_min = 0;
  s.w_gap = s.w_min == 0 ? 0.0 : double(s.w_max) / double(s.w_min);
  s.w_layers = lengths.size();
}

// Length-d partition plus a ragged tail window in its own layer.
inline WindowSet partition(Side side, Index n, Index d, int layer, int tail_layer) {
  WindowSet s;
  for (Index left = 0; left + d <= n; left += d) s.windows.push_back({side, left, d, layer, 0});
  const Index covered = (n / d) * d;
  if (covered < n) s.windows.push_back({side, covered, n - covered, tail_layer, 0});
  return s;
}

inline void check_scheme_args(Index n, Index d, double eps0) {
  require(d >= 1, "window width must be positive");
  require(d <= n, "window width exceeds sequence length");
  require(eps0 > 0.0 && eps0 < 1.0, "eps0 must lie in (0,1)");
}

}  // namespace detail

inline int quadratic_layer_bound(double eps0) {
  return int(std::ceil(std::log(1.0 / eps0) / std::log1p(eps0) - kSlack)) + 1;
}

inline int cubic_layer_bound(double eps0) { return int(std::ceil(std::log2(1.0 / eps0) - kSlack)); }

// Shifted windows at geometric lengths d(1+eps0)^i, i in [-f, f]; non-integers floored.
inline WindowPair build_windows_quadratic(Index n, Index d, double eps0) {
  detail::check_scheme_args(n, d, eps0);
  WindowPair out;
  out.scheme = {WindowKind::ConstantLambda, n, d, eps0, quadratic_layer_bound(eps0)};
  const int f = out.scheme.f;
  const int tail_layer = f + 1;
  out.a = detail::partition(Side::A, n, d, 0, tail_layer);

  std::set<std::pair<Index, Index>> seen;
  for (int i = -f; i <= f; ++i) {
    const double di = double(d) * std::pow(1.0 + eps0, i);
    const auto len = static_cast<Index>(std::floor(di + kSlack));
    if (len < 1 || di > double(n) + kSlack) continue;
    const auto shift = std::max<Index>(1, static_cast<Index>(std::floor(eps0 * di + kSlack)));
    const auto shifts = static_cast<Index>(std::floor(double(len) / double(shift) + kSlack));
    const Index rows = n / len;
    for (Index y = 0; y < rows; ++y) {
      for (Index x = 0; x < shifts; ++x) {
        const std::uint64_t left = std::uint64_t(x) * shift + std::uint64_t(y) * len;
        if (left + len > n) continue;
        if (!seen.insert({Index(left), len}).second) continue;
        out.b.windows.push_back({Side::B, Index(left), len, i, i});
      }
    }
  }
  const Index covered = (n / d) * d;
  if (covered < n && seen.insert({covered, n - covered}).second) {
    out.b.windows.push_back({Side::B, covered, n - covered, tail_layer, 0});
  }
  detail::finalize(out.a);
  detail::finalize(out.b);
  return out;
}

// Level 0 partitions both sides; level i >= 1 starts at multiples of d*2^i with lengths d*2^(i-1) + x*d.
inline WindowPair build_windows_cubic(Index n, Index d, double eps0) {
  detail::check_scheme_args(n, d, eps0);
  WindowPair out;
  out.scheme = {WindowKind::ArbitraryLambda, n, d, eps0, cubic_layer_bound(eps0)};
  const int f = out.scheme.f;
  out.a = detail::partition(Side::A, n, d, 0, -1);
  out.b = detail::partition(Side::B, n, d, 0, -1);
  for (auto& w : out.b.windows) w.level = 0;

  std::vector<Window> upper;
  for (int i = 1; i <= f; ++i) {
    const std::uint64_t di = std::uint64_t(d) << i;
    const std::uint64_t half = di / 2;
    const std::uint64_t steps = di / (2 * std::uint64_t(d));
    for (std::uint64_t left = 0; left < n; left += di) {
      for (std::uint64_t x = 1; x <= steps; ++x) {
        const std::uint64_t len = half + x * d;
        if (left + len > n) continue;
        upper.push_back({Side::B, Index(left), Index(len), 0, i});
      }
    }
  }
  // Layer ids group equal lengths; partition windows keep id 0, the tail keeps -1.
  std::map<Index, int> layer_of;
  for (const auto& w : upper) layer_of.emplace(w.length, 0);
  int next = 1;
  for (auto& [len, id] : layer_of) id = (len == d) ? 0 : next++;
  std::set<std::pair<Index, Index>> seen;
  for (const auto& w : out.b.windows) seen.insert({w.left, w.length});
  for (auto w : upper) {
    if (!seen.insert({w.left, w.length}).second) continue;
    w.layer = layer_of[w.length];
    out.b.windows.push_back(w);
  }
  detail::finalize(out.a);
  detail::finalize(out.b);
  return out;
}

inline Sequence reversed(const Sequence& s) {
  Sequence r = s;
  std::reverse(r.symbols.begin(), r.symbols.end());
  return r;
}

// The four role/orientation mappings of the structural lemma for arbitrary lambda.
inline std::array<std::pair<Sequence, Sequence>, 4> mapping_trials(const Sequence& x, const Sequence& y) {
  require(x.size() == y.size(), "mapping_trials: lengths differ");
  return {{{x, y}, {y, x}, {reversed(x), reversed(y)}, {reversed(y), reversed(x)}}};
}

// Maps a matching found on trial t back to (x, y) coordinates.
inline Matching map_trial_matching(int trial, const Matching& m, std::size_t n) {
  Matching out;
  out.pairs.reserve(m.size());
  const auto rev = [n](Index p) { return Index(n - 1 - p); };
  for (const auto& p : m.pairs) {
    switch (trial) {
      case 0: out.pairs.push_back(p); break;
      case 1: out.pairs.push_back({p.j, p.i}); break;
      case 2: out.pairs.push_back({rev(p.i), rev(p.j)}); break;
      case 3: out.pairs.push_back({rev(p.j), rev(p.i)}); break;
      default: throw InputError("map_trial_matching: trial out of range");
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

// Views of W_A followed by W_B over the given sequences; index t < |W_A| is an A window.
inline std::vector<SymbolView> window_views(const WindowPair& w, const Sequence& a, const Sequence& b) {
  std::vector<SymbolView> views;
  views.reserve(w.k());
  for (const auto& win : w.a.windows) views.push_back(a.view().subspan(win.left, win.length));
  for (const auto& win : w.b.windows) views.push_back(b.view().subspan(win.left, win.length));
  return views;
}

}  // namespace lcslis
