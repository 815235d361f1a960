// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <set>

#include "lcslis/exact.hpp"
#include "lcslis/windows.hpp"
#include "oracles.hpp"

using namespace lcslis;

namespace {

std::set<Index> starts_of_length(const WindowSet& s, Index len) {
  std::set<Index> out;
  for (const auto& w : s.windows)
    if (w.length == len) out.insert(w.left);
  return out;
}

void expect_well_formed(const WindowSet& s, Index n) {
  std::map<int, Index> layer_len;
  for (const auto& w : s.windows) {
    EXPECT_GE(w.length, 1u);
    EXPECT_LE(w.right(), n);
    auto [it, fresh] = layer_len.emplace(w.layer, w.length);
    if (!fresh) {
      EXPECT_EQ(it->second, w.length) << "layer " << w.layer;
    }
  }
}

std::vector<oracle::Span> spans(const WindowSet& s) {
  std::vector<oracle::Span> out;
  for (const auto& w : s.windows) out.push_back({w.left, w.length});
  return out;
}

}  // namespace

TEST(WindowsQuadratic, PartitionOnA) {
  const auto w = build_windows_quadratic(64, 8, 0.5);
  ASSERT_EQ(w.a.size(), 8u);
  for (std::size_t t = 0; t < 8; ++t) {
    EXPECT_EQ(w.a[t].left, Index(8 * t));
    EXPECT_EQ(w.a[t].length, 8u);
  }
}

TEST(WindowsQuadratic, LayerCountAndBaseLayerShifts) {
  const auto w = build_windows_quadratic(64, 8, 0.5);
  EXPECT_EQ(w.scheme.f, 3);
  std::set<Index> expect;
  for (Index s = 0; s + 8 <= 64; s += 4) expect.insert(s);
  EXPECT_EQ(starts_of_length(w.b, 8), expect);
}

TEST(WindowsQuadratic, PerLayerCountsBoundedByFormula) {
  const Index n = 64, d = 8;
  const double eps0 = 0.5;
  const auto w = build_windows_quadratic(n, d, eps0);
  std::map<int, std::size_t> count;
  std::map<int, Index> len;
  for (const auto& x : w.b.windows) ++count[x.level], len[x.level] = x.length;
  for (const auto& [lvl, c] : count) {
    const double di = double(d) * std::pow(1.0 + eps0, lvl);
    const double shift = std::max(1.0, std::floor(eps0 * di + 1e-9));
    EXPECT_LE(double(c), double(n) / shift) << "level " << lvl;
  }
  expect_well_formed(w.a, n);
  expect_well_formed(w.b, n);
  Index longest = 0, shortest = n;
  for (const auto& x : w.b.windows) longest = std::max(longest, x.length), shortest = std::min(shortest, x.length);
  EXPECT_EQ(w.b.w_max, longest);
  EXPECT_EQ(w.b.w_min, shortest);
}

TEST(WindowsQuadratic, RaggedTailKept) {
  const auto w = build_windows_quadratic(30, 8, 0.5);
  ASSERT_EQ(w.a.size(), 4u);
  EXPECT_EQ(w.a[3].left, 24u);
  EXPECT_EQ(w.a[3].length, 6u);
  EXPECT_NE(w.a[3].layer, w.a[0].layer);
  expect_well_formed(w.a, 30);
  expect_well_formed(w.b, 30);
}

TEST(WindowsQuadratic, RejectsBadArguments) {
  EXPECT_THROW(build_windows_quadratic(64, 0, 0.5), InputError);
  EXPECT_THROW(build_windows_quadratic(64, 65, 0.5), InputError);
  EXPECT_THROW(build_windows_quadratic(64, 8, 1.0), InputError);
}

TEST(WindowsCubic, EnumeratedLayers) {
  const auto w = build_windows_cubic(64, 8, 0.25);
  EXPECT_EQ(w.scheme.f, 2);
  std::map<int, std::set<std::pair<Index, Index>>> by_level;
  for (const auto& x : w.b.windows) by_level[x.level].insert({x.left, x.length});
  const std::set<std::pair<Index, Index>> l1 = {{0, 16}, {16, 16}, {32, 16}, {48, 16}};
  const std::set<std::pair<Index, Index>> l2 = {{0, 24}, {0, 32}, {32, 24}, {32, 32}};
  EXPECT_EQ(by_level[1], l1);
  EXPECT_EQ(by_level[2], l2);
  EXPECT_EQ(by_level[0].size(), 8u);
  EXPECT_EQ(w.a.size(), 8u);
  EXPECT_LE(w.b.size(), 24u);
  expect_well_formed(w.b, 64);
}

TEST(MappingTrials, FourMappings) {
  const Sequence x({0, 1}, 4), y({2, 3}, 4);
  const auto t = mapping_trials(x, y);
  EXPECT_EQ(t[0].first.symbols, (std::vector<Symbol>{0, 1}));
  EXPECT_EQ(t[0].second.symbols, (std::vector<Symbol>{2, 3}));
  EXPECT_EQ(t[1].first.symbols, (std::vector<Symbol>{2, 3}));
  EXPECT_EQ(t[1].second.symbols, (std::vector<Symbol>{0, 1}));
  EXPECT_EQ(t[2].first.symbols, (std::vector<Symbol>{1, 0}));
  EXPECT_EQ(t[2].second.symbols, (std::vector<Symbol>{3, 2}));
  EXPECT_EQ(t[3].first.symbols, (std::vector<Symbol>{3, 2}));
  EXPECT_EQ(t[3].second.symbols, (std::vector<Symbol>{1, 0}));
}

TEST(MappingTrials, PalindromeAndInvolution) {
  const Sequence p({1, 2, 1}, 3);
  const auto t = mapping_trials(p, p);
  std::set<std::vector<Symbol>> distinct;
  for (const auto& [a, b] : t) distinct.insert(a.symbols), distinct.insert(b.symbols);
  EXPECT_EQ(distinct.size(), 1u);

  const Sequence x({0, 1, 2}, 3), y({2, 2, 0}, 3);
  for (const auto& [a, b] : mapping_trials(x, y)) {
    const auto again = mapping_trials(a, b);
    EXPECT_EQ(again[0].first, a);
    EXPECT_EQ(reversed(reversed(a)), a);
    EXPECT_EQ(again[3].second, reversed(a));
  }
  EXPECT_THROW(mapping_trials(x, Sequence({0}, 1)), InputError);
}

TEST(MappingTrials, MatchingsMapBack) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto xs = oracle::random_symbols(rng, 20, 3), ys = oracle::random_symbols(rng, 20, 3);
    const Sequence x(xs, 3), y(ys, 3);
    const auto trials = mapping_trials(x, y);
    for (int t = 0; t < 4; ++t) {
      const auto m = lcs_exact(trials[t].first, trials[t].second);
      const auto back = map_trial_matching(t, m, 20);
      EXPECT_TRUE(verify_common_subsequence(back, x, y)) << "trial " << t;
      EXPECT_EQ(back.size(), oracle::lcs_table(xs, ys));
    }
  }
}

TEST(WindowCompatible, NeverExceedsLcs) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 8 + Index(rng() % 25), d = 2 + Index(rng() % 7);
    if (d > n) continue;
    const auto xs = oracle::random_symbols(rng, n, 2 + Symbol(rng() % 3));
    const auto ys = oracle::random_symbols(rng, n, 2 + Symbol(rng() % 3));
    for (const auto& w : {build_windows_quadratic(n, d, 0.5), build_windows_cubic(n, d, 0.25)}) {
      const auto best = oracle::best_window_pairing(spans(w.a), spans(w.b), [&](std::size_t a, std::size_t b) {
        const auto& wa = w.a[a];
        const auto& wb = w.b[b];
        return oracle::lcs_table({xs.begin() + wa.left, xs.begin() + wa.right()},
                                 {ys.begin() + wb.left, ys.begin() + wb.right()});
      });
      EXPECT_LE(best, oracle::lcs_table(xs, ys));
    }
  }
}

TEST(WindowCompatible, IdenticalStringsReachFullLengthInQuadraticScheme) {
  std::mt19937_64 rng(4);
  const Index n = 40, d = 6;
  const auto xs = oracle::random_symbols(rng, n, 4);
  const auto w = build_windows_quadratic(n, d, 0.5);
  std::set<std::pair<Index, Index>> b_spans;
  for (const auto& x : w.b.windows) b_spans.insert({x.left, x.length});
  for (const auto& x : w.a.windows) EXPECT_TRUE(b_spans.count({x.left, x.length})) << x.left;
  const auto best = oracle::best_window_pairing(spans(w.a), spans(w.b), [&](std::size_t a, std::size_t b) {
    const auto& wa = w.a[a];
    const auto& wb = w.b[b];
    return oracle::lcs_table({xs.begin() + wa.left, xs.begin() + wa.right()},
                             {xs.begin() + wb.left, xs.begin() + wb.right()});
  });
  EXPECT_EQ(best, n);
}

TEST(WindowViews, OrderAndContent) {
  const Sequence a({0, 1, 2, 3, 0, 1, 2, 3}, 4), b({3, 3, 3, 3, 3, 3, 3, 3}, 4);
  const auto w = build_windows_quadratic(8, 4, 0.5);
  const auto v = window_views(w, a, b);
  ASSERT_EQ(v.size(), w.k());
  EXPECT_EQ(v[0][0], 0u);
  EXPECT_EQ(v[1][3], 3u);
  EXPECT_EQ(v[w.a.size()][0], 3u);
}
