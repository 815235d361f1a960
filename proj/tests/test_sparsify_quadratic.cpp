// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "lcslis/sparsify_quadratic.hpp"
#include "oracles.hpp"

using namespace lcslis;

namespace {

std::vector<SymbolView> views(const std::vector<std::vector<Symbol>>& ws) {
  std::vector<SymbolView> out;
  for (const auto& w : ws) out.emplace_back(w);
  return out;
}

// Copies of one base string, each with a few point mutations.
std::vector<std::vector<Symbol>> mutated_family(std::mt19937_64& rng, std::size_t k, std::size_t len, Symbol sigma,
                                                double rate) {
  const auto base = oracle::random_symbols(rng, len, sigma);
  std::vector<std::vector<Symbol>> out;
  std::bernoulli_distribution flip(rate);
  for (std::size_t t = 0; t < k; ++t) {
    auto w = base;
    for (auto& c : w)
      if (flip(rng)) c = Symbol(rng() % sigma);
    out.push_back(std::move(w));
  }
  return out;
}

// Mixed lengths and alphabets, some related to a shared base.
std::vector<std::vector<Symbol>> mixed_family(std::mt19937_64& rng, std::size_t k) {
  const auto base = oracle::random_symbols(rng, 24, 3);
  std::vector<std::vector<Symbol>> out;
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t len = 8 + rng() % 17;
    if (rng() % 2) {
      const std::size_t off = rng() % (base.size() - std::min(len, base.size()) + 1);
      std::vector<Symbol> w(base.begin() + off, base.begin() + off + std::min(len, base.size()));
      for (auto& c : w)
        if (rng() % 8 == 0) c = Symbol(rng() % 3);
      out.push_back(std::move(w));
    } else {
      out.push_back(oracle::random_symbols(rng, len, 2 + Symbol(rng() % 3)));
    }
  }
  return out;
}

void expect_sound(const EstimateTable& t, const std::vector<SymbolView>& ws, double eps) {
  t.for_each([&](std::size_t i, std::size_t j, const TableEntry& e) {
    EXPECT_TRUE(verify_common_subsequence(e.certificate, ws[i], ws[j])) << i << "," << j;
    EXPECT_GE(e.certificate.size(), e.bound);
    const double li = double(ws[i].size()), lj = double(ws[j].size());
    if (e.source == Source::Direct) {
      EXPECT_GE(normalize_lcs(e.bound, ws[i].size(), ws[j].size()), e.lambda_level - 1e-9);
    } else {
      ASSERT_EQ(e.source, Source::Tuple);
      EXPECT_GE(double(e.bound), (1.0 - eps) * std::pow(e.lambda_level, 3) * std::sqrt(li * lj) - 1e-9);
    }
    EXPECT_EQ(t.certificate(j, i), transpose(t.certificate(i, j)));
  });
}

}  // namespace

TEST(QuadraticAnchors, DrawCountFormula) {
  EXPECT_EQ(quadratic_anchor_draws(0, 0.1), 0u);
  EXPECT_EQ(quadratic_anchor_draws(100, 0.1), 100u);
  const double raw = 40.0 * std::pow(1e6, 0.1) * std::log(1e6);
  EXPECT_EQ(quadratic_anchor_draws(1000000, 0.1), std::size_t(std::ceil(raw)));
  EXPECT_EQ(quadratic_anchor_draws(1000, 0.1), std::size_t(std::ceil(40.0 * std::pow(1e3, 0.1) * std::log(1e3))));
  const auto s = sample_anchors(50, 30, 0.1, 9);
  EXPECT_TRUE(std::is_sorted(s.anchors.begin(), s.anchors.end()));
  EXPECT_EQ(std::adjacent_find(s.anchors.begin(), s.anchors.end()), s.anchors.end());
  EXPECT_LE(s.anchors.size(), 30u);
  EXPECT_EQ(sample_anchors(50, 30, 0.1, 9).anchors, s.anchors);
}

TEST(QuadraticSparsify, IdenticalWindowsGetDirectBounds) {
  std::mt19937_64 rng(1);
  const auto base = oracle::random_symbols(rng, 10, 4);
  std::vector<std::vector<Symbol>> ws(12, base);
  const auto v = views(ws);
  QuadraticParams p;
  p.lambda = 0.5;
  const auto res = sparsify_quadratic(v, p);
  for (std::size_t a : res.sample.anchors)
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j == a) continue;
      EXPECT_EQ(res.table.bound(a, j), 10u);
      EXPECT_EQ(res.table.source(a, j), Source::Direct);
    }
}

TEST(QuadraticSparsify, TupleThresholdForHalfSimilarWindows) {
  EXPECT_NEAR(tuple_threshold(0.1, 0.5, 8, 8), 0.9 * 0.125 * 8.0, 1e-12);
  EXPECT_NEAR(tuple_threshold(0.0, 0.5, 8, 8), 1.0, 1e-12);
}

TEST(QuadraticSparsify, DisjointAlphabetsGiveEmptyTable) {
  std::vector<std::vector<Symbol>> ws;
  for (Symbol c = 0; c < 10; ++c) ws.push_back(std::vector<Symbol>(6, c));
  QuadraticParams p;
  const auto res = sparsify_quadratic(views(ws), p);
  EXPECT_EQ(res.table.stored(), 0u);
  EXPECT_EQ(res.table.bound(3, 3), 6u);
}

TEST(QuadraticSparsify, RejectsBadParameters) {
  std::vector<std::vector<Symbol>> ws(3, std::vector<Symbol>{0, 1});
  QuadraticParams p;
  p.eps = 0.0;
  EXPECT_THROW(sparsify_quadratic(views(ws), p), InputError);
  p.eps = 0.1;
  p.gamma = 1.0;
  EXPECT_THROW(sparsify_quadratic(views(ws), p), InputError);
}

TEST(IsConstructive, Examples) {
  const auto id = identity_matching(8);
  EXPECT_TRUE(is_constructive(id, id, id, 8, 8, 0.1, 1.0).constructive);
  EXPECT_FALSE(is_constructive(id, Matching{}, id, 8, 8, 0.1, 0.5).constructive);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<Symbol>> w;
    for (int t = 0; t < 4; ++t) w.push_back(oracle::random_symbols(rng, 8, 4));
    const auto ia = lcs_exact(SymbolView(w[0]), SymbolView(w[1]));
    const auto ab = lcs_exact(SymbolView(w[1]), SymbolView(w[2]));
    const auto bj = lcs_exact(SymbolView(w[2]), SymbolView(w[3]));
    const auto c = is_constructive(ia, ab, bj, 8, 8, 0.1, 0.5);
    EXPECT_EQ(c.constructive, c.chain.size() >= 1);
    EXPECT_TRUE(verify_common_subsequence(c.chain, SymbolView(w[0]), SymbolView(w[3])));
  }
}

TEST(IsConstructive, IndexFormNeedsCachedOpts) {
  std::vector<std::vector<Symbol>> ws(4, std::vector<Symbol>{0, 1, 2, 3});
  const auto v = views(ws);
  OptCache cache([&](std::size_t t) { return v[t]; }, nullptr);
  EXPECT_THROW(is_constructive(0, 1, 2, 3, cache, v, 0.1, 0.5), InputError);
  cache.get(0, 1), cache.get(1, 2), cache.get(2, 3);
  EXPECT_TRUE(is_constructive(0, 1, 2, 3, cache, v, 0.1, 0.5).constructive);
  EXPECT_THROW(is_constructive(0, 1, 1, 3, cache, v, 0.1, 0.5), InputError);
}

TEST(QuadraticSparsify, SoundOnMixedFamilies) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto ws = mixed_family(rng, 20);
    const auto v = views(ws);
    QuadraticParams p;
    p.lambda = 0.5;
    p.eps = 0.2;
    p.anchor_scale = 0.1;
    p.seed = seed;
    expect_sound(sparsify_quadratic(v, p).table, v, p.eps);
  }
}

TEST(QuadraticSparsify, WorkAccounting) {
  std::mt19937_64 rng(3);
  const auto ws = mixed_family(rng, 30);
  const auto v = views(ws);
  QuadraticParams p;
  p.anchor_scale = 0.05;
  p.seed = 4;
  const auto res = sparsify_quadratic(v, p);
  EXPECT_LE(res.counters.at("lcs_exact_calls"), res.sample.anchors.size() * v.size());
}

TEST(QuadraticSparsify, DetectsHeavyPairsOnWellConnectedFamily) {
  std::size_t heavy = 0, missed = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    const auto ws = mutated_family(rng, 24, 16, 4, 0.05);
    const auto v = views(ws);
    QuadraticParams p;
    p.lambda = 0.6;
    p.eps = 0.1;
    p.anchor_scale = 0.05;
    p.seed = seed;
    const auto res = sparsify_quadratic(v, p);
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        if (normalize_lcs(lcs_length(v[i], v[j]), v[i].size(), v[j].size()) < p.lambda) continue;
        ++heavy;
        missed += !res.table.has(i, j);
      }
  }
  ASSERT_GT(heavy, 0u);
  EXPECT_LE(double(missed), 0.05 * double(heavy)) << missed << " of " << heavy;
}

TEST(QuadraticSparsify, GridLabelsAndIncrementalRuns) {
  std::mt19937_64 rng(8);
  const auto ws = mutated_family(rng, 16, 12, 3, 0.15);
  const auto v = views(ws);
  QuadraticParams p;
  p.anchor_scale = 0.1;
  p.seed = 2;
  p.grid = {0.3, 0.5, 0.8};
  const auto res = sparsify_quadratic(v, p);
  expect_sound(res.table, v, p.eps);
  QuadraticSparsifier sp(v, p);
  sp.run(0.8);
  const std::size_t before = sp.table().stored();
  sp.run(0.3);
  EXPECT_GE(sp.table().stored(), before);
  expect_sound(sp.table(), v, p.eps);
}

TEST(WellConnected, IdenticalWindows) {
  std::vector<std::vector<Symbol>> ws(6, std::vector<Symbol>{0, 1, 2, 0, 1, 2});
  const auto rep = diagnostics_well_connected(views(ws), 0.5, 0.1, 0.5);
  EXPECT_EQ(rep.well_connected_pairs, 15u);
}

TEST(WellConnected, DisjointAlphabets) {
  std::vector<std::vector<Symbol>> ws;
  for (Symbol c = 0; c < 6; ++c) ws.push_back(std::vector<Symbol>(5, c));
  EXPECT_EQ(diagnostics_well_connected(views(ws), 0.5, 0.1, 0.5).well_connected_pairs, 0u);
}

TEST(WellConnected, MatchesIndependentCount) {
  std::mt19937_64 rng(12);
  const auto ws = mixed_family(rng, 9);
  const auto v = views(ws);
  const double lambda = 0.45, eps = 0.1, gamma = 0.5;
  const auto rep = diagnostics_well_connected(v, lambda, eps, gamma);
  const std::size_t k = v.size();
  // One fixed matching per unordered pair, computed lo to hi.
  auto opt = [&](std::size_t x, std::size_t y) {
    return x <= y ? lcs_exact(v[x], v[y]) : transpose(lcs_exact(v[y], v[x]));
  };
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      std::size_t count = 0;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
          if (a == i || b == a || b == j) continue;
          // Chain by explicit relation join on the exact matchings.
          const auto ia = opt(i, a), ab = opt(a, b), bj = opt(b, j);
          std::size_t size = 0;
          for (const auto& p : ia.pairs)
            for (const auto& q : ab.pairs)
              if (q.i == p.j)
                for (const auto& r : bj.pairs) size += r.i == q.j;
          if (double(size) >= (1 - eps) * std::pow(lambda, 3) * std::sqrt(double(v[i].size() * v[j].size())) - 1e-9)
            ++count;
        }
      EXPECT_EQ(rep.constructive[i][j], count) << i << "," << j;
      if (double(count) >= std::pow(double(k), 2 - gamma) - 1e-9) ++pairs;
    }
  EXPECT_EQ(rep.well_connected_pairs, pairs);
}

TEST(WellConnected, RefusesLargeFamilies) {
  std::vector<std::vector<Symbol>> ws(41, std::vector<Symbol>{0});
  EXPECT_THROW(diagnostics_well_connected(views(ws), 0.5, 0.1, 0.5), InputError);
}
