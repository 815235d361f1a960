// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "lcslis/core.hpp"
#include "lcslis/exact.hpp"
#include "lcslis/table.hpp"
#include "lcslis/util.hpp"
#include "lcslis/windows.hpp"

namespace lcslis {

enum class Regime { Cubic, Quadratic, Auto };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Cubic: return "cubic";
    case Regime::Quadratic: return "quadratic";
    case Regime::Auto: return "auto";
  }
  return "?";
}

struct NearbyParams {
  double eta = 0.65;
  double eps_nbs = 1.0;
  double p = 1.0;
  Index radius = 0;
};

// p = min(1, scale·10·ln n·k^{-η/2}/eps_nbs), radius = ⌈k^{η/2}·w_max⌉.
inline NearbyParams make_nearby_params(std::size_t n, std::size_t k, double eta, double eps_nbs, Index w_max,
                                       double scale = 1.0) {
  require(eps_nbs > 0.0, "nearby: eps_nbs must be positive");
  require(eta >= 0.0, "nearby: eta must be non-negative");
  NearbyParams np;
  np.eta = eta;
  np.eps_nbs = eps_nbs;
  const double kk = std::max<double>(1.0, double(k));
  const double ln_n = std::log(std::max<double>(2.0, double(n)));
  np.p = std::min(1.0, scale * 10.0 * ln_n * std::pow(kk, -eta / 2.0) / eps_nbs);
  np.radius = Index(std::ceil(std::pow(kk, eta / 2.0) * double(w_max) - kSlack));
  return np;
}

// When a window pair counts as underestimated: its normalized LCS is at least `ignore_below`
// and the table bound misses the regime's factor of the true LCS.
struct Underestimate {
  Regime regime = Regime::Quadratic;
  double eps = 0.1;
  double ignore_below = 0.0;

  bool operator()(std::size_t bound, std::size_t truth, std::size_t len_i, std::size_t len_j) const {
    if (truth == 0) return false;
    const double nu = normalize_lcs(truth, len_i, len_j);
    if (nu < ignore_below - kSlack) return false;
    double factor;
    if (regime == Regime::Cubic) {
      const double nu_max = double(truth) / double(std::max(len_i, len_j));
      factor = std::pow(nu_max, 4) / 16.0;
    } else {
      factor = (1.0 - eps) * nu * nu * nu;
    }
    return double(bound) < factor * double(truth) - kSlack;
  }
};

// Carries repair centers across calls so repeated sweeps skip work already done.
struct NearbyState {
  std::unordered_set<std::uint64_t> repaired_centers;
};

struct NearbyResult {
  EstimateTable table;
  std::vector<std::size_t> sampled;  // W_A indices
  std::size_t detections = 0;
  std::size_t repairs = 0;
};

// Alg. 7. Table indices follow window_views: W_A first, then W_B. `exact` serves exact LCS per pair.
inline NearbyResult nearby_search(const WindowPair& w, const EstimateTable& m, const NearbyParams& params,
                                  const Underestimate& rule, std::uint64_t seed, OptCache& exact,
                                  Counters* counters = nullptr, NearbyState* state = nullptr, unsigned threads = 1) {
  const std::size_t ka = w.a.size(), kb = w.b.size();
  require(m.k() == ka + kb, "nearby_search: table does not match the window pair");
  NearbyResult res{m, {}, 0, 0};
  Rng rng(seed);
  for (std::size_t i = 0; i < ka; ++i) {
    if (params.p >= 1.0 || uniform01(rng) < params.p) res.sampled.push_back(i);
  }
  bump(counters, &Counters::nearby_sampled, res.sampled.size());

  std::vector<std::vector<std::size_t>> found(res.sampled.size());
  parallel_for(res.sampled.size(), threads, [&](std::size_t s) {
    const std::size_t i = res.sampled[s];
    for (std::size_t jb = 0; jb < kb; ++jb) {
      const std::size_t j = ka + jb;
      const std::size_t truth = exact.get(i, j).size();
      if (rule(m.bound(i, j), truth, w.a[i].length, w.b[jb].length)) found[s].push_back(jb);
    }
  });
  bump(counters, &Counters::window_pairs_touched, res.sampled.size() * kb);

  // B windows sorted by left for range lookups; W_A is a partition, already sorted.
  std::vector<std::size_t> b_order(kb);
  for (std::size_t t = 0; t < kb; ++t) b_order[t] = t;
  std::stable_sort(b_order.begin(), b_order.end(),
                   [&](std::size_t x, std::size_t y) { return w.b[x].left < w.b[y].left; });
  const auto in_range = [&](Index left, Index c) {
    const std::int64_t d = std::int64_t(left) - std::int64_t(c);
    return std::llabs(d) <= std::int64_t(params.radius);
  };

  for (std::size_t s = 0; s < res.sampled.size(); ++s) {
    const std::size_t i = res.sampled[s];
    for (std::size_t jb : found[s]) {
      ++res.detections;
      const std::uint64_t center = (std::uint64_t(i) << 32) | jb;
      if (state && !state->repaired_centers.insert(center).second) continue;
      const Index ci = w.a[i].left, cj = w.b[jb].left;
      const Index lo_j = cj > params.radius ? cj - params.radius : 0;
      auto first = std::lower_bound(b_order.begin(), b_order.end(), lo_j,
                                    [&](std::size_t t, Index v) { return w.b[t].left < v; });
      for (std::size_t ia = 0; ia < ka; ++ia) {
        if (!in_range(w.a[ia].left, ci)) continue;
        for (auto it = first; it != b_order.end() && in_range(w.b[*it].left, cj); ++it) {
          const std::size_t j = ka + *it;
          const Matching& opt = exact.get(ia, j);
          if (opt.size() > res.table.bound(ia, j)) {
            res.table.offer(ia, j, Index(opt.size()), Source::Nearby, 0.0, opt);
            ++res.repairs;
          }
        }
      }
    }
  }
  bump(counters, &Counters::nearby_repairs, res.repairs);
  return res;
}

struct ChainLink {
  std::size_t a_window = 0;  // index into W_A
  std::size_t b_window = 0;  // index into W_B
  std::uint32_t bound = 0;
};

struct WindowDpResult {
  std::size_t value = 0;
  std::vector<ChainLink> chain;
  Matching certificate;  // global (A, B) coordinates
  std::uint64_t cells = 0;
};

// Alg. 6 over sorted distinct right ends of each side. Row/column 0 is the empty-prefix sentinel.
inline WindowDpResult window_dp(const WindowPair& w, const EstimateTable& m, Counters* counters = nullptr) {
  const std::size_t ka = w.a.size(), kb = w.b.size();
  require(m.k() == ka + kb, "window_dp: table does not match the window pair");
  WindowDpResult res;
  std::vector<Index> r1, r2;
  for (const auto& x : w.a.windows) r1.push_back(x.right());
  for (const auto& x : w.b.windows) r2.push_back(x.right());
  std::sort(r1.begin(), r1.end());
  r1.erase(std::unique(r1.begin(), r1.end()), r1.end());
  std::sort(r2.begin(), r2.end());
  r2.erase(std::unique(r2.begin(), r2.end()), r2.end());
  const std::size_t rows = r1.size() + 1, cols = r2.size() + 1;
  // Number of right ends <= v, i.e. the dp row of the longest prefix ending at or before v.
  const auto pos = [](const std::vector<Index>& r, Index v) {
    return std::size_t(std::upper_bound(r.begin(), r.end(), v) - r.begin());
  };

  struct Cand {
    std::size_t prev_x, prev_y, ia, jb;
    std::uint32_t bound;
  };
  std::vector<std::vector<Cand>> at(rows * cols);
  m.for_each([&](std::size_t lo, std::size_t hi, const TableEntry& e) {
    if (e.bound == 0 || lo >= ka || hi < ka) return;
    const std::size_t ia = lo, jb = hi - ka;
    const auto& wa = w.a[ia];
    const auto& wb = w.b[jb];
    const std::size_t x = pos(r1, wa.right()), y = pos(r2, wb.right());
    at[x * cols + y].push_back({pos(r1, wa.left), pos(r2, wb.left), ia, jb, e.bound});
  });
  for (auto& cell : at) {
    std::sort(cell.begin(), cell.end(),
              [](const Cand& p, const Cand& q) { return std::tie(p.ia, p.jb) < std::tie(q.ia, q.jb); });
  }

  std::vector<std::uint64_t> dp(rows * cols, 0);
  // choice: -1 up, -2 left, -3 none, >= 0 candidate slot in at[cell]
  std::vector<std::int32_t> choice(rows * cols, -3);
  for (std::size_t x = 1; x < rows; ++x) {
    for (std::size_t y = 1; y < cols; ++y) {
      const std::size_t c = x * cols + y;
      std::uint64_t best = dp[(x - 1) * cols + y];
      std::int32_t how = -1;
      if (dp[x * cols + y - 1] > best) {
        best = dp[x * cols + y - 1];
        how = -2;
      }
      for (std::size_t s = 0; s < at[c].size(); ++s) {
        const auto& cd = at[c][s];
        ensure(cd.prev_x < x && cd.prev_y < y, "window_dp: window does not end after its start");
        const std::uint64_t v = dp[cd.prev_x * cols + cd.prev_y] + cd.bound;
        if (v > best) {
          best = v;
          how = std::int32_t(s);
        }
      }
      dp[c] = best;
      choice[c] = how;
    }
  }
  res.cells = std::uint64_t(r1.size()) * r2.size();
  bump(counters, &Counters::dp_cells, res.cells);
  res.value = std::size_t(dp[rows * cols - 1]);

  std::size_t x = rows - 1, y = cols - 1;
  while (x > 0 && y > 0) {
    const std::int32_t how = choice[x * cols + y];
    if (how == -1) {
      --x;
    } else if (how == -2) {
      --y;
    } else {
      ensure(how >= 0, "window_dp: missing backtrack choice");
      const auto& cd = at[x * cols + y][std::size_t(how)];
      res.chain.push_back({cd.ia, cd.jb, cd.bound});
      x = cd.prev_x;
      y = cd.prev_y;
    }
  }
  std::reverse(res.chain.begin(), res.chain.end());
  std::size_t total = 0;
  for (const auto& link : res.chain) {
    const auto& wa = w.a[link.a_window];
    const auto& wb = w.b[link.b_window];
    Matching local = truncate(m.certificate(link.a_window, ka + link.b_window), link.bound);
    ensure(local.size() == link.bound, "window_dp: certificate shorter than bound");
    const Matching g = offset(local, wa.left, wb.left);
    res.certificate.pairs.insert(res.certificate.pairs.end(), g.pairs.begin(), g.pairs.end());
    total += link.bound;
  }
  ensure(total == res.value, "window_dp: chain does not add up");
  ensure(is_monotone(res.certificate), "window_dp: chained certificate not monotone");
  return res;
}

}  // namespace lcslis
