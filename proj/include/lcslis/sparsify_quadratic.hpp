// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lcslis/core.hpp"
#include "lcslis/exact.hpp"
#include "lcslis/table.hpp"
#include "lcslis/util.hpp"

namespace lcslis {

// Restricts which (i, j) pairs a sparsifier examines. split == 0 means all pairs;
// otherwise only pairs straddling the split (one A window, one B window).
struct PairScope {
  std::size_t split = 0;
  bool contains(std::size_t i, std::size_t j) const {
    if (i == j) return false;
    return split == 0 || ((i < split) != (j < split));
  }
};

struct AnchorSample {
  std::vector<std::size_t> anchors;  // sorted, deduplicated
  std::size_t draws = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

struct QuadraticParams {
  double lambda = 0.5;
  double eps = 0.1;
  double gamma = 0.1;
  std::uint64_t seed = 1;
  double anchor_scale = 1.0;  // multiplies the 40 in 40 k^gamma log k
  PairScope scope;
  unsigned threads = 1;
  // Optional ascending grid of levels. When set, one anchor sample serves every level:
  // a pair is flagged if it clears the lowest level, and keeps its best certificate.
  std::vector<double> grid;
};

struct SparsifyResult {
  EstimateTable table;
  AnchorSample sample;
  std::map<std::string, std::uint64_t> counters;
};

inline std::size_t quadratic_anchor_draws(std::size_t k, double gamma, double scale = 1.0) {
  if (k == 0) return 0;
  const double raw = scale * 40.0 * std::pow(double(k), gamma) * std::log(double(k));
  return std::min<std::size_t>(k, std::max<std::size_t>(1, std::size_t(std::ceil(raw - kSlack))));
}

inline AnchorSample sample_anchors(std::size_t k, std::size_t draws, double gamma, std::uint64_t seed) {
  AnchorSample s{{}, draws, gamma, seed};
  if (k == 0) return s;
  Rng rng(seed);
  for (std::size_t t = 0; t < draws; ++t) s.anchors.push_back(uniform_index(rng, k));
  std::sort(s.anchors.begin(), s.anchors.end());
  s.anchors.erase(std::unique(s.anchors.begin(), s.anchors.end()), s.anchors.end());
  return s;
}

inline double tuple_threshold(double eps, double lambda, std::size_t len_i, std::size_t len_j) {
  return (1.0 - eps) * lambda * lambda * lambda * std::sqrt(double(len_i) * double(len_j));
}

struct ConstructiveCheck {
  bool constructive = false;
  Matching chain;
};

inline ConstructiveCheck is_constructive(const Matching& opt_ia, const Matching& opt_ab, const Matching& opt_bj,
                                         std::size_t len_i, std::size_t len_j, double eps, double lambda) {
  ConstructiveCheck out;
  out.chain = intersect_three(opt_ia, opt_ab, opt_bj);
  out.constructive = double(out.chain.size()) >= tuple_threshold(eps, lambda, len_i, len_j) - kSlack;
  return out;
}

// Index-based form; every opt must already sit in the cache.
inline ConstructiveCheck is_constructive(std::size_t i, std::size_t a, std::size_t b, std::size_t j,
                                         const OptCache& opts, const std::vector<SymbolView>& windows, double eps,
                                         double lambda) {
  require(a != b && i != a && i != b && j != a && j != b, "is_constructive: indices must be distinct");
  const Matching* ia = opts.find(i, a);
  const Matching* ab = opts.find(a, b);
  const Matching* bj = opts.find(b, j);
  require(ia && ab && bj, "is_constructive: missing opt matching");
  return is_constructive(*ia, *ab, *bj, windows[i].size(), windows[j].size(), eps, lambda);
}

// Alg. 1 over a fixed window family. Anchors and their exact LCS to every window are computed
// once; `run` may then be called with decreasing thresholds, each call extending one cumulative
// table. A pair that failed a full (a, b) scan remembers its best chain, so a lower threshold
// needs no rescan.
class QuadraticSparsifier {
 public:
  QuadraticSparsifier(const std::vector<SymbolView>& windows, const QuadraticParams& params,
                      OptCache* shared_cache = nullptr, Counters* counters = nullptr)
      : windows_(windows), params_(params), ctr_(counters ? counters : &local_) {
    require(params.eps > 0.0 && params.eps < 1.0, "sparsify_quadratic: eps must lie in (0,1)");
    require(params.gamma > 0.0 && params.gamma < 1.0, "sparsify_quadratic: gamma must lie in (0,1)");
    const std::size_t k = windows_.size();
    for (auto w : windows_) lengths_.push_back(Index(w.size()));
    table_ = EstimateTable(lengths_);
    if (k == 0) return;
    sample_ = sample_anchors(k, quadratic_anchor_draws(k, params.gamma, params.anchor_scale), params.gamma,
                             params.seed);
    if (!shared_cache) own_ = std::make_unique<OptCache>([this](std::size_t t) { return windows_[t]; }, ctr_);
    OptCache& cache = shared_cache ? *shared_cache : *own_;
    const auto& S = sample_.anchors;
    from_.assign(S.size(), std::vector<const Matching*>(k, nullptr));
    to_.assign(S.size(), std::vector<const Matching*>(k, nullptr));
    for (std::size_t s = 0; s < S.size(); ++s) {
      for (std::size_t j = 0; j < k; ++j) {
        if (j == S[s]) continue;
        from_[s][j] = &cache.get(S[s], j);
        to_[s][j] = &cache.get(j, S[s]);
      }
    }
  }

  const AnchorSample& sample() const { return sample_; }
  const EstimateTable& table() const { return table_; }
  Counters& counters() { return *ctr_; }

  // Flags every pair certified at `lambda_low`; entries are labeled with the highest level in
  // `grid` (ascending, may be empty) that their certificate clears.
  const EstimateTable& run(double lambda_low, const std::vector<double>& grid = {}) {
    require(lambda_low > 0.0, "sparsify_quadratic: lambda must be positive");
    const std::size_t k = windows_.size();
    if (k == 0) return table_;
    const auto& S = sample_.anchors;
    const auto label = [&](double have, std::size_t li, std::size_t lj, bool direct) {
      if (grid.empty()) return lambda_low;
      double best = lambda_low;
      for (double g : grid) {
        const double thr = direct ? g : tuple_threshold(params_.eps, g, li, lj);
        if (thr <= have + kSlack) best = std::max(best, g);
      }
      return best;
    };

    for (std::size_t s = 0; s < S.size(); ++s) {
      for (std::size_t j = 0; j < k; ++j) {
        if (j == S[s] || !params_.scope.contains(S[s], j)) continue;
        const Matching& m = *from_[s][j];
        const double norm = normalize_lcs(m.size(), lengths_[S[s]], lengths_[j]);
        if (norm >= lambda_low - kSlack && m.size() > table_.bound(S[s], j)) {
          table_.offer(S[s], j, Index(m.size()), Source::Direct, label(norm, 0, 0, true), m);
        }
      }
    }
    if (grid.empty() && lambda_low >= 1.0) return table_;

    struct Hit {
      std::size_t i, j, size, sa, sb;
    };
    std::vector<std::vector<Hit>> rows(k);
    std::vector<std::vector<std::pair<std::size_t, Exhausted>>> misses(k);
    parallel_for(k, params_.threads, [&](std::size_t i) {
      std::uint64_t checks = 0;
      for (std::size_t j = i + 1; j < k; ++j) {
        if (!params_.scope.contains(i, j)) continue;
        if (table_.source(i, j) == Source::Direct || flagged_.count(key(i, j))) continue;
        const double thr = tuple_threshold(params_.eps, lambda_low, lengths_[i], lengths_[j]) - kSlack;
        auto ex = exhausted_.find(key(i, j));
        if (ex != exhausted_.end()) {
          if (double(ex->second.size) >= thr && ex->second.size > 0) {
            rows[i].push_back({i, j, ex->second.size, ex->second.sa, ex->second.sb});
          }
          continue;
        }
        Exhausted best{0, 0, 0};
        bool found = false;
        for (std::size_t sa = 0; sa < S.size() && !found; ++sa) {
          const std::size_t a = S[sa];
          if (a == i || a == j) continue;
          const Matching& ia = *to_[sa][i];
          if (double(ia.size()) < thr || ia.size() <= best.size) continue;
          for (std::size_t sb = 0; sb < S.size(); ++sb) {
            const std::size_t b = S[sb];
            if (b == a || b == i || b == j) continue;
            const Matching& ab = *from_[sa][b];
            const Matching& bj = *from_[sb][j];
            const std::size_t cap = std::min({ia.size(), ab.size(), bj.size()});
            if (double(cap) < thr || cap <= best.size) continue;
            ++checks;
            const std::size_t got = intersect_three_size(ia, ab, bj);
            if (got > best.size) best = {got, sa, sb};
            if (double(got) >= thr && got > 0) {
              found = true;
              break;
            }
          }
        }
        if (found) {
          rows[i].push_back({i, j, best.size, best.sa, best.sb});
        } else {
          misses[i].push_back({j, best});
        }
      }
      bump(ctr_, &Counters::tuple_checks, checks);
    });

    for (std::size_t i = 0; i < k; ++i) {
      for (auto& [j, ex] : misses[i]) exhausted_[key(i, j)] = ex;
      for (const auto& h : rows[i]) {
        Matching chain = intersect_three(*to_[h.sa][h.i], *from_[h.sa][S[h.sb]], *from_[h.sb][h.j]);
        ensure(chain.size() == h.size, "sparsify_quadratic: chain size drifted");
        exhausted_.erase(key(h.i, h.j));
        flagged_.insert(key(h.i, h.j));
        const double level = label(double(chain.size()), lengths_[h.i], lengths_[h.j], false);
        const auto size = Index(chain.size());
        table_.offer(h.i, h.j, size, Source::Tuple, level, std::move(chain));
      }
    }
    return table_;
  }

 private:
  struct Exhausted {
    std::size_t size, sa, sb;
  };
  static std::uint64_t key(std::size_t i, std::size_t j) { return (std::uint64_t(i) << 32) | j; }

  std::vector<SymbolView> windows_;
  QuadraticParams params_;
  Counters local_;
  Counters* ctr_;
  std::vector<Index> lengths_;
  EstimateTable table_;
  AnchorSample sample_;
  std::unique_ptr<OptCache> own_;
  std::vector<std::vector<const Matching*>> from_, to_;  // from_[s][j]: anchor -> j; to_[s][j]: j -> anchor
  std::unordered_map<std::uint64_t, Exhausted> exhausted_;
  std::unordered_set<std::uint64_t> flagged_;
};

// One-shot Alg. 1 at params.lambda (or at the grid's lowest level when a grid is given).
inline SparsifyResult sparsify_quadratic(const std::vector<SymbolView>& windows, const QuadraticParams& params,
                                         OptCache* shared_cache = nullptr, Counters* counters = nullptr) {
  require(params.lambda > 0.0, "sparsify_quadratic: lambda must be positive");
  QuadraticSparsifier sp(windows, params, shared_cache, counters);
  const double low = params.grid.empty() ? params.lambda : params.grid.front();
  sp.run(low, params.grid);
  return {sp.table(), sp.sample(), sp.counters().snapshot()};
}

struct WellConnectedReport {
  std::size_t well_connected_pairs = 0;
  // constructive[i][j] = number of (a, b) making <i, a, b, j> constructive (i < j filled)
  std::vector<std::vector<std::size_t>> constructive;
};

inline constexpr std::size_t kDiagnosticsMaxWindows = 40;

// Brute-force count of constructive (a, b) per pair. Distinctness follows the chained
// reading i != a != b != j.
inline WellConnectedReport diagnostics_well_connected(const std::vector<SymbolView>& windows, double lambda, double eps,
                                                      double gamma) {
  const std::size_t k = windows.size();
  require(k <= kDiagnosticsMaxWindows, "diagnostics_well_connected: k above test-scale cap");
  std::vector<std::vector<Matching>> opt(k, std::vector<Matching>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      opt[i][j] = lcs_exact(windows[i], windows[j]);
      opt[j][i] = transpose(opt[i][j]);
    }
  }
  WellConnectedReport rep;
  rep.constructive.assign(k, std::vector<std::size_t>(k, 0));
  const double need = std::pow(double(k), 2.0 - gamma);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      std::size_t count = 0;
      for (std::size_t a = 0; a < k; ++a) {
        if (a == i) continue;
        for (std::size_t b = 0; b < k; ++b) {
          if (b == a || b == j) continue;
          if (is_constructive(opt[i][a], opt[a][b], opt[b][j], windows[i].size(), windows[j].size(), eps, lambda)
                  .constructive) {
            ++count;
          }
        }
      }
      rep.constructive[i][j] = count;
      if (double(count) >= need - kSlack) ++rep.well_connected_pairs;
    }
  }
  return rep;
}

}  // namespace lcslis
