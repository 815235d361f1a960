// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <array>
#include <functional>
#include <mutex>
#include <unordered_map>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "lcslis/core.hpp"
#include "lcslis/exact.hpp"
#include "lcslis/sparsify_quadratic.hpp"
#include "lcslis/table.hpp"
#include "lcslis/util.hpp"

namespace lcslis {

// Appends `target - |w|` copies of `dummy` to w. Dummies must be codes no other window uses.
inline std::vector<Symbol> pad_window(SymbolView w, std::size_t target, Symbol dummy) {
  require(target >= w.size(), "pad_window: target shorter than window");
  std::vector<Symbol> out(w.begin(), w.end());
  out.resize(target, dummy);
  return out;
}

namespace detail {
// Repeatedly extracts a full residual LCS of `anchor` with `member`, anchor -> member coordinates.
// Sizes are non-increasing, so the layers for any threshold q form a prefix of this chain.
struct LayerChain {
  std::vector<Matching> layers;
  std::vector<Symbol> rest;
  std::vector<Index> origin;
  std::size_t last_failed = 0;  // size of the residual LCS that ended extraction (0 = exhausted)
  bool started = false;
  bool done = false;

  void extend_to(SymbolView anchor, SymbolView member, std::size_t q, Counters* counters) {
    if (!started) {
      rest.assign(anchor.begin(), anchor.end());
      origin.resize(anchor.size());
      for (std::size_t p = 0; p < origin.size(); ++p) origin[p] = Index(p);
      started = true;
    }
    if (done || (last_failed > 0 && last_failed < q)) return;
    CharIndex idx(member);
    if (last_failed > 0) {  // resume: the stored residual LCS now qualifies
      last_failed = 0;
    }
    while (!rest.empty()) {
      Matching got = lcs_successor(SymbolView(rest), member, idx, counters);
      if (got.empty()) break;
      if (got.size() < q) {
        last_failed = got.size();
        return;
      }
      Matching layer;
      layer.pairs.reserve(got.size());
      for (const auto& p : got.pairs) layer.pairs.push_back({origin[p.i], p.j});
      layers.push_back(std::move(layer));
      std::size_t w = 0, next = 0;
      for (std::size_t p = 0; p < rest.size(); ++p) {
        if (next < got.size() && got.pairs[next].i == p) {
          ++next;
          continue;
        }
        rest[w] = rest[p];
        origin[w] = origin[p];
        ++w;
      }
      rest.resize(w);
      origin.resize(w);
    }
    done = true;
  }
};
}  // namespace detail

// Shares extraction chains across lcs-cmp instances (e.g. across λ levels) keyed by window ids.
class LayerCache {
 public:
  std::vector<Matching> layers(std::size_t anchor_id, std::size_t member_id, SymbolView anchor, SymbolView member,
                               std::size_t q, Counters* counters) {
    detail::LayerChain* chain;
    {
      std::lock_guard lock(mu_);
      chain = &chains_[(std::uint64_t(anchor_id) << 32) | member_id];
    }
    std::lock_guard lock(*chain_mutex(anchor_id, member_id));
    chain->extend_to(anchor, member, q, counters);
    std::vector<Matching> out;
    for (const auto& l : chain->layers) {
      if (l.size() < q) break;
      out.push_back(l);
    }
    return out;
  }

 private:
  std::mutex* chain_mutex(std::size_t a, std::size_t m) {
    return &stripes_[((a * 1315423911u) ^ m) % stripes_.size()];
  }
  std::mutex mu_;
  std::array<std::mutex, 64> stripes_;
  std::unordered_map<std::uint64_t, detail::LayerChain> chains_;
};

struct CmpAnswer {
  bool accept = false;
  std::size_t overlap = 0;  // |opt_{a,i} ∩ Y_{a,j}| on the anchor side
  int layer = -1;           // layer used for the certificate
  Matching certificate;     // i -> j, only on accept
};

// Comparison structure around one anchor window. Windows are given unpadded; `anchor_length`
// is the common padded length. Padding symbols never match, so they are not materialized.
class LcsCmp {
 public:
  using OptFn = std::function<Matching(std::size_t)>;  // opt anchor -> member t
  using LayerFn = std::function<std::vector<Matching>(std::size_t, std::size_t)>;  // (member t, q) -> Y

  LcsCmp(SymbolView anchor, std::size_t anchor_length, std::vector<SymbolView> members, double lambda_tilde,
         Counters* counters = nullptr, OptFn opt_fn = nullptr, LayerFn layer_fn = nullptr)
      : anchor_(anchor), anchor_len_(anchor_length), members_(std::move(members)), lt_(lambda_tilde),
        counters_(counters), layer_fn_(std::move(layer_fn)) {
    require(lt_ > 0.0 && lt_ <= 1.0, "LcsCmp: lambda_tilde must lie in (0,1]");
    require(anchor_len_ >= anchor_.size(), "LcsCmp: anchor_length below anchor size");
    for (auto m : members_) require(m.size() <= anchor_len_, "LcsCmp: member longer than padded length");
    opts_.resize(members_.size());
    for (std::size_t t = 0; t < members_.size(); ++t) {
      if (opt_fn) {
        opts_[t] = opt_fn(t);
      } else {
        opts_[t] = lcs_exact(anchor_, members_[t]);
        bump(counters_, &Counters::lcs_exact_calls);
      }
    }
    layers_.resize(members_.size());
    built_.assign(members_.size(), false);
  }

  std::size_t size() const { return members_.size(); }
  double lambda_tilde() const { return lt_; }
  std::size_t anchor_length() const { return anchor_len_; }
  const Matching& opt(std::size_t t) const { return opts_.at(t); }

  // Layer threshold ⌈λ̃|w_a|/2⌉; each layer is a full residual LCS at least this long.
  std::size_t quota() const { return quota_for(lt_); }
  std::size_t quota_for(double lt) const {
    return std::max<std::size_t>(1, std::size_t(std::ceil(lt * double(anchor_len_) / 2.0 - kSlack)));
  }

  // Builds Y for member t (idempotent).
  void build_layers(std::size_t t) {
    if (built_.at(t)) return;
    built_[t] = true;
    const std::size_t q = quota();
    if (opts_[t].size() < q) return;  // no residual LCS can reach the threshold
    if (layer_fn_) {
      layers_[t] = layer_fn_(t, q);
      return;
    }
    detail::LayerChain chain;
    chain.extend_to(anchor_, members_[t], q, counters_);
    for (auto& l : chain.layers) {
      if (l.size() < q) break;
      layers_[t].push_back(std::move(l));
    }
  }

  void build_all() {
    for (std::size_t t = 0; t < size(); ++t) build_layers(t);
  }

  // Y_{a,t}: disjoint anchor-side common subsequences with member t, anchor -> member.
  const std::vector<Matching>& layers(std::size_t t) const {
    ensure(built_.at(t), "LcsCmp: layers requested before build");
    return layers_[t];
  }

  // Per-thread scratch holding the i-side partner of each anchor position.
  struct Marks {
    std::vector<Index> partner;
    std::size_t member = SIZE_MAX;
  };

  void mark(std::size_t i, Marks& m) const {
    m.partner.assign(anchor_.size(), kUnmarked);
    for (const auto& p : opts_.at(i).pairs) m.partner[p.i] = p.j;
    m.member = i;
  }

  // Query at the construction threshold.
  CmpAnswer query(const Marks& m, std::size_t j) const { return query_at(m, j, lt_); }

  // Query at a threshold lt >= the construction one; uses the prefix of Y whose layers reach
  // ⌈lt·|w_a|/2⌉, which is exactly the Y a structure built at lt would hold.
  CmpAnswer query_at(const Marks& m, std::size_t j, double lt) const {
    ensure(m.member < size(), "LcsCmp: query without marks");
    require(lt >= lt_ - kSlack, "LcsCmp: query threshold below construction threshold");
    const auto& ys = layers(j);
    bump(counters_, &Counters::cmp_queries);
    const std::size_t q = quota_for(lt);
    std::size_t used = 0;
    while (used < ys.size() && ys[used].size() >= q) ++used;
    CmpAnswer ans;
    const auto hits = [&](const Matching& layer) {
      std::size_t c = 0;
      for (const auto& p : layer.pairs) c += m.partner[p.i] != kUnmarked;
      return c;
    };
    for (std::size_t l = 0; l < used; ++l) ans.overlap += hits(ys[l]);
    ans.accept = double(ans.overlap) > lt * double(anchor_len_) / 2.0 + kSlack;
    if (!ans.accept) return ans;
    const double need = lt * lt * double(anchor_len_) / 4.0 - kSlack;
    for (std::size_t l = 0; l < used; ++l) {
      if (double(hits(ys[l])) >= need) {
        ans.layer = int(l);
        break;
      }
    }
    ensure(ans.layer >= 0, "LcsCmp: pigeonhole layer missing");
    for (const auto& p : ys[std::size_t(ans.layer)].pairs) {
      if (m.partner[p.i] != kUnmarked) ans.certificate.pairs.push_back({m.partner[p.i], p.j});
    }
    return ans;
  }

  // Accepting levels for one (i, j) in a single scan of Y. lts ascending and >= lt_.
  // Returns the index of the level whose certificate is largest, or -1.
  int best_level(const Marks& m, std::size_t j, const std::vector<double>& lts, std::vector<std::size_t>& scratch) const {
    const auto& ys = layers(j);
    bump(counters_, &Counters::cmp_queries, lts.size());
    scratch.assign(ys.size(), 0);
    for (std::size_t l = 0; l < ys.size(); ++l)
      for (const auto& p : ys[l].pairs) scratch[l] += m.partner[p.i] != kUnmarked;
    int best = -1;
    std::size_t best_size = 0;
    for (std::size_t v = 0; v < lts.size(); ++v) {
      const double lt = lts[v];
      const std::size_t q = quota_for(lt);
      std::size_t overlap = 0, used = 0;
      while (used < ys.size() && ys[used].size() >= q) overlap += scratch[used++];
      if (!(double(overlap) > lt * double(anchor_len_) / 2.0 + kSlack)) continue;
      const double need = lt * lt * double(anchor_len_) / 4.0 - kSlack;
      for (std::size_t l = 0; l < used; ++l) {
        if (double(scratch[l]) >= need) {
          if (scratch[l] > best_size) best = int(v), best_size = scratch[l];
          break;
        }
      }
    }
    return best;
  }

  CmpAnswer query(std::size_t i, std::size_t j) {
    build_layers(j);
    Marks m;
    mark(i, m);
    return query(m, j);
  }

 private:
  static constexpr Index kUnmarked = std::numeric_limits<Index>::max();
  SymbolView anchor_;
  std::size_t anchor_len_;
  std::vector<SymbolView> members_;
  double lt_;
  Counters* counters_;
  LayerFn layer_fn_;
  std::vector<Matching> opts_;
  std::vector<std::vector<Matching>> layers_;
  std::vector<bool> built_;
};

inline LcsCmp lcscmp_initial(SymbolView anchor, const std::vector<SymbolView>& members, double lambda_tilde,
                             Counters* counters = nullptr) {
  std::size_t len = anchor.size();
  for (auto m : members) len = std::max(len, m.size());
  LcsCmp d(anchor, len, members, lambda_tilde, counters);
  d.build_all();
  return d;
}

inline CmpAnswer lcscmp_query(LcsCmp& d, std::size_t i, std::size_t j) { return d.query(i, j); }

struct CubicParams {
  double lambda = 0.5;
  double gamma = 2.0 / 3.0;
  std::uint64_t seed = 1;
  double round_scale = 1.0;  // multiplies the 10 in 10 k^gamma log k
  PairScope scope;
  unsigned threads = 1;
  // Optional ascending λ levels evaluated in one pass with shared anchors; each pair keeps the
  // level giving the largest certificate. Empty means {lambda}.
  std::vector<double> grid;
};

inline std::size_t cubic_rounds(std::size_t k, double gamma, double scale = 1.0) {
  if (k <= 1) return 1;
  const double raw = scale * 10.0 * std::pow(double(k), gamma) * std::log(double(k));
  return std::max<std::size_t>(1, std::size_t(std::ceil(raw - kSlack)));
}

// Guaranteed certificate size for an accepted pair: λ⁴·(padded length)/16.
inline double cubic_accept_bound(double lambda, std::size_t padded_length) {
  return std::pow(lambda, 4) * double(padded_length) / 16.0;
}

struct CubicRunInfo {
  std::vector<std::size_t> members;  // window ids
  std::size_t padded_length = 0;
  std::size_t rounds = 0;
  std::vector<std::size_t> anchors;  // deduplicated window ids
};

struct CubicResult {
  EstimateTable table;
  std::vector<CubicRunInfo> runs;
  std::map<std::string, std::uint64_t> counters;
};

// Size-class partitioned Alg. 2: one sub-run per window length and one per pair of lengths,
// each padding members to the longest length in the run.
inline CubicResult sparsify_cubic(const std::vector<SymbolView>& windows, const CubicParams& params,
                                  OptCache* shared_cache = nullptr, Counters* counters = nullptr,
                                  LayerCache* layer_cache = nullptr) {
  require(params.lambda > 0.0 && params.lambda <= 1.0, "sparsify_cubic: lambda must lie in (0,1]");
  require(params.gamma > 0.0 && params.gamma < 1.0, "sparsify_cubic: gamma must lie in (0,1)");
  const std::size_t k = windows.size();
  std::vector<Index> lengths;
  for (auto w : windows) lengths.push_back(Index(w.size()));
  CubicResult res{EstimateTable(lengths), {}, {}};
  Counters local_counters;
  Counters* ctr = counters ? counters : &local_counters;
  if (k == 0) return res;

  std::unique_ptr<OptCache> own;
  if (!shared_cache) own = std::make_unique<OptCache>([&](std::size_t t) { return windows[t]; }, ctr);
  OptCache& cache = shared_cache ? *shared_cache : *own;

  std::map<Index, std::vector<std::size_t>> classes;
  for (std::size_t t = 0; t < k; ++t) classes[lengths[t]].push_back(t);
  std::vector<Index> sizes;
  for (const auto& [len, ids] : classes) sizes.push_back(len);

  std::vector<double> levels = params.grid.empty() ? std::vector<double>{params.lambda} : params.grid;
  require(std::is_sorted(levels.begin(), levels.end()), "sparsify_cubic: grid must be ascending");
  for (double l : levels) require(l > 0.0 && l <= 1.0, "sparsify_cubic: grid levels must lie in (0,1]");
  std::vector<double> lts;
  for (double l : levels) lts.push_back(l * l / 2.0);
  const double lt = lts.front();
  const auto has_pair = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    for (auto i : x)
      for (auto j : y)
        if (params.scope.contains(i, j)) return true;
    return false;
  };

  std::size_t run_id = 0;
  const auto run = [&](const std::vector<std::size_t>& first, const std::vector<std::size_t>& second, bool cross) {
    CubicRunInfo info;
    info.members = first;
    if (cross) info.members.insert(info.members.end(), second.begin(), second.end());
    for (auto t : info.members) info.padded_length = std::max<std::size_t>(info.padded_length, lengths[t]);
    const std::size_t kr = info.members.size();
    info.rounds = cubic_rounds(kr, params.gamma, params.round_scale);
    Rng rng(mix_seed(params.seed, run_id++));
    for (std::size_t r = 0; r < info.rounds; ++r) info.anchors.push_back(info.members[uniform_index(rng, kr)]);
    std::sort(info.anchors.begin(), info.anchors.end());
    info.anchors.erase(std::unique(info.anchors.begin(), info.anchors.end()), info.anchors.end());

    std::vector<char> in_second(k, 0);
    if (cross)
      for (auto t : second) in_second[t] = 1;
    const auto wanted = [&](std::size_t i, std::size_t j) {
      if (!params.scope.contains(i, j)) return false;
      return !cross || in_second[i] != in_second[j];
    };

    for (std::size_t a : info.anchors) {
      std::vector<std::size_t> slot;  // member slot -> window id
      std::vector<SymbolView> views;
      for (auto t : info.members) {
        if (t == a) continue;
        slot.push_back(t);
        views.push_back(windows[t]);
      }
      LcsCmp::LayerFn layer_fn;
      if (layer_cache) {
        layer_fn = [&](std::size_t s, std::size_t q) {
          return layer_cache->layers(a, slot[s], windows[a], windows[slot[s]], q, ctr);
        };
      }
      LcsCmp cmp(windows[a], info.padded_length, views, lt, ctr,
                 [&](std::size_t s) { return cache.get(a, slot[s]); }, layer_fn);
      // Anchor-incident pairs: the exact opt is already in hand.
      for (std::size_t s = 0; s < slot.size(); ++s) {
        const std::size_t j = slot[s];
        if (!wanted(a, j)) continue;
        const Matching& m = cmp.opt(s);
        const std::size_t longer = std::max(lengths[a], lengths[j]);
        int top = -1;
        for (std::size_t v = 0; v < levels.size(); ++v)
          if (double(m.size()) >= cubic_accept_bound(levels[v], longer) - kSlack) top = int(v);
        if (top >= 0 && m.size() > 0) res.table.offer(a, j, Index(m.size()), Source::Direct, levels[std::size_t(top)], m);
      }
      std::vector<char> need_layers(slot.size(), 0);
      bool any = false;
      for (std::size_t si = 0; si < slot.size(); ++si)
        for (std::size_t sj = 0; sj < slot.size(); ++sj)
          if (si != sj && wanted(slot[si], slot[sj])) need_layers[sj] = 1, any = true;
      if (!any) continue;
      for (std::size_t s = 0; s < slot.size(); ++s)
        if (need_layers[s]) cmp.build_layers(s);

      struct Hit {
        std::size_t i, j, level;
        Matching cert;
      };
      std::vector<std::vector<Hit>> hits(slot.size());
      parallel_for(slot.size(), params.threads, [&](std::size_t si) {
        LcsCmp::Marks marks;
        std::vector<std::size_t> scratch;
        bool marked = false;
        for (std::size_t sj = 0; sj < slot.size(); ++sj) {
          if (si == sj || !need_layers[sj] || !wanted(slot[si], slot[sj])) continue;
          if (cmp.layers(sj).empty()) continue;
          if (!marked) cmp.mark(si, marks), marked = true;
          const int v = cmp.best_level(marks, sj, lts, scratch);
          if (v < 0) continue;
          auto ans = cmp.query_at(marks, sj, lts[std::size_t(v)]);
          ensure(ans.accept, "sparsify_cubic: level scan and query disagree");
          hits[si].push_back({slot[si], slot[sj], std::size_t(v), std::move(ans.certificate)});
        }
      });
      for (auto& row : hits) {
        for (auto& h : row) {
          const double need = cubic_accept_bound(levels[h.level], info.padded_length);
          ensure(double(h.cert.size()) >= need - kSlack, "sparsify_cubic: certificate below guarantee");
          const auto size = Index(h.cert.size());
          res.table.offer(h.i, h.j, size, Source::Tuple, levels[h.level], std::move(h.cert));
        }
      }
    }
    res.runs.push_back(std::move(info));
  };

  for (std::size_t x = 0; x < sizes.size(); ++x) {
    const auto& cx = classes[sizes[x]];
    if (has_pair(cx, cx)) run(cx, {}, false);
  }
  for (std::size_t x = 0; x < sizes.size(); ++x) {
    for (std::size_t y = x + 1; y < sizes.size(); ++y) {
      const auto& cx = classes[sizes[x]];
      const auto& cy = classes[sizes[y]];
      if (has_pair(cx, cy)) run(cx, cy, true);
    }
  }
  res.counters = ctr->snapshot();
  return res;
}

// Brute-force count, per pair, of anchors w_a with lcs_{w_a}(w_i, w_j) / sqrt(|w_i||w_j|) >= λ²/2.
// A pair is close when the count reaches k^{1-γ}. Test-scale only.
struct ClosePairsReport {
  std::size_t close_pairs = 0;
  std::vector<std::vector<std::size_t>> witnesses;  // ordered (i, j)
};

inline ClosePairsReport diagnostics_close_pairs(const std::vector<SymbolView>& windows, double lambda, double gamma) {
  const std::size_t k = windows.size();
  require(k <= kDiagnosticsMaxWindows, "diagnostics_close_pairs: k above test-scale cap");
  ClosePairsReport rep;
  rep.witnesses.assign(k, std::vector<std::size_t>(k, 0));
  const double need = std::pow(double(k), 1.0 - gamma);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      if (a == i) continue;
      const Matching opt_ia = lcs_exact(windows[i], windows[a]);
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i || j == a) continue;
        const double v = normalize_lcs(lcs_via_witness(opt_ia, windows[i], windows[j]), windows[i].size(),
                                       windows[j].size());
        if (v >= lambda * lambda / 2.0 - kSlack) ++rep.witnesses[i][j];
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && double(rep.witnesses[i][j]) >= need - kSlack) ++rep.close_pairs;
  return rep;
}

}  // namespace lcslis
