// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <optional>
#include <string>
#include <vector>

#include "lcslis/core.hpp"
#include "lcslis/exact.hpp"
#include "lcslis/util.hpp"

namespace lcslis {

// Read-only view of an array cut into equal blocks. Every element read is counted.
class SubarrayGrid {
 public:
  SubarrayGrid(SymbolView a, std::size_t block, std::atomic<std::uint64_t>* reads = nullptr)
      : a_(a), block_(std::max<std::size_t>(1, block)), reads_(reads) {}

  // Default block: ⌊√n⌋.
  static std::size_t default_block(std::size_t n) {
    return std::max<std::size_t>(1, std::size_t(std::sqrt(double(n)) + kSlack));
  }

  std::size_t n() const { return a_.size(); }
  std::size_t block() const { return block_; }
  std::size_t count() const { return (a_.size() + block_ - 1) / block_; }
  std::size_t begin(std::size_t i) const { return i * block_; }
  std::size_t length(std::size_t i) const { return std::min(block_, a_.size() - begin(i)); }

  Symbol at(std::size_t i, std::size_t offset) const {
    if (reads_) reads_->fetch_add(1, std::memory_order_relaxed);
    return a_[begin(i) + offset];
  }

  SymbolView read(std::size_t i) const {
    if (reads_) reads_->fetch_add(length(i), std::memory_order_relaxed);
    return a_.subspan(begin(i), length(i));
  }

  // Uncounted view, for callers that charge reads themselves.
  SymbolView peek(std::size_t i) const { return a_.subspan(begin(i), length(i)); }
  std::atomic<std::uint64_t>* counter() const { return reads_; }

 private:
  SymbolView a_;
  std::size_t block_;
  std::atomic<std::uint64_t>* reads_;
};

struct CandidateDomain {
  Symbol lo = 0, hi = 0;
  std::size_t origin = 0;
  bool operator==(const CandidateDomain&) const = default;
};

struct ValueInterval {
  Symbol lo = 0, hi = 0;
  bool operator==(const ValueInterval&) const = default;
};

struct PseudoSolution {
  std::vector<std::optional<ValueInterval>> intervals;  // one slot per subarray

  std::size_t used() const {
    return std::size_t(std::count_if(intervals.begin(), intervals.end(), [](const auto& x) { return x.has_value(); }));
  }

  bool monotone() const {
    std::optional<Symbol> prev_hi;
    for (const auto& x : intervals) {
      if (!x) continue;
      if (x->lo > x->hi) return false;
      if (prev_hi && !(*prev_hi < x->lo)) return false;
      prev_hi = x->hi;
    }
    return true;
  }
};

// ⌈scale·20·ln(1/δ)/(λ·ε²)⌉, at least 1.
inline std::size_t domain_sample_count(double lambda, double eps, double delta, double scale = 1.0) {
  require(lambda > 0.0 && lambda <= 1.0, "lis: lambda must lie in (0,1]");
  require(eps > 0.0 && eps < 1.0, "lis: eps must lie in (0,1)");
  require(delta > 0.0 && delta < 1.0, "lis: delta must lie in (0,1)");
  require(scale > 0.0, "lis: domain_sample_scale must be positive");
  const double k = std::ceil(scale * 20.0 * std::log(1.0 / delta) / (lambda * eps * eps) - kSlack);
  return std::size_t(std::max(1.0, std::min(k, 1e15)));
}

// Samples min(k, |sa|) positions; k ≥ |sa| reads the whole subarray. Emits every [x, y] with x ≤ y
// over sampled values, deduplicated and sorted by (lo, hi).
inline std::vector<CandidateDomain> construct_candidate_domains(const SubarrayGrid& grid, std::size_t sa,
                                                                std::size_t k, Rng& rng) {
  const std::size_t len = grid.length(sa);
  std::vector<Symbol> vals;
  if (k >= len) {
    const SymbolView v = grid.read(sa);
    vals.assign(v.begin(), v.end());
  } else {
    std::vector<std::size_t> pos(k);
    for (auto& p : pos) p = uniform_index(rng, len);
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    for (std::size_t p : pos) vals.push_back(grid.at(sa, p));
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<CandidateDomain> out;
  out.reserve(vals.size() * (vals.size() + 1) / 2);
  for (std::size_t x = 0; x < vals.size(); ++x)
    for (std::size_t y = x; y < vals.size(); ++y) out.push_back({vals[x], vals[y], sa});
  return out;
}

inline std::vector<CandidateDomain> construct_candidate_domains(const SubarrayGrid& grid, std::size_t sa,
                                                                double lambda, double eps, double delta,
                                                                std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  return construct_candidate_domains(grid, sa, domain_sample_count(lambda, eps, delta, scale), rng);
}

// Greedy extraction of maximum-cardinality monotone assignments. Each call to next() removes the intervals it used.
class PseudoSolutionBuilder {
 public:
  PseudoSolutionBuilder(std::vector<std::vector<CandidateDomain>> cdi, double min_used)
      : cdi_(std::move(cdi)), min_used_(min_used) {
    for (auto& c : cdi_) {
      std::sort(c.begin(), c.end(),
                [](const CandidateDomain& x, const CandidateDomain& y) { return std::tie(x.lo, x.hi) < std::tie(y.lo, y.hi); });
      c.erase(std::unique(c.begin(), c.end(),
                          [](const CandidateDomain& x, const CandidateDomain& y) { return x.lo == y.lo && x.hi == y.hi; }),
              c.end());
      for (const auto& d : c) require(d.lo <= d.hi, "pseudo-solutions: candidate domain with lo > hi");
      widest_ = std::max(widest_, c.size());
    }
  }

  std::size_t subarrays() const { return cdi_.size(); }
  std::size_t widest_set() const { return widest_; }

  // Maximum-cardinality monotone assignment over the remaining intervals, ties toward smaller (subarray, slot) ids.
  PseudoSolution best_assignment() const {
    std::vector<Symbol> ends;
    for (const auto& c : cdi_)
      for (const auto& d : c) ends.push_back(d.hi);
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

    // Fenwick prefix-max over interval right ends; key = (count, -id).
    struct Key {
      std::uint32_t count = 0;
      std::int64_t neg_id = std::numeric_limits<std::int64_t>::min();
      bool operator<(const Key& o) const { return std::tie(count, neg_id) < std::tie(o.count, o.neg_id); }
    };
    std::vector<Key> tree(ends.size() + 1);
    const auto update = [&](std::size_t pos, Key v) {
      for (++pos; pos < tree.size(); pos += pos & (~pos + 1)) tree[pos] = std::max(tree[pos], v);
    };
    const auto query = [&](std::size_t count) {  // max over the first `count` ends
      Key best;
      for (std::size_t pos = count; pos > 0; pos -= pos & (~pos + 1)) best = std::max(best, tree[pos]);
      return best;
    };

    std::vector<std::size_t> base(cdi_.size() + 1, 0);
    for (std::size_t i = 0; i < cdi_.size(); ++i) base[i + 1] = base[i] + cdi_[i].size();
    std::vector<std::uint32_t> f(base.back(), 0);
    std::vector<std::int64_t> pred(base.back(), -1);
    Key overall;
    for (std::size_t i = 0; i < cdi_.size(); ++i) {
      for (std::size_t s = 0; s < cdi_[i].size(); ++s) {
        const auto& d = cdi_[i][s];
        const std::size_t below = std::size_t(std::lower_bound(ends.begin(), ends.end(), d.lo) - ends.begin());
        const Key prev = query(below);
        const std::size_t id = base[i] + s;
        f[id] = prev.count + 1;
        pred[id] = prev.count == 0 ? -1 : -prev.neg_id;
        overall = std::max(overall, Key{f[id], -std::int64_t(id)});
      }
      for (std::size_t s = 0; s < cdi_[i].size(); ++s) {
        const std::size_t id = base[i] + s;
        const std::size_t at = std::size_t(std::lower_bound(ends.begin(), ends.end(), cdi_[i][s].hi) - ends.begin());
        update(at, Key{f[id], -std::int64_t(id)});
      }
    }

    PseudoSolution ps;
    ps.intervals.assign(cdi_.size(), std::nullopt);
    if (overall.count == 0) return ps;
    for (std::int64_t id = -overall.neg_id; id >= 0; id = pred[std::size_t(id)]) {
      const std::size_t i = std::size_t(std::upper_bound(base.begin(), base.end(), std::size_t(id)) - base.begin()) - 1;
      const auto& d = cdi_[i][std::size_t(id) - base[i]];
      ps.intervals[i] = ValueInterval{d.lo, d.hi};
    }
    ensure(ps.used() == overall.count, "pseudo-solutions: backtrack lost intervals");
    return ps;
  }

  std::optional<PseudoSolution> next() {
    if (stopped_) return std::nullopt;
    PseudoSolution ps = best_assignment();
    const std::size_t used = ps.used();
    if (used == 0 || double(used) < min_used_ - kSlack) {
      stopped_ = true;
      return std::nullopt;
    }
    ensure(ps.monotone(), "pseudo-solutions: assignment not monotone");
    for (std::size_t i = 0; i < cdi_.size(); ++i) {
      if (!ps.intervals[i]) continue;
      auto& c = cdi_[i];
      const auto it = std::find_if(c.begin(), c.end(), [&](const CandidateDomain& d) {
        return d.lo == ps.intervals[i]->lo && d.hi == ps.intervals[i]->hi;
      });
      ensure(it != c.end(), "pseudo-solutions: used interval missing");
      c.erase(it);
    }
    ++produced_;
    return ps;
  }

  std::size_t produced() const { return produced_; }

 private:
  std::vector<std::vector<CandidateDomain>> cdi_;
  double min_used_;
  std::size_t widest_ = 0;
  std::size_t produced_ = 0;
  bool stopped_ = false;
};

// Stops once an assignment uses fewer than ε·λ·(subarray count) intervals.
inline std::vector<PseudoSolution> construct_pseudo_solutions(std::vector<std::vector<CandidateDomain>> cdi,
                                                             double lambda, double eps) {
  require(lambda > 0.0 && lambda <= 1.0, "pseudo-solutions: lambda must lie in (0,1]");
  require(eps > 0.0 && eps < 1.0, "pseudo-solutions: eps must lie in (0,1)");
  const double min_used = eps * lambda * double(cdi.size());
  PseudoSolutionBuilder builder(std::move(cdi), min_used);
  std::vector<PseudoSolution> out;
  while (auto ps = builder.next()) out.push_back(std::move(*ps));
  // |cdi_i| plays the role of k² in the count bound.
  ensure(double(out.size()) <= double(builder.widest_set()) / (lambda * eps) + kSlack,
         "pseudo-solutions: count bound violated");
  return out;
}

// q(ps): sum of range-restricted LIS over the assigned subarrays. Reads every used subarray.
inline std::size_t pseudo_solution_quality(const SubarrayGrid& grid, const PseudoSolution& ps) {
  std::size_t q = 0;
  for (std::size_t i = 0; i < ps.intervals.size(); ++i)
    if (ps.intervals[i]) q += lis_range(grid.read(i), ps.intervals[i]->lo, ps.intervals[i]->hi);
  return q;
}

// min(1, scale·1000·t·ln⁴n/(ε⁴·λ·m)) with m the subarray count.
inline double evaluation_rate(std::size_t t, std::size_t n, std::size_t m, double lambda, double eps,
                              double scale = 1.0) {
  const double ln_n = std::log(std::max<double>(2.0, double(n)));
  const double p = scale * 1000.0 * double(t) * std::pow(ln_n, 4) / (std::pow(eps, 4) * lambda * double(std::max<std::size_t>(1, m)));
  return std::min(1.0, p);
}

struct EvaluationResult {
  double best = 0.0;
  std::size_t best_index = 0;
  std::vector<double> estimates;
  std::vector<std::size_t> sampled;
  double rate = 1.0;
};

// Samples subarray ids once at `rate`, reads each sampled subarray once, then scores every pseudo-solution.
inline EvaluationResult evaluate_pseudo_solutions(const SubarrayGrid& grid, const std::vector<PseudoSolution>& ps,
                                                  double rate, Rng& rng, unsigned threads = 1) {
  require(rate > 0.0 && rate <= 1.0, "evaluate: rate must lie in (0,1]");
  EvaluationResult res;
  res.rate = rate;
  res.estimates.assign(ps.size(), 0.0);
  const std::size_t m = grid.count();
  for (const auto& p : ps) require(p.intervals.size() == m, "evaluate: pseudo-solution does not match the grid");
  for (std::size_t i = 0; i < m; ++i)
    if (rate >= 1.0 || uniform01(rng) < rate) res.sampled.push_back(i);
  if (ps.empty()) return res;

  std::vector<char> needed(m, 0);
  for (const auto& p : ps)
    for (std::size_t i : res.sampled)
      if (p.intervals[i]) needed[i] = 1;
  for (std::size_t i : res.sampled)
    if (needed[i]) grid.read(i);

  parallel_for(ps.size(), threads, [&](std::size_t j) {
    double sum = 0.0;
    for (std::size_t i : res.sampled) {
      const auto& iv = ps[j].intervals[i];
      if (iv) sum += double(lis_range(grid.peek(i), iv->lo, iv->hi)) / rate;
    }
    res.estimates[j] = sum;
  });
  for (std::size_t j = 0; j < ps.size(); ++j)
    if (res.estimates[j] > res.best) res.best = res.estimates[j], res.best_index = j;
  return res;
}

struct LisConfig {
  double eps = 0.1;
  double delta = 0.1;
  // Multiplies the sample count k; at 1 the count exceeds √n for every n below ~10^8.
  double domain_sample_scale = 1.0 / 2400.0;
  double eval_scale = 1.0;
  double threshold_divisor = 4.0;
  std::optional<std::size_t> block;  // default ⌊√n⌋
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct LisDecision {
  bool accept = false;
  double estimate = 0.0;
  double threshold = 0.0;
  double lambda = 0.0;
  std::size_t t = 0;
  std::size_t k = 0;
  std::size_t subarrays = 0;
  double rate = 1.0;
  std::uint64_t accesses = 0;
};

// Candidate domains, pseudo-solutions, evaluation; accepts iff the best estimate ≥ λn/(divisor·t).
inline LisDecision lis_decide(SymbolView a, double lambda, const LisConfig& cfg,
                              std::atomic<std::uint64_t>* reads = nullptr) {
  const std::size_t n = a.size();
  LisDecision d;
  d.lambda = lambda;
  require(lambda <= 1.0 + kSlack, "lis_decide: lambda must be at most 1");
  require(n == 0 || lambda >= 1.0 / double(n) - kSlack, "lis_decide: lambda must be at least 1/n");
  std::atomic<std::uint64_t> local{0};
  std::atomic<std::uint64_t>* counter = reads ? reads : &local;
  const std::uint64_t before = counter->load();
  if (n <= 1) {
    counter->fetch_add(n);
    d.estimate = double(n);
    d.threshold = lambda * double(n);
    d.accept = d.estimate >= d.threshold - kSlack;
    d.accesses = n;
    return d;
  }
  const SubarrayGrid grid(a, cfg.block.value_or(SubarrayGrid::default_block(n)), counter);
  const std::size_t m = grid.count();
  d.subarrays = m;
  d.k = domain_sample_count(std::min(1.0, lambda), cfg.eps, cfg.delta, cfg.domain_sample_scale);

  std::vector<std::vector<CandidateDomain>> cdi(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng(mix_seed(cfg.seed, i));
    cdi[i] = construct_candidate_domains(grid, i, d.k, rng);
  }
  const auto ps = construct_pseudo_solutions(std::move(cdi), std::min(1.0, lambda), cfg.eps);
  d.t = ps.size();
  const double kk = double(std::min(d.k, grid.block()));
  ensure(double(d.t) <= kk * kk / (std::min(1.0, lambda) * cfg.eps) + kSlack, "lis_decide: too many pseudo-solutions");
  if (d.t == 0) {
    d.accesses = counter->load() - before;
    return d;
  }
  d.rate = evaluation_rate(d.t, n, m, std::min(1.0, lambda), cfg.eps, cfg.eval_scale);
  Rng rng(mix_seed(cfg.seed, 0xE7A1));
  const auto ev = evaluate_pseudo_solutions(grid, ps, d.rate, rng, cfg.threads);
  d.estimate = ev.best;
  d.threshold = lambda * double(n) / (cfg.threshold_divisor * double(d.t));
  d.accept = d.estimate >= d.threshold - kSlack;
  d.accesses = counter->load() - before;
  return d;
}

inline LisDecision lis_decide(const Sequence& a, double lambda, const LisConfig& cfg,
                              std::atomic<std::uint64_t>* reads = nullptr) {
  return lis_decide(a.view(), lambda, cfg, reads);
}

// λ grid: 1, 1/(1+ε), 1/(1+ε)², … down to (but excluding) `floor`.
inline std::vector<double> lis_lambda_grid(double eps, double floor) {
  require(eps > 0.0, "lis: eps must be positive");
  std::vector<double> g;
  for (double l = 1.0; l >= floor - kSlack && l > 0.0; l /= 1.0 + eps) g.push_back(l);
  return g;
}

struct LisApproxResult {
  double estimate = 0.0;
  double lambda_final = 0.0;
  std::string branch;  // trivial | decide | sampling
  std::size_t decisions = 0;
  std::uint64_t accesses = 0;
  double sample_rate = 0.0;
  std::vector<LisDecision> trace;
};

// Sweeps λ down until lis_decide accepts; below λ = n^{-1/20} switches to sampling at rate n^{-3/20} and returns the
// sample's LIS unscaled, which is a lower bound on lis(A).
inline LisApproxResult lis_approx(SymbolView a, const LisConfig& cfg, std::atomic<std::uint64_t>* reads = nullptr) {
  std::atomic<std::uint64_t> local{0};
  std::atomic<std::uint64_t>* counter = reads ? reads : &local;
  const std::uint64_t before = counter->load();
  const std::size_t n = a.size();
  LisApproxResult res;
  if (n <= 1) {
    counter->fetch_add(n);
    res.estimate = double(n);
    res.lambda_final = n == 1 ? 1.0 : 0.0;
    res.branch = "trivial";
    res.accesses = n;
    return res;
  }
  const double switch_below = std::pow(double(n), -1.0 / 20.0);
  for (double lambda : lis_lambda_grid(cfg.eps, 1.0 / double(n))) {
    if (lambda < switch_below - kSlack) break;
    LisConfig step = cfg;
    step.seed = mix_seed(cfg.seed, res.decisions);
    auto d = lis_decide(a, lambda, step, counter);
    ++res.decisions;
    res.trace.push_back(d);
    if (d.accept) {
      res.estimate = d.estimate;
      res.lambda_final = lambda;
      res.branch = "decide";
      res.accesses = counter->load() - before;
      return res;
    }
  }
  res.branch = "sampling";
  res.sample_rate = std::pow(double(n), -3.0 / 20.0);
  Rng rng(mix_seed(cfg.seed, 0x5A3B));
  std::vector<Symbol> sample;
  for (std::size_t i = 0; i < n; ++i)
    if (uniform01(rng) < res.sample_rate) sample.push_back(a[i]);
  counter->fetch_add(sample.size());
  res.estimate = double(lis_exact(sample));
  res.lambda_final = res.estimate / double(n);
  res.accesses = counter->load() - before;
  return res;
}

inline LisApproxResult lis_approx(const Sequence& a, const LisConfig& cfg, std::atomic<std::uint64_t>* reads = nullptr) {
  return lis_approx(a.view(), cfg, reads);
}

}  // namespace lcslis
