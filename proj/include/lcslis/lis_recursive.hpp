// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "lcslis/core.hpp"
#include "lcslis/exact.hpp"
#include "lcslis/lis_sublinear.hpp"
#include "lcslis/util.hpp"

namespace lcslis {

// Decision oracle over a subarray restricted to values in [lo, hi].
using LisOracle = std::function<bool(SymbolView sa, double lambda, Symbol lo, Symbol hi, std::uint64_t seed)>;

struct RecursionConfig {
  double kappa = 1.0 / 3.0;
  double eps = 0.1;
  double delta = 0.1;
  double domain_sample_scale = LisConfig{}.domain_sample_scale;
  double eval_scale = 1.0;
  double rate_scale = 1.0;  // multiplies the oracle-level sample rate
  unsigned threads = 1;
};

// Quantities fixed by the top-level length.
struct RecursionPlan {
  std::size_t top_n = 0;
  double kappa = 0.0;
  std::size_t zeta = 1;       // ⌊n^κ⌋ subarrays per level
  double base_limit = 0.0;    // n^{2κ}
  int max_depth = 0;          // ⌈1/κ⌉ − 1

  static RecursionPlan make(std::size_t n, double kappa) {
    require(kappa > 0.0 && kappa < 1.0, "recursive lis: kappa must lie in (0,1)");
    RecursionPlan p;
    p.top_n = n;
    p.kappa = kappa;
    p.zeta = std::max<std::size_t>(1, std::size_t(std::floor(std::pow(double(std::max<std::size_t>(n, 1)), kappa) + 1e-6)));
    p.base_limit = std::pow(double(std::max<std::size_t>(n, 1)), 2.0 * kappa);
    p.max_depth = int(std::ceil(1.0 / kappa - 1e-9)) - 1;
    return p;
  }

  // Block length that cuts `len` into at most ζ pieces.
  std::size_t block_for(std::size_t len) const { return std::max<std::size_t>(1, (len + zeta - 1) / zeta); }
  bool is_base(std::size_t len) const { return double(len) <= base_limit + 1e-6; }
};

// λ₀ = (λ/2⁸)⁴.
// Clamped to the smallest normal double so deep levels never reach 0.
inline double oracle_lambda(double lambda) {
  return std::max(std::pow(lambda / 256.0, 4), std::numeric_limits<double>::min());
}

struct RecursionTrace {
  std::mutex mu;
  int deepest = 0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t base_calls = 0;
  std::map<int, std::vector<std::pair<double, double>>> lambda0;  // depth -> (λ, λ₀) per wrapped call

  void note_wrap(int depth, double lambda, double l0) {
    std::lock_guard lock(mu);
    deepest = std::max(deepest, depth);
    lambda0[depth].emplace_back(lambda, l0);
  }
  void note_base(int depth) {
    std::lock_guard lock(mu);
    deepest = std::max(deepest, depth);
    ++base_calls;
  }
};

struct RecursiveContext {
  RecursionPlan plan;
  RecursionConfig cfg;
  std::atomic<std::uint64_t>* reads = nullptr;
  RecursionTrace* trace = nullptr;
};

namespace detail {

inline std::vector<std::vector<CandidateDomain>> restricted_domains(const SubarrayGrid& grid, double lambda, Symbol lo,
                                                                    Symbol hi, const RecursionConfig& cfg,
                                                                    std::uint64_t seed) {
  const std::size_t k = domain_sample_count(std::min(1.0, lambda), cfg.eps, cfg.delta, cfg.domain_sample_scale);
  std::vector<std::vector<CandidateDomain>> cdi(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    Rng rng(mix_seed(seed, i));
    auto all = construct_candidate_domains(grid, i, k, rng);
    for (const auto& d : all)
      if (lo <= d.lo && d.hi <= hi) cdi[i].push_back(d);
  }
  return cdi;
}

inline std::uint64_t interval_salt(std::size_t i, Symbol lo, Symbol hi) {
  return mix_seed(mix_seed(std::uint64_t(i), lo), hi);
}

}  // namespace detail

struct OracleStepResult {
  bool accept = false;
  std::size_t t = 0;                // pseudo-solutions built before deciding
  bool complete = false;            // false when an early accept cut construction short
  double lambda0 = 0.0;
  double rate = 1.0;
  double needed = 0.0;              // 3·λ₀·p·ζ/4
  std::vector<std::size_t> counts;  // per pseudo-solution built
  std::size_t oracle_calls = 0;
};

// Candidate domains in [lo, hi], pseudo-solutions, then counts oracle acceptances over sampled subarrays.
// The sample set and threshold do not depend on the pseudo-solution count, so pseudo-solutions are built one at a
// time and the first one reaching the threshold decides; the answer equals the build-everything run.
inline OracleStepResult recursive_estimate_with_oracle(const LisOracle& oracle, SymbolView a, double lambda, Symbol lo,
                                                       Symbol hi, const RecursiveContext& ctx, std::uint64_t seed) {
  require(lambda > 0.0 && lambda <= 1.0 + kSlack, "recursive lis: lambda must lie in (0,1]");
  require(lo <= hi, "recursive lis: lo > hi");
  OracleStepResult res;
  const auto& plan = ctx.plan;
  const SubarrayGrid grid(a, plan.block_for(a.size()), ctx.reads);
  const double lam = std::min(1.0, lambda);
  require(ctx.cfg.eps > 0.0 && ctx.cfg.eps < 1.0, "recursive lis: eps must lie in (0,1)");
  auto cdi = detail::restricted_domains(grid, lambda, lo, hi, ctx.cfg, seed);
  PseudoSolutionBuilder builder(std::move(cdi), ctx.cfg.eps * lam * double(grid.count()));
  res.lambda0 = oracle_lambda(lambda);
  const double zeta = double(plan.zeta);
  const double ln_n = std::log(std::max<double>(2.0, double(plan.top_n)));
  res.rate = std::min(1.0, ctx.cfg.rate_scale * 20.0 * std::pow(ln_n, 4) / (res.lambda0 * zeta));
  res.needed = 3.0 * res.lambda0 * res.rate * zeta / 4.0;

  Rng rng(mix_seed(seed, 0x0A11));
  std::vector<std::size_t> sampled;
  for (std::size_t i = 0; i < grid.count(); ++i)
    if (res.rate >= 1.0 || uniform01(rng) < res.rate) sampled.push_back(i);

  // Each distinct (subarray, interval) is asked once.
  std::map<std::tuple<std::size_t, Symbol, Symbol>, bool> memo;
  while (auto ps = builder.next()) {
    ++res.t;
    std::vector<std::tuple<std::size_t, Symbol, Symbol>> asks;
    for (std::size_t i : sampled) {
      const auto& iv = ps->intervals[i];
      if (iv && !memo.count({i, iv->lo, iv->hi})) asks.emplace_back(i, iv->lo, iv->hi);
    }
    std::vector<char> answer(asks.size(), 0);
    parallel_for(asks.size(), ctx.cfg.threads, [&](std::size_t x) {
      const auto [i, l, r] = asks[x];
      answer[x] = oracle(grid.peek(i), res.lambda0, l, r, mix_seed(seed, detail::interval_salt(i, l, r))) ? 1 : 0;
    });
    for (std::size_t x = 0; x < asks.size(); ++x) memo[asks[x]] = answer[x] != 0;
    res.oracle_calls += asks.size();

    std::size_t c = 0;
    for (std::size_t i : sampled) {
      const auto& iv = ps->intervals[i];
      if (iv && memo.at({i, iv->lo, iv->hi})) ++c;
    }
    res.counts.push_back(c);
    if (double(c) >= res.needed * (1.0 - kSlack)) {
      res.accept = true;
      return res;
    }
  }
  res.complete = true;
  ensure(double(res.t) <= double(builder.widest_set()) / (lam * ctx.cfg.eps) + kSlack,
         "recursive lis: pseudo-solution count bound violated");
  return res;
}

struct BaseResult {
  bool accept = false;
  std::size_t t = 0;
  double best = 0.0;
  double rate = 1.0;
};

// Base pipeline on a short array: accepts iff the best evaluated pseudo-solution reaches λ·|A|.
// While the evaluation rate is already 1 for the current count, each new pseudo-solution is scored exactly and an
// early accept is taken; the rate only grows with the count, so the outcome matches the all-at-once run.
inline BaseResult recursive_base(SymbolView a, double lambda, Symbol lo, Symbol hi, const RecursiveContext& ctx,
                                 std::uint64_t seed) {
  BaseResult res;
  const auto& plan = ctx.plan;
  const SubarrayGrid grid(a, plan.block_for(a.size()), ctx.reads);
  const double target = lambda * double(a.size());
  auto cdi = detail::restricted_domains(grid, lambda, lo, hi, ctx.cfg, seed);
  const double lam = std::min(1.0, lambda);
  PseudoSolutionBuilder builder(std::move(cdi), ctx.cfg.eps * lam * double(grid.count()));
  std::vector<PseudoSolution> ps;
  std::vector<char> loaded(grid.count(), 0);
  while (auto next = builder.next()) {
    ps.push_back(std::move(*next));
    const double rate = evaluation_rate(ps.size(), plan.top_n, grid.count(), lam, ctx.cfg.eps, ctx.cfg.eval_scale);
    if (rate < 1.0) continue;
    double q = 0.0;
    for (std::size_t i = 0; i < grid.count(); ++i) {
      const auto& iv = ps.back().intervals[i];
      if (!iv) continue;
      if (!loaded[i]) grid.read(i), loaded[i] = 1;
      q += double(lis_range(grid.peek(i), iv->lo, iv->hi));
    }
    res.best = std::max(res.best, q);
    if (q >= target * (1.0 - kSlack)) {
      res.accept = true;
      res.t = ps.size();
      return res;
    }
  }
  res.t = ps.size();
  ensure(double(res.t) <= double(builder.widest_set()) / (lam * ctx.cfg.eps) + kSlack,
         "recursive lis: pseudo-solution count bound violated");
  if (ps.empty()) return res;
  res.rate = evaluation_rate(ps.size(), plan.top_n, grid.count(), lam, ctx.cfg.eps, ctx.cfg.eval_scale);
  if (res.rate >= 1.0) return res;  // every pseudo-solution was already scored exactly
  Rng rng(mix_seed(seed, 0xBA5E));
  const auto ev = evaluate_pseudo_solutions(grid, ps, res.rate, rng, 1);
  res.best = ev.best;
  res.accept = ev.best >= target * (1.0 - kSlack);
  return res;
}

// Wraps itself as the oracle while the input is longer than n^{2κ}.
inline bool recursive_lis_at(SymbolView a, double lambda, Symbol lo, Symbol hi, const RecursiveContext& ctx,
                             std::uint64_t seed, int depth) {
  ensure(depth <= ctx.plan.max_depth, "recursive lis: depth bound exceeded");
  if (ctx.plan.is_base(a.size())) {
    if (ctx.trace) ctx.trace->note_base(depth);
    return recursive_base(a, lambda, lo, hi, ctx, seed).accept;
  }
  const LisOracle self = [&ctx, depth](SymbolView sa, double l, Symbol l_lo, Symbol l_hi, std::uint64_t s) {
    return recursive_lis_at(sa, l, l_lo, l_hi, ctx, s, depth + 1);
  };
  const auto step = recursive_estimate_with_oracle(self, a, lambda, lo, hi, ctx, seed);
  ensure(step.lambda0 == oracle_lambda(lambda), "recursive lis: oracle lambda mismatch");
  if (ctx.trace) {
    ctx.trace->note_wrap(depth, lambda, step.lambda0);
    std::lock_guard lock(ctx.trace->mu);
    ctx.trace->oracle_calls += step.oracle_calls;
  }
  return step.accept;
}

struct RecursiveResult {
  bool accept = false;
  int depth = 0;
  std::uint64_t accesses = 0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t base_calls = 0;
  RecursionPlan plan;
  std::map<int, std::vector<std::pair<double, double>>> lambda0;
};

inline RecursiveResult recursive_lis(SymbolView a, double lambda, Symbol lo, Symbol hi, const RecursionConfig& cfg,
                                     std::uint64_t seed, std::atomic<std::uint64_t>* reads = nullptr) {
  std::atomic<std::uint64_t> local{0};
  std::atomic<std::uint64_t>* counter = reads ? reads : &local;
  const std::uint64_t before = counter->load();
  RecursionTrace trace;
  RecursiveContext ctx{RecursionPlan::make(a.size(), cfg.kappa), cfg, counter, &trace};
  RecursiveResult res;
  res.plan = ctx.plan;
  if (a.empty()) {
    res.accept = true;
    return res;
  }
  require(lambda >= 1.0 / double(a.size()) - kSlack && lambda <= 1.0 + kSlack,
          "recursive lis: lambda must lie in [1/n, 1]");
  res.accept = recursive_lis_at(a, lambda, lo, hi, ctx, seed, 0);
  res.depth = trace.deepest;
  res.accesses = counter->load() - before;
  res.oracle_calls = trace.oracle_calls;
  res.base_calls = trace.base_calls;
  res.lambda0 = trace.lambda0;
  return res;
}

inline RecursiveResult recursive_lis(SymbolView a, double lambda, const RecursionConfig& cfg, std::uint64_t seed,
                                     std::atomic<std::uint64_t>* reads = nullptr) {
  Symbol top = 0;
  for (Symbol v : a) top = std::max(top, v);
  return recursive_lis(a, lambda, 0, top, cfg, seed, reads);
}

struct RecursiveSweep {
  double lambda_accept = 0.0;  // 0 when nothing accepted
  std::size_t decisions = 0;
  std::uint64_t accesses = 0;
  int depth = 0;
};

// Largest grid λ that the recursive decision accepts, scanning 1, 1/(1+ε), ….
inline RecursiveSweep recursive_lis_sweep(SymbolView a, const RecursionConfig& cfg, std::uint64_t seed) {
  RecursiveSweep out;
  if (a.empty()) return out;
  std::atomic<std::uint64_t> reads{0};
  for (double lambda : lis_lambda_grid(cfg.eps, 1.0 / double(a.size()))) {
    const auto r = recursive_lis(a, lambda, cfg, mix_seed(seed, out.decisions), &reads);
    ++out.decisions;
    out.depth = std::max(out.depth, r.depth);
    if (r.accept) {
      out.lambda_accept = lambda;
      break;
    }
  }
  out.accesses = reads.load();
  return out;
}

// ln h_i(λ) = (2·4^{i−1} − 4)·ln λ − (2·4^{i−1} + 3·4^{i−2} − 7)·ln 256, for i ≥ 2.
inline double log_level_ratio(int i, double lambda) {
  require(i >= 2, "level ratio: i must be at least 2");
  require(lambda > 0.0 && lambda < 1.0, "level ratio: lambda must lie in (0,1)");
  const double p1 = std::pow(4.0, i - 1), p2 = std::pow(4.0, i - 2);
  return (2.0 * p1 - 4.0) * std::log(lambda) - (2.0 * p1 + 3.0 * p2 - 7.0) * std::log(256.0);
}

// ln of the ratio obtained by wrapping an f-approximate oracle once: f(λ⁴/2³²)·λ⁴/2³³.
inline double log_wrapped_ratio(const std::function<double(double)>& log_f, double lambda) {
  return log_f(std::pow(lambda, 4) / std::pow(2.0, 32)) + 4.0 * std::log(lambda) - 33.0 * std::log(2.0);
}

// ln of λ^{2·4^D}/256^{3·4^D} with D = ⌈1/κ⌉ − 1.
inline double log_recursive_ratio(double kappa, double lambda) {
  require(kappa > 0.0 && kappa < 1.0, "recursive ratio: kappa must lie in (0,1)");
  const double d = std::pow(4.0, std::ceil(1.0 / kappa - 1e-9) - 1.0);
  return 2.0 * d * std::log(lambda) - 3.0 * d * std::log(256.0);
}

}  // namespace lcslis
