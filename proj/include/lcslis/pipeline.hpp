// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lcslis/assembly.hpp"
#include "lcslis/core.hpp"
#include "lcslis/exact.hpp"
#include "lcslis/sparsify_cubic.hpp"
#include "lcslis/sparsify_quadratic.hpp"
#include "lcslis/table.hpp"
#include "lcslis/util.hpp"
#include "lcslis/windows.hpp"

namespace lcslis {

// Multipliers on the sampling constants (quadratic anchors, cubic rounds, nearby rate).
struct ScaleOverrides {
  double anchors = 1.0;
  double rounds = 1.0;
  double nearby = 1.0;
};

struct LcsConfig {
  Regime regime = Regime::Auto;
  double eps = 0.1;
  std::optional<Index> d;         // default: ⌈√n·λ⌉ cubic, ⌈√n⌉ quadratic
  std::optional<double> gamma;    // default: 2/3 cubic, 1/10 quadratic
  std::optional<double> eta;      // default: 0.65 cubic, ε′λ³/(800·layers·gap) quadratic
  std::optional<double> eps_nbs;  // default: λ⁴ cubic, λ³ quadratic
  std::uint64_t seed = 1;
  ScaleOverrides scale;
  double quadratic_window_eps_floor = 0.5;
  double cubic_target_constant = 1.0 / 256.0;
  double kappa_exponent = 1.0 / 140.0;  // κ = n^{-kappa_exponent}
  double auto_quadratic_min_lambda = 0.1;
  unsigned threads = 1;
};

struct LcsReport {
  std::size_t estimate = 0;
  Matching certificate;
  double lambda_final = 0.0;
  bool accepted = false;
  std::string branch;  // main | small | empty | disjoint | baseline | exhausted
  Regime regime = Regime::Auto;
  std::size_t n = 0;
  std::size_t len_a = 0, len_b = 0;
  bool padded = false;
  std::size_t sweep_steps = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::uint64_t> counters;
  std::map<std::string, double> timings_ms;
};

struct SmallBranchResult {
  bool accepted = false;
  std::size_t sample_size = 0;
  std::size_t q = 0;
  Matching matching;  // original A positions -> B positions, size q on accept
};

// Samples ⌈nλ³⌉ positions of A and tests lcs(A', B) >= ⌈(1-ε)λ⁴n⌉.
inline SmallBranchResult small_lambda_branch(const Sequence& a, const Sequence& b, double lambda, double eps,
                                             std::uint64_t seed, Counters* counters = nullptr) {
  require(lambda > 0.0 && lambda <= 1.0, "small_lambda_branch: lambda must lie in (0,1]");
  SmallBranchResult res;
  const std::size_t n = a.size();
  if (n == 0 || b.size() == 0) return res;
  const double l3 = lambda * lambda * lambda;
  res.sample_size = std::min<std::size_t>(n, std::size_t(std::ceil(double(n) * l3 - kSlack)));
  res.q = std::max<std::size_t>(1, std::size_t(std::ceil((1.0 - eps) * l3 * lambda * double(n) - kSlack)));
  std::vector<Index> pick(n);
  for (std::size_t t = 0; t < n; ++t) pick[t] = Index(t);
  Rng rng(seed);
  std::shuffle(pick.begin(), pick.end(), rng);
  pick.resize(res.sample_size);
  std::sort(pick.begin(), pick.end());
  std::vector<Symbol> sub;
  sub.reserve(pick.size());
  for (Index p : pick) sub.push_back(a[p]);
  if (res.q > sub.size()) return res;
  auto got = lcs_bounded(SymbolView(sub), b.view(), std::int64_t(res.q), counters);
  if (!got) return res;
  res.accepted = true;
  for (const auto& p : got->pairs) res.matching.pairs.push_back({pick[p.i], p.j});
  return res;
}

// Geometric grid {ελ, ελ(1+ε), ...} below 1, plus 1.
inline std::vector<double> lambda_prime_grid(double lambda, double eps) {
  std::vector<double> g;
  for (double v = eps * lambda; v < 1.0 - kSlack; v *= (1.0 + eps)) g.push_back(v);
  g.push_back(1.0);
  return g;
}

namespace detail {

struct Candidate {
  std::size_t value = 0;
  Matching certificate;
};

struct QuadraticState {
  WindowPair w;
  std::vector<SymbolView> views;
  std::unique_ptr<OptCache> cache;
  std::unique_ptr<QuadraticSparsifier> sparsifier;
  NearbyState nearby;
  EstimateTable table;
  double sparsified_low = 2.0;  // lowest λ′ the sparsifier has run at
  double nearby_floor = 2.0;    // ignore threshold of the last nearby pass
  double nearby_next = -1.0;    // largest ν below that threshold among sampled pairs
  std::size_t version = 0, dp_version = SIZE_MAX;
  Candidate dp;
};

struct CubicTrialState {
  Sequence x, y;
  WindowPair w;
  std::vector<SymbolView> views;
  std::unique_ptr<OptCache> cache;
  LayerCache layers;
  EstimateTable table;
  std::vector<double> levels_done;
};

inline Sequence pad_to(const Sequence& s, std::size_t n, Symbol dummy, Symbol alphabet) {
  std::vector<Symbol> v = s.symbols;
  v.resize(n, dummy);
  return Sequence(std::move(v), alphabet);
}

}  // namespace detail

class LcsPipeline {
 public:
  LcsPipeline(const Sequence& a, const Sequence& b, LcsConfig cfg) : cfg_(std::move(cfg)) {
    require(cfg_.eps > 0.0 && cfg_.eps < 1.0, "approx_lcs: eps must lie in (0,1)");
    report_.len_a = a.size();
    report_.len_b = b.size();
    report_.seed = cfg_.seed;
    n_ = std::max(a.size(), b.size());
    report_.n = n_;
    const Symbol alphabet = std::max(a.alphabet_size, b.alphabet_size);
    const Symbol dummy = alphabet;
    report_.padded = a.size() != b.size();
    a_ = detail::pad_to(a, n_, dummy, alphabet + 1);
    b_ = detail::pad_to(b, n_, dummy, alphabet + 1);
    // Only the shorter side carries the dummy, so it never matches.
  }

  LcsReport run() {
    Stopwatch total;
    report_.regime = cfg_.regime;
    if (report_.len_a == 0 || report_.len_b == 0) return finish("empty", 0.0, true, total);
    if (disjoint()) return finish("disjoint", 1.0, true, total);

    const double eps_q = cfg_.eps / 200.0;
    double lambda = 1.0;
    const double floor = 1.0 / double(n_);
    while (lambda >= floor - kSlack) {
      ++report_.sweep_steps;
      const Regime r = pick(lambda);
      report_.regime = r;
      bool ok = false;
      if (r == Regime::Quadratic) {
        ok = quadratic_step(lambda, eps_q);
        if (ok) return finish("main", lambda, true, total);
        lambda *= (1.0 - eps_q);
      } else {
        const double kappa = std::pow(double(n_), -cfg_.kappa_exponent);
        if (lambda <= kappa + kSlack && lambda < 1.0) {
          ok = small_step(lambda);
          if (ok) return finish("small", lambda, true, total);
        } else {
          ok = cubic_step(lambda);
          if (ok) return finish("main", lambda, true, total);
        }
        lambda *= (1.0 - cfg_.eps);
      }
    }
    return finish("exhausted", lambda, false, total);
  }

 private:
  Regime pick(double lambda) const {
    if (cfg_.regime != Regime::Auto) return cfg_.regime;
    return lambda >= cfg_.auto_quadratic_min_lambda - kSlack ? Regime::Quadratic : Regime::Cubic;
  }

  bool disjoint() const {
    std::vector<char> seen(std::size_t(a_.alphabet_size) + 1, 0);
    for (std::size_t t = 0; t < report_.len_a; ++t) seen[a_[t]] = 1;
    for (std::size_t t = 0; t < report_.len_b; ++t)
      if (seen[b_[t]]) return false;
    return true;
  }

  void offer(std::size_t value, Matching cert) {
    if (value > best_.value) {
      ensure(cert.size() == value, "approx_lcs: certificate size differs from value");
      best_.value = value;
      best_.certificate = std::move(cert);
    }
  }

  void time(const char* stage, const Stopwatch& sw) { report_.timings_ms[stage] += sw.ms(); }

  bool quadratic_step(double lambda, double eps_q) {
    const Index d = cfg_.d ? *cfg_.d : Index(std::ceil(std::sqrt(double(n_)) - kSlack));
    const double eps0 = std::max(eps_q * lambda, cfg_.quadratic_window_eps_floor);
    const auto key = std::make_tuple(d, eps0);
    auto& slot = quad_[key];
    if (!slot) {
      Stopwatch sw;
      slot = std::make_unique<detail::QuadraticState>();
      slot->w = build_windows_quadratic(Index(n_), std::min<Index>(d, Index(n_)), eps0);
      slot->views = window_views(slot->w, a_, b_);
      slot->table = EstimateTable([&] {
        std::vector<Index> l;
        for (auto v : slot->views) l.push_back(Index(v.size()));
        return l;
      }());
      auto* views = &slot->views;
      slot->cache = std::make_unique<OptCache>([views](std::size_t t) { return (*views)[t]; }, &counters_);
      QuadraticParams qp;
      qp.eps = eps_q;
      qp.gamma = cfg_.gamma.value_or(0.1);
      qp.seed = mix_seed(cfg_.seed, 0x51);
      qp.anchor_scale = cfg_.scale.anchors;
      qp.scope.split = slot->w.a.size();
      qp.threads = cfg_.threads;
      slot->sparsifier = std::make_unique<QuadraticSparsifier>(slot->views, qp, slot->cache.get(), &counters_);
      time("windows", sw);
    }
    auto& st = *slot;
    const double low = cfg_.eps * lambda;
    // Re-sparsify on grid granularity: each time the low level drops by a (1+ε) factor.
    if (low * (1.0 + cfg_.eps) <= st.sparsified_low + kSlack) {
      Stopwatch sw;
      st.sparsifier->run(low, lambda_prime_grid(lambda, cfg_.eps));
      merge_into(st.table, st.sparsifier->table());
      st.sparsified_low = low;
      ++st.version;
      st.nearby_next = 2.0;  // force a nearby pass after new step-1 output
      time("sparsify", sw);
    }
    if (low < st.nearby_floor - kSlack && low <= st.nearby_next + kSlack) {
      Stopwatch sw;
      const double l3 = lambda * lambda * lambda;
      const double gap = std::max(st.w.a.w_gap, st.w.b.w_gap);
      const double layers = double(std::max(st.w.a.w_layers, st.w.b.w_layers));
      const double eta = cfg_.eta.value_or(eps_q * l3 / (800.0 * std::max(1.0, layers) * std::max(1.0, gap)));
      const auto np = make_nearby_params(n_, st.w.k(), eta, cfg_.eps_nbs.value_or(l3),
                                         std::max(st.w.a.w_max, st.w.b.w_max), cfg_.scale.nearby);
      Underestimate rule{Regime::Quadratic, cfg_.eps, low};
      auto res = nearby_search(st.w, st.table, np, rule, mix_seed(cfg_.seed, 0x52), *st.cache, &counters_, &st.nearby,
                               cfg_.threads);
      if (res.repairs > 0) {
        st.table = std::move(res.table);
        ++st.version;
      }
      st.nearby_floor = low;
      st.nearby_next = -1.0;
      const std::size_t ka = st.w.a.size();
      for (std::size_t i : res.sampled) {
        for (std::size_t jb = 0; jb < st.w.b.size(); ++jb) {
          const Matching* m = st.cache->find(i, ka + jb);
          if (!m) continue;
          const double nu = normalize_lcs(m->size(), st.w.a[i].length, st.w.b[jb].length);
          if (nu < low - kSlack) st.nearby_next = std::max(st.nearby_next, nu);
        }
      }
      time("nearby", sw);
    }
    if (st.dp_version != st.version) {
      Stopwatch sw;
      auto dp = window_dp(st.w, st.table, &counters_);
      st.dp = {dp.value, std::move(dp.certificate)};
      st.dp_version = st.version;
      time("dp", sw);
    }
    offer(st.dp.value, st.dp.certificate);
    const double target = (1.0 - cfg_.eps) * lambda * lambda * lambda * double(n_);
    return double(best_.value) >= target - kSlack && best_.value > 0;
  }

  bool cubic_step(double lambda) {
    const Index d = cfg_.d ? *cfg_.d : Index(std::ceil(std::sqrt(double(n_)) * lambda - kSlack));
    const double eps0 = cfg_.eps * lambda;
    const auto trials = mapping_trials(a_, b_);
    const auto grid = lambda_prime_grid(lambda, cfg_.eps);
    for (int t = 0; t < 4; ++t) {
      const auto key = std::make_tuple(t, std::max<Index>(1, std::min<Index>(d, Index(n_))), eps0);
      auto& slot = cubic_[key];
      if (!slot) {
        Stopwatch sw;
        slot = std::make_unique<detail::CubicTrialState>();
        slot->x = trials[std::size_t(t)].first;
        slot->y = trials[std::size_t(t)].second;
        slot->w = build_windows_cubic(Index(n_), std::get<1>(key), eps0);
        slot->views = window_views(slot->w, slot->x, slot->y);
        std::vector<Index> l;
        for (auto v : slot->views) l.push_back(Index(v.size()));
        slot->table = EstimateTable(l);
        auto* views = &slot->views;
        slot->cache = std::make_unique<OptCache>([views](std::size_t s) { return (*views)[s]; }, &counters_);
        time("windows", sw);
      }
      auto& st = *slot;
      Stopwatch sw;
      std::vector<double> todo;
      for (double lp : grid)
        if (std::find(st.levels_done.begin(), st.levels_done.end(), lp) == st.levels_done.end()) todo.push_back(lp);
      if (!todo.empty()) {
        CubicParams cp;
        cp.lambda = todo.front();
        cp.grid = todo;
        cp.gamma = cfg_.gamma.value_or(2.0 / 3.0);
        cp.seed = mix_seed(cfg_.seed, 0xC0 + std::uint64_t(t));
        cp.round_scale = cfg_.scale.rounds;
        cp.scope.split = st.w.a.size();
        cp.threads = cfg_.threads;
        auto res = sparsify_cubic(st.views, cp, st.cache.get(), &counters_, &st.layers);
        merge_into(st.table, res.table);
        st.levels_done.insert(st.levels_done.end(), todo.begin(), todo.end());
      }
      time("sparsify", sw);
      Stopwatch swn;
      const double l4 = std::pow(lambda, 4);
      const auto np = make_nearby_params(n_, st.w.k(), cfg_.eta.value_or(0.65), cfg_.eps_nbs.value_or(l4),
                                         std::max(st.w.a.w_max, st.w.b.w_max), cfg_.scale.nearby);
      Underestimate rule{Regime::Cubic, cfg_.eps, cfg_.eps * lambda};
      auto nres = nearby_search(st.w, st.table, np, rule, mix_seed(cfg_.seed, 0xD0 + std::uint64_t(t)), *st.cache,
                                &counters_, nullptr, cfg_.threads);
      st.table = std::move(nres.table);
      time("nearby", swn);
      Stopwatch swd;
      auto dp = window_dp(st.w, st.table, &counters_);
      offer(dp.value, map_trial_matching(t, dp.certificate, n_));
      time("dp", swd);
    }
    const double target = cfg_.cubic_target_constant * std::pow(lambda, 4) * double(n_);
    return double(best_.value) >= target - kSlack && best_.value > 0;
  }

  bool small_step(double lambda) {
    Stopwatch sw;
    auto res = small_lambda_branch(a_, b_, lambda, cfg_.eps, mix_seed(cfg_.seed, 0xE0 + report_.sweep_steps),
                                   &counters_);
    time("small_branch", sw);
    if (!res.accepted) return false;
    const std::size_t size = res.matching.size();
    offer(size, std::move(res.matching));
    return true;
  }

  LcsReport finish(const char* branch, double lambda, bool accepted, const Stopwatch& total) {
    report_.branch = branch;
    report_.lambda_final = lambda;
    report_.accepted = accepted;
    // Drop pairs that touch padding (none can match, but keep the certificate inside true lengths).
    Matching cert;
    for (const auto& p : best_.certificate.pairs)
      if (p.i < report_.len_a && p.j < report_.len_b) cert.pairs.push_back(p);
    ensure(cert.size() == best_.certificate.size(), "approx_lcs: certificate touches padding");
    report_.certificate = std::move(cert);
    report_.estimate = report_.certificate.size();
    report_.counters = counters_.snapshot();
    report_.timings_ms["total"] = total.ms();
    return std::move(report_);
  }

  LcsConfig cfg_;
  Sequence a_, b_;
  std::size_t n_ = 0;
  Counters counters_;
  LcsReport report_;
  detail::Candidate best_;
  std::map<std::tuple<Index, double>, std::unique_ptr<detail::QuadraticState>> quad_;
  std::map<std::tuple<int, Index, double>, std::unique_ptr<detail::CubicTrialState>> cubic_;
};

inline LcsReport approx_lcs(const Sequence& a, const Sequence& b, const LcsConfig& cfg) {
  LcsPipeline p(a, b, cfg);
  auto rep = p.run();
  ensure(verify_common_subsequence(rep.certificate, a, b), "approx_lcs: certificate does not verify");
  return rep;
}

inline LcsReport lcs_balanced_alphabet(const Sequence& a, const Sequence& b, const LcsConfig& cfg) {
  const std::size_t n = std::max(a.size(), b.size());
  const Symbol sigma = std::max(a.alphabet_size, b.alphabet_size);
  std::vector<std::size_t> ca(sigma, 0), cb(sigma, 0);
  for (Symbol c : a.symbols) ++ca[c];
  for (Symbol c : b.symbols) ++cb[c];
  std::size_t baseline = 0;
  Symbol best = 0;
  for (Symbol c = 0; c < sigma; ++c) {
    if (std::min(ca[c], cb[c]) > baseline) {
      baseline = std::min(ca[c], cb[c]);
      best = c;
    }
  }
  require(double(baseline) >= double(n) / double(sigma) - kSlack,
          "lcs balanced: no symbol occurs n/|alphabet| times in both inputs");
  LcsReport rep = approx_lcs(a, b, cfg);
  if (baseline > rep.estimate) {
    Matching m;
    std::size_t pi = 0, pj = 0;
    while (m.size() < baseline) {
      while (a[pi] != best) ++pi;
      while (b[pj] != best) ++pj;
      m.pairs.push_back({Index(pi++), Index(pj++)});
    }
    rep.certificate = std::move(m);
    rep.estimate = baseline;
    rep.branch = "baseline";
  }
  return rep;
}

}  // namespace lcslis
