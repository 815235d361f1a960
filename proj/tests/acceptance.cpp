// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "lcslis/assembly.hpp"
#include "lcslis/harness.hpp"
#include "lcslis/lis_recursive.hpp"
#include "lcslis/lis_sublinear.hpp"
#include "lcslis/pipeline.hpp"
#include "lcslis/sparsify_cubic.hpp"
#include "lcslis/sparsify_quadratic.hpp"
#include "oracles.hpp"

using namespace lcslis;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<SymbolView> views(const std::vector<std::vector<Symbol>>& ws) {
  return {ws.begin(), ws.end()};
}

std::vector<std::vector<Symbol>> mixed_family(std::mt19937_64& rng, std::size_t k) {
  const auto base = oracle::random_symbols(rng, 24, 3);
  std::vector<std::vector<Symbol>> out;
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t len = 8 + 4 * (rng() % 5);
    if (rng() % 2) {
      const std::size_t off = rng() % (base.size() - len + 1);
      std::vector<Symbol> w(base.begin() + std::ptrdiff_t(off), base.begin() + std::ptrdiff_t(off + len));
      for (auto& c : w)
        if (rng() % 8 == 0) c = Symbol(rng() % 3);
      out.push_back(std::move(w));
    } else {
      out.push_back(oracle::random_symbols(rng, len, 2 + Symbol(rng() % 3)));
    }
  }
  return out;
}

Verdict exact_layer() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::size_t lcs_bad = 0, lis_bad = 0;
  for (int t = 0; t < 500; ++t) {
    const Symbol sigma = 1 + Symbol(rng() % 4);
    const auto x = oracle::random_symbols(rng, rng() % 13, sigma), y = oracle::random_symbols(rng, rng() % 13, sigma);
    const auto m = lcs_exact(SymbolView(x), SymbolView(y));
    if (m.size() != oracle::lcs_memo(x, y) || !oracle::is_common_subsequence(m, x, y)) ++lcs_bad;
  }
  for (int t = 0; t < 500; ++t) {
    const auto a = oracle::random_symbols(rng, rng() % 201, 1 + Symbol(rng() % 300));
    if (lis_exact(a) != oracle::lis_quadratic(a)) ++lis_bad;
  }
  const double s = seconds_since(t0);
  return {lcs_bad == 0 && lis_bad == 0 && s < 10.0,
          std::to_string(lcs_bad) + " lcs and " + std::to_string(lis_bad) + " lis mismatches in 500+500, " +
              fmt("%.2f s", s)};
}

Verdict bounded_lcs() {
  std::mt19937_64 rng(202);
  std::size_t bad = 0;
  for (int t = 0; t < 500; ++t) {
    const Symbol sigma = 2 + Symbol(rng() % 4);
    const auto x = oracle::random_symbols(rng, 1 + rng() % 64, sigma);
    const auto y = oracle::random_symbols(rng, 1 + rng() % 64, sigma);
    const auto q = std::int64_t(1 + rng() % 65);
    const std::size_t truth = oracle::lcs_table(x, y);
    const auto got = lcs_bounded(SymbolView(x), SymbolView(y), q);
    const bool expect = std::int64_t(truth) >= q;
    if (got.has_value() != expect) ++bad;
    else if (got && (got->size() != std::size_t(q) || !oracle::is_common_subsequence(*got, x, y))) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " disagreements in 500 triples"};
}

Verdict cmp_dichotomy() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(303);
  std::size_t violations = 0, accept_side = 0, reject_side = 0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    const Symbol sigma = Symbol(2) << (rng() % 3);
    const double lt = (trial % 2) ? 0.25 : 0.5;
    const std::size_t len = 2 + rng() % 63;
    const auto base = oracle::random_symbols(rng, len, sigma);
    const auto mutate = [&](double rate) {
      auto w = base;
      for (auto& c : w)
        if (std::uniform_real_distribution<>(0, 1)(rng) < rate) c = Symbol(rng() % sigma);
      return w;
    };
    const double rate = double(rng() % 5) / 4.0;
    const auto wa = mutate(rate), wi = mutate(rate);
    auto wj = mutate(rate);
    if (trial % 3 == 0) {
      const double fresh = double(rng() % 4 + 7) / 10.0;
      for (auto& c : wj)
        if (std::uniform_real_distribution<>(0, 1)(rng) < fresh) c += sigma;
    }
    auto d = lcscmp_initial(SymbolView(wa), {SymbolView(wi), SymbolView(wj)}, lt);
    const double L = double(d.anchor_length());
    const auto witness = double(lcs_via_witness(d.opt(0), SymbolView(wa), SymbolView(wj)));
    const auto ans = lcscmp_query(d, 0, 1);
    if (witness >= lt * L - kSlack) {
      ++accept_side;
      if (!ans.accept) ++violations;
    }
    if (witness < lt * lt * L / 4.0 - kSlack) {
      ++reject_side;
      if (ans.accept) ++violations;
    }
    if (ans.accept && !verify_common_subsequence(ans.certificate, SymbolView(wi), SymbolView(wj))) ++violations;
  }
  const double s = seconds_since(t0);
  return {violations == 0 && s < 60.0,
          std::to_string(violations) + " violations in " + std::to_string(trials) + " triples (" +
              std::to_string(accept_side) + " on the accept side, " + std::to_string(reject_side) +
              " on the reject side), " + fmt("%.2f s", s)};
}

Verdict sparsifier_soundness() {
  std::size_t entries = 0, bad = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    const auto ws = mixed_family(rng, 20);
    const auto v = views(ws);

    QuadraticParams qp;
    qp.lambda = (seed % 2) ? 0.5 : 0.8;
    qp.eps = 0.2;
    qp.anchor_scale = 0.1;
    qp.seed = seed;
    sparsify_quadratic(v, qp).table.for_each([&](std::size_t i, std::size_t j, const TableEntry& e) {
      ++entries;
      bool ok = verify_common_subsequence(e.certificate, v[i], v[j]) && e.certificate.size() >= e.bound;
      if (e.source == Source::Direct)
        ok = ok && normalize_lcs(e.bound, v[i].size(), v[j].size()) >= e.lambda_level - kSlack;
      else
        ok = ok && double(e.bound) >= (1.0 - qp.eps) * std::pow(e.lambda_level, 3) *
                                             std::sqrt(double(v[i].size()) * double(v[j].size())) -
                                         kSlack;
      bad += ok ? 0 : 1;
    });

    CubicParams cp;
    cp.lambda = qp.lambda;
    cp.seed = seed;
    cp.round_scale = 0.05;
    sparsify_cubic(v, cp).table.for_each([&](std::size_t i, std::size_t j, const TableEntry& e) {
      ++entries;
      const std::size_t longer = std::max(v[i].size(), v[j].size());
      const bool ok = verify_common_subsequence(e.certificate, v[i], v[j]) && e.certificate.size() >= e.bound &&
                      double(e.bound) >= cubic_accept_bound(e.lambda_level, longer) - kSlack;
      bad += ok ? 0 : 1;
    });
  }
  return {bad == 0 && entries > 0,
          std::to_string(bad) + " bad of " + std::to_string(entries) + " flagged entries over 50 seeds x 2 sparsifiers"};
}

WindowSet span_set(Side side, const std::vector<oracle::Span>& spans) {
  WindowSet s;
  int layer = 0;
  for (const auto& sp : spans) s.windows.push_back({side, sp.left, sp.length, layer++, 0});
  detail::finalize(s);
  return s;
}

Verdict window_dp_optimal() {
  std::mt19937_64 rng(505);
  std::size_t bad = 0;
  const auto spans = [&](Index n) {
    std::vector<oracle::Span> out;
    const std::size_t count = 1 + rng() % 6;
    for (std::size_t t = 0; t < count; ++t) {
      const Index len = 1 + Index(rng() % std::min<Index>(n, 8));
      out.push_back({Index(rng() % (n - len + 1)), len});
    }
    return out;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 6 + Index(rng() % 20);
    const Symbol sigma = 2 + Symbol(rng() % 3);
    const Sequence a(oracle::random_symbols(rng, n, sigma), sigma), b(oracle::random_symbols(rng, n, sigma), sigma);
    const auto sa = spans(n), sb = spans(n);
    WindowPair w;
    w.scheme.n = n;
    w.a = span_set(Side::A, sa);
    w.b = span_set(Side::B, sb);
    const auto v = window_views(w, a, b);
    std::vector<Index> lengths;
    for (const auto& x : v) lengths.push_back(Index(x.size()));
    EstimateTable table(lengths);
    for (std::size_t i = 0; i < sa.size(); ++i)
      for (std::size_t jb = 0; jb < sb.size(); ++jb) {
        auto m = lcs_exact(v[i], v[sa.size() + jb]);
        const auto size = Index(m.size());
        if (size) table.offer(i, sa.size() + jb, size, Source::Direct, 1.0, std::move(m));
      }
    const auto r = window_dp(w, table);
    const auto best = oracle::best_window_pairing(sa, sb, [&](std::size_t x, std::size_t y) {
      const auto wy = v[sa.size() + y];
      return oracle::lcs_table({v[x].begin(), v[x].end()}, {wy.begin(), wy.end()});
    });
    if (r.value != best || !verify_common_subsequence(r.certificate, a, b)) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " mismatches against exhaustive pairing in 200 cases"};
}

Verdict end_to_end_lcs() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(606);
  std::size_t over = 0, uncertified = 0, runs = 0;
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 32 + rng() % 481;
    if (t % 50 == 0) n = 2048;
    else if (t % 25 == 0) n = 1024;
    InstanceSpec spec;
    spec.kind = (t % 3 == 0) ? InstanceKind::PlantedLcs : InstanceKind::RandomUniform;
    spec.n = n;
    spec.alphabet_size = 2 + Symbol(rng() % 7);
    spec.plant_lambda = 0.3 + 0.1 * double(rng() % 6);
    spec.seed = std::uint64_t(t) + 1;
    const auto inst = generate(spec);
    LcsConfig cfg;
    cfg.regime = (t % 2) ? Regime::Cubic : Regime::Quadratic;
    cfg.seed = spec.seed;
    const auto rep = approx_lcs(inst.a, inst.b, cfg);
    ++runs;
    if (rep.estimate > lcs_length(inst.a.view(), inst.b.view())) ++over;
    if (rep.certificate.size() != rep.estimate || !verify_common_subsequence(rep.certificate, inst.a, inst.b))
      ++uncertified;
  }
  std::mt19937_64 rng2(607);
  const Sequence same(oracle::random_symbols(rng2, 256, 4), 4);
  LcsConfig cfg;
  cfg.regime = Regime::Quadratic;
  cfg.eps = 0.01;
  const auto rep = approx_lcs(same, same, cfg);
  const double s = seconds_since(t0);
  return {over == 0 && uncertified == 0 && rep.estimate >= 230,
          std::to_string(over) + " overestimates and " + std::to_string(uncertified) + " uncertified in " +
              std::to_string(runs) + " runs; A=B n=256 gives " + std::to_string(rep.estimate) + " (need 230), " +
              fmt("%.1f s", s)};
}

Verdict lis_separation() {
  const std::size_t n = 10000;
  std::vector<Symbol> sorted(n);
  std::iota(sorted.begin(), sorted.end(), Symbol(1));
  const auto rev = block_reversed(n);
  std::size_t accepted = 0, rejected = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    LisConfig cfg;
    cfg.seed = seed;
    accepted += lis_decide(SymbolView(sorted), 0.5, cfg).accept ? 1 : 0;
    rejected += lis_decide(SymbolView(rev), 0.5, cfg).accept ? 0 : 1;
  }
  return {accepted >= 18 && rejected >= 18,
          "sorted accepted " + std::to_string(accepted) + "/20, block-reversed rejected " + std::to_string(rejected) +
              "/20"};
}

Verdict estimator_unbiased() {
  std::mt19937_64 rng0(808);
  const auto a = oracle::random_symbols(rng0, 400, 1000);
  const SubarrayGrid g(SymbolView(a), 20);
  PseudoSolution ps;
  for (std::size_t i = 0; i < g.count(); ++i)
    ps.intervals.push_back(ValueInterval{Symbol(50 * i), Symbol(50 * i + 49)});
  const double q = double(pseudo_solution_quality(g, ps));
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    Rng rng(seed);
    sum += evaluate_pseudo_solutions(g, {ps}, 0.3, rng).estimates[0];
  }
  const double mean = sum / 1000.0;
  Rng rng(1);
  const double full = evaluate_pseudo_solutions(g, {ps}, 1.0, rng).estimates[0];
  const double rel = std::abs(mean - q) / q;
  return {q > 0 && rel <= 0.05 && full == q,
          "q = " + fmt("%.0f", q) + ", mean of 1000 at p=0.3 = " + fmt("%.2f", mean) + " (" + fmt("%.2f%%", 100 * rel) +
              " off), p=1 gives " + fmt("%.0f", full)};
}

Verdict lis_sublinear_accesses() {
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t acc[2] = {0, 0};
  double rate[2] = {0, 0};
  int idx = 0;
  for (std::size_t n : {10000u, 1000000u}) {
    std::vector<Symbol> sorted(n);
    std::iota(sorted.begin(), sorted.end(), Symbol(1));
    LisConfig cfg;
    cfg.seed = 1;
    const auto d = lis_decide(SymbolView(sorted), 0.5, cfg);
    acc[idx] = d.accesses;
    rate[idx] = d.rate;
    ++idx;
  }
  const double ratio = double(acc[1]) / double(acc[0]);
  const double s = seconds_since(t0);
  return {ratio <= 15.0 && s < 300.0,
          "accesses " + std::to_string(acc[0]) + " -> " + std::to_string(acc[1]) + ", ratio " + fmt("%.1f", ratio) +
              " (limit 15); evaluation rate " + fmt("%g", rate[0]) + " and " + fmt("%g", rate[1]) + ", " +
              fmt("%.1f s", s)};
}

Verdict cubic_work_exponent() {
  std::uint64_t calls[2] = {0, 0};
  std::size_t rounds[2] = {0, 0};
  const std::size_t ks[2] = {64, 256};
  for (int t = 0; t < 2; ++t) {
    std::mt19937_64 rng(1010);
    const auto ws = mixed_family(rng, ks[t]);
    CubicParams p;
    p.lambda = 0.5;
    p.seed = 1;
    const auto res = sparsify_cubic(views(ws), p);
    calls[t] = res.counters.at("lcs_exact_calls");
    for (const auto& run : res.runs) rounds[t] = std::max(rounds[t], run.rounds);
  }
  const double exponent = log_log_slope({double(ks[0]), double(ks[1])}, {double(calls[0]), double(calls[1])});
  return {exponent <= 1.8,
          "exponent " + fmt("%.3f", exponent) + " (limit 1.8); calls " + std::to_string(calls[0]) + " -> " +
              std::to_string(calls[1]) + ", anchor rounds " + std::to_string(rounds[0]) + " and " +
              std::to_string(rounds[1]) + " against k = 64 and 256"};
}

Verdict recursive_lis_check() {
  const std::size_t n = 4096;
  std::vector<Symbol> sorted(n);
  std::iota(sorted.begin(), sorted.end(), Symbol(1));
  const auto rev = block_reversed(n);
  RecursionConfig cfg;
  cfg.kappa = 1.0 / 3.0;
  std::size_t accepted = 0, rejected = 0, internal_bad = 0;
  const auto check = [&](const RecursiveResult& r, double lambda) {
    if (r.depth > r.plan.max_depth || r.depth != 1) ++internal_bad;
    for (const auto& [depth, pairs] : r.lambda0) {
      double expect = lambda;
      for (int d = 0; d <= depth; ++d) expect = oracle_lambda(expect);
      for (const auto& [l, l0] : pairs)
        if (std::abs(l0 - std::pow(l / 256.0, 4)) > 1e-12 * l0 || std::abs(l0 - expect) > 1e-12 * expect) ++internal_bad;
    }
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = recursive_lis(SymbolView(sorted), 0.5, cfg, seed);
    const auto b = recursive_lis(SymbolView(rev), 0.5, cfg, seed);
    check(a, 0.5);
    check(b, 0.5);
    accepted += a.accept ? 1 : 0;
    rejected += b.accept ? 0 : 1;
  }
  return {accepted >= 18 && rejected >= 18 && internal_bad == 0,
          "sorted accepted " + std::to_string(accepted) + "/20, block-reversed rejected " + std::to_string(rejected) +
              "/20, " + std::to_string(internal_bad) + " depth/lambda0 violations; oracle threshold lambda0 = " +
              fmt("%.3g", oracle_lambda(0.5))};
}

Verdict structural_identities() {
  std::mt19937_64 rng(1212);
  std::size_t bad = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 40;
    const Symbol sigma = 2 + Symbol(rng() % 4);
    const auto x = oracle::random_symbols(rng, n, sigma), y = oracle::random_symbols(rng, n, sigma);
    const double ed = double(oracle::indel_distance(x, y)) / double(2 * n);
    const std::size_t l = lcs_exact(SymbolView(x), SymbolView(y)).size();
    const double lcs = normalize_lcs(l, n, n);
    if (std::abs(ed + lcs - 1.0) > 1e-12 || std::abs(ed_lcs_duality(n, l) - ed) > 1e-12) ++bad;
  }
  InstanceSpec spec;
  spec.kind = InstanceKind::FootnoteTriple;
  spec.n = 8;
  const auto inst = generate(spec);
  const double ab = normalize_lcs(lcs_exact(inst.a, inst.b), 8, 8);
  const double bc = normalize_lcs(lcs_exact(inst.b, inst.c), 8, 8);
  const double ac = normalize_lcs(lcs_exact(inst.a, inst.c), 8, 8);
  const bool triple = ab == 0.5 && bc == 0.5 && ac == 0.0;
  return {bad == 0 && triple, std::to_string(bad) + " duality failures in 100 pairs; footnote triple scores (" +
                                  fmt("%.2f", ab) + ", " + fmt("%.2f", bc) + ", " + fmt("%.2f", ac) + ")"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"exact layer matches brute force", exact_layer},
      {"bounded lcs threshold decisions", bounded_lcs},
      {"lcs-cmp dichotomy", cmp_dichotomy},
      {"sparsifier certificates and bounds", sparsifier_soundness},
      {"window dp optimality", window_dp_optimal},
      {"end-to-end lcs soundness", end_to_end_lcs},
      {"lis decision separation at n=1e4", lis_separation},
      {"estimator unbiasedness", estimator_unbiased},
      {"sublinear lis accesses", lis_sublinear_accesses},
      {"subquadratic cubic sparsifier work", cubic_work_exponent},
      {"recursive lis separation at n=4096", recursive_lis_check},
      {"structural identities", structural_identities},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Verdict v;
    try {
      v = criteria[c].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (c + 1) << ": " << criteria[c].first << " | "
              << v.detail << std::endl;
  }
  std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
