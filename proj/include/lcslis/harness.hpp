// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lcslis/core.hpp"
#include "lcslis/exact.hpp"
#include "lcslis/lis_recursive.hpp"
#include "lcslis/lis_sublinear.hpp"
#include "lcslis/pipeline.hpp"
#include "lcslis/toml_lite.hpp"
#include "lcslis/util.hpp"

namespace lcslis {

enum class InstanceKind { RandomUniform, PlantedLcs, FootnoteTriple, LisSorted, LisBlockReversed, LisZeroed, Permutation };

inline const std::vector<std::pair<InstanceKind, std::string>>& instance_kind_names() {
  static const std::vector<std::pair<InstanceKind, std::string>> names = {
      {InstanceKind::RandomUniform, "random-uniform"},   {InstanceKind::PlantedLcs, "planted-lcs"},
      {InstanceKind::FootnoteTriple, "footnote-triple"}, {InstanceKind::LisSorted, "lis-sorted"},
      {InstanceKind::LisBlockReversed, "lis-block-reversed"}, {InstanceKind::LisZeroed, "lis-zeroed"},
      {InstanceKind::Permutation, "permutation"}};
  return names;
}

inline std::string to_string(InstanceKind k) {
  for (const auto& [kind, name] : instance_kind_names())
    if (kind == k) return name;
  return "?";
}

inline InstanceKind parse_instance_kind(const std::string& s) {
  for (const auto& [kind, name] : instance_kind_names())
    if (name == s) return kind;
  throw InputError("unknown instance kind: " + s);
}

inline bool is_lis_kind(InstanceKind k) {
  return k == InstanceKind::LisSorted || k == InstanceKind::LisBlockReversed || k == InstanceKind::LisZeroed ||
         k == InstanceKind::Permutation;
}
inline bool is_lcs_kind(InstanceKind k) {
  return k == InstanceKind::RandomUniform || k == InstanceKind::PlantedLcs || k == InstanceKind::FootnoteTriple ||
         k == InstanceKind::Permutation;
}

struct InstanceSpec {
  InstanceKind kind = InstanceKind::RandomUniform;
  std::size_t n = 0;
  Symbol alphabet_size = 4;
  double plant_lambda = 0.5;
  std::uint64_t seed = 1;
  bool operator==(const InstanceSpec&) const = default;
};

inline nlohmann::json to_json(const InstanceSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"n", s.n},
          {"alphabet_size", s.alphabet_size},
          {"plant_lambda", s.plant_lambda},
          {"seed", s.seed}};
}

inline InstanceSpec instance_spec_from_json(const nlohmann::json& j) {
  InstanceSpec s;
  s.kind = parse_instance_kind(j.at("kind").get<std::string>());
  s.n = j.at("n").get<std::size_t>();
  s.alphabet_size = j.value("alphabet_size", Symbol(4));
  s.plant_lambda = j.value("plant_lambda", 0.5);
  s.seed = j.value("seed", std::uint64_t(1));
  return s;
}

// LIS kinds put the array in `a`; permutation also sets b = identity so lcs(a, b) = lis(a).
struct Instance {
  InstanceSpec spec;
  Sequence a, b, c;
  Matching witness;  // planted instances: a common subsequence of (a, b) of the planted length
};

// Block length ⌊√n⌋; the last block may be short.
inline std::vector<Symbol> block_reversed(std::size_t n) {
  const std::size_t b = std::max<std::size_t>(1, std::size_t(std::sqrt(double(n)) + kSlack));
  std::vector<Symbol> out(n);
  for (std::size_t start = 0; start < n; start += b) {
    const std::size_t end = std::min(n, start + b);
    for (std::size_t i = start; i < end; ++i) out[i] = Symbol(start + (end - i));
  }
  return out;
}

inline Instance generate(const InstanceSpec& spec) {
  require(spec.n >= 1, "generate: n must be positive");
  require(spec.alphabet_size >= 1, "generate: alphabet_size must be positive");
  require(spec.plant_lambda >= 0.0 && spec.plant_lambda <= 1.0, "generate: plant_lambda must lie in [0,1]");
  require(spec.n < std::numeric_limits<Symbol>::max() - 1, "generate: n too large");
  Instance inst;
  inst.spec = spec;
  Rng rng(mix_seed(spec.seed, std::uint64_t(spec.kind) + 0x1000));
  const std::size_t n = spec.n;
  const auto uniform_seq = [&](std::size_t len) {
    std::vector<Symbol> s(len);
    for (auto& x : s) x = Symbol(uniform_index(rng, spec.alphabet_size));
    return s;
  };
  switch (spec.kind) {
    case InstanceKind::RandomUniform: {
      auto x = uniform_seq(n);
      auto y = uniform_seq(n);
      inst.a = Sequence(std::move(x), spec.alphabet_size);
      inst.b = Sequence(std::move(y), spec.alphabet_size);
      break;
    }
    case InstanceKind::PlantedLcs: {
      const std::size_t len = std::size_t(std::ceil(spec.plant_lambda * double(n) - kSlack));
      auto x = uniform_seq(n);
      auto y = uniform_seq(n);
      const auto planted = uniform_seq(len);
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::vector<std::size_t> pa, pb;
      std::sample(idx.begin(), idx.end(), std::back_inserter(pa), len, rng);
      std::sample(idx.begin(), idx.end(), std::back_inserter(pb), len, rng);
      for (std::size_t t = 0; t < len; ++t) {
        x[pa[t]] = planted[t];
        y[pb[t]] = planted[t];
        inst.witness.pairs.push_back({Index(pa[t]), Index(pb[t])});
      }
      inst.a = Sequence(std::move(x), spec.alphabet_size);
      inst.b = Sequence(std::move(y), spec.alphabet_size);
      ensure(verify_common_subsequence(inst.witness, inst.a, inst.b), "generate: planted witness does not verify");
      break;
    }
    case InstanceKind::FootnoteTriple: {
      require(n % 2 == 0, "generate: footnote-triple needs even n");
      std::vector<Symbol> mid(n, 0);
      std::fill(mid.begin() + std::ptrdiff_t(n / 2), mid.end(), 1);
      inst.a = Sequence(std::vector<Symbol>(n, 0), 2);
      inst.b = Sequence(std::move(mid), 2);
      inst.c = Sequence(std::vector<Symbol>(n, 1), 2);
      break;
    }
    case InstanceKind::LisSorted: {
      std::vector<Symbol> s(n);
      std::iota(s.begin(), s.end(), Symbol(1));
      inst.a = Sequence(std::move(s), Symbol(n + 1));
      break;
    }
    case InstanceKind::LisBlockReversed:
      inst.a = Sequence(block_reversed(n), Symbol(n + 1));
      break;
    case InstanceKind::LisZeroed: {
      std::vector<Symbol> s(n);
      std::iota(s.begin(), s.end(), Symbol(1));
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::vector<std::size_t> zero;
      std::sample(idx.begin(), idx.end(), std::back_inserter(zero), std::size_t(std::llround(double(n) / std::exp(1.0))),
                  rng);
      for (std::size_t i : zero) s[i] = 0;
      inst.a = Sequence(std::move(s), Symbol(n + 1));
      break;
    }
    case InstanceKind::Permutation: {
      std::vector<Symbol> p(n), id(n);
      std::iota(p.begin(), p.end(), Symbol(0));
      std::iota(id.begin(), id.end(), Symbol(0));
      std::shuffle(p.begin(), p.end(), rng);
      inst.a = Sequence(std::move(p), Symbol(n));
      inst.b = Sequence(std::move(id), Symbol(n));
      break;
    }
  }
  return inst;
}

// Least-squares slope of ln y against ln x.
inline double log_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "log_log_slope: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(xs[i] > 0 && ys[i] > 0, "log_log_slope: values must be positive");
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= double(xs.size());
  my /= double(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  require(sxx > 0, "log_log_slope: x values must differ");
  return sxy / sxx;
}

struct RunReport {
  InstanceSpec spec;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::optional<double> estimate;
  std::optional<double> exact;
  std::optional<double> ratio;
  std::map<std::string, std::uint64_t> counters;
  std::map<std::string, double> metrics;
  double wall_ms = 0.0;
  std::string error;
};

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j = {{"instance", to_json(r.spec)}, {"algorithm", r.algorithm}, {"seed", r.seed},
                      {"counters", r.counters}, {"metrics", r.metrics}, {"wall_ms", r.wall_ms}};
  j["estimate"] = r.estimate ? nlohmann::json(*r.estimate) : nlohmann::json(nullptr);
  j["exact"] = r.exact ? nlohmann::json(*r.exact) : nlohmann::json(nullptr);
  j["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json(nullptr);
  j["error"] = r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error);
  return j;
}

inline RunReport run_report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.spec = instance_spec_from_json(j.at("instance"));
  r.algorithm = j.at("algorithm").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("estimate").is_null()) r.estimate = j.at("estimate").get<double>();
  if (!j.at("exact").is_null()) r.exact = j.at("exact").get<double>();
  if (!j.at("ratio").is_null()) r.ratio = j.at("ratio").get<double>();
  r.counters = j.at("counters").get<std::map<std::string, std::uint64_t>>();
  r.metrics = j.value("metrics", std::map<std::string, double>{});
  r.wall_ms = j.at("wall_ms").get<double>();
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

struct MatrixConfig {
  std::vector<std::string> algorithms;
  std::vector<InstanceSpec> specs;
  std::vector<std::uint64_t> seeds{1};
  bool exact = true;
  std::size_t exact_limit = 1 << 15;  // LCS exact only up to this length
  unsigned threads = 1;
  LcsConfig lcs;
  LisConfig lis;
  RecursionConfig recursive;
};

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {"lcs-exact",       "lcs-approx-auto", "lcs-approx-quadratic",
                                                 "lcs-approx-cubic", "lis-exact",       "lis-approx",
                                                 "lis-recursive"};
  return names;
}

inline bool algorithm_applies(const std::string& algo, InstanceKind kind) {
  if (algo.rfind("lcs-", 0) == 0) return is_lcs_kind(kind);
  return is_lis_kind(kind);
}

// One run. Failures land in `error`; nothing propagates.
inline RunReport run_one(const std::string& algo, const InstanceSpec& spec, std::uint64_t seed,
                         const MatrixConfig& cfg) {
  RunReport r;
  r.algorithm = algo;
  r.seed = seed;
  r.spec = spec;
  try {
    const Instance inst = generate(spec);
    const bool lcs_side = algo.rfind("lcs-", 0) == 0;
    Stopwatch sw;
    if (algo == "lcs-exact") {
      r.estimate = double(lcs_exact(inst.a, inst.b).size());
      r.counters["dp_cells"] = std::uint64_t(inst.a.size()) * inst.b.size();
    } else if (algo.rfind("lcs-approx-", 0) == 0) {
      LcsConfig c = cfg.lcs;
      const std::string regime = algo.substr(11);
      c.regime = regime == "cubic" ? Regime::Cubic : regime == "quadratic" ? Regime::Quadratic : Regime::Auto;
      c.seed = seed;
      c.threads = 1;
      const auto rep = approx_lcs(inst.a, inst.b, c);
      r.estimate = double(rep.estimate);
      r.counters = rep.counters;
      r.metrics["lambda_final"] = rep.lambda_final;
      r.metrics["sweep_steps"] = double(rep.sweep_steps);
    } else if (algo == "lis-exact") {
      r.estimate = double(lis_exact(inst.a));
      r.counters["accesses"] = inst.a.size();
    } else if (algo == "lis-approx") {
      LisConfig c = cfg.lis;
      c.seed = seed;
      c.threads = 1;
      const auto res = lis_approx(inst.a, c);
      r.estimate = res.estimate;
      r.counters["accesses"] = res.accesses;
      r.counters["decisions"] = res.decisions;
      r.metrics["lambda_final"] = res.lambda_final;
    } else if (algo == "lis-recursive") {
      RecursionConfig c = cfg.recursive;
      c.threads = 1;
      const auto sw_res = recursive_lis_sweep(inst.a.view(), c, seed);
      // A certified lower bound: accepting at λ implies lis ≥ ratio(λ)·λ·n.
      const double lb = sw_res.lambda_accept > 0.0 && sw_res.lambda_accept < 1.0
                            ? std::exp(log_recursive_ratio(c.kappa, sw_res.lambda_accept)) * sw_res.lambda_accept *
                                  double(inst.a.size())
                            : 0.0;
      r.estimate = lb;
      r.counters["accesses"] = sw_res.accesses;
      r.counters["decisions"] = sw_res.decisions;
      r.metrics["lambda_accept"] = sw_res.lambda_accept;
      r.metrics["depth"] = sw_res.depth;
    } else {
      throw InputError("unknown algorithm: " + algo);
    }
    r.wall_ms = sw.ms();
    if (cfg.exact) {
      if (lcs_side && std::max(inst.a.size(), inst.b.size()) <= cfg.exact_limit) {
        r.exact = double(lcs_length(inst.a.view(), inst.b.view()));
      } else if (!lcs_side) {
        r.exact = double(lis_exact(inst.a));
      }
      if (r.exact && *r.exact > 0) r.ratio = *r.estimate / *r.exact;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

// Cross product specs × seeds × algorithms (inapplicable pairs skipped). Each matrix seed drives both instance
// generation and the algorithm's randomness.
inline std::vector<RunReport> run_matrix(const MatrixConfig& cfg) {
  struct Job {
    std::string algo;
    InstanceSpec spec;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& spec : cfg.specs)
    for (std::uint64_t seed : cfg.seeds)
      for (const auto& algo : cfg.algorithms) {
        if (!algorithm_applies(algo, spec.kind)) continue;
        InstanceSpec s = spec;
        s.seed = seed;
        jobs.push_back({algo, s, seed});
      }
  std::vector<RunReport> out(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t t) { out[t] = run_one(jobs[t].algo, jobs[t].spec, jobs[t].seed, cfg); });
  return out;
}

namespace detail {

template <typename T>
std::vector<T> scalar_or_list(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return {fallback};
  const auto& v = j.at(key);
  if (v.is_array()) {
    std::vector<T> out;
    for (const auto& x : v) out.push_back(x.get<T>());
    require(!out.empty(), std::string("matrix: empty list for ") + key);
    return out;
  }
  return {v.get<T>()};
}

}  // namespace detail

// Declarative matrix: top-level algorithms/seeds/exact/threads, [[instance]] entries (n, alphabet and plant_lambda
// may be lists and expand as a cross product), optional [lcs], [lis] and [recursive] tables.
inline MatrixConfig matrix_from_json(const nlohmann::json& j) {
  try {
    MatrixConfig cfg;
    cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    for (const auto& a : cfg.algorithms)
      require(std::find(known_algorithms().begin(), known_algorithms().end(), a) != known_algorithms().end(),
              "matrix: unknown algorithm " + a);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.exact = j.value("exact", true);
    cfg.exact_limit = j.value("exact_limit", cfg.exact_limit);
    cfg.threads = j.value("threads", 1u);
    if (j.contains("instance")) {
      for (const auto& inst : j.at("instance")) {
        const auto kind = parse_instance_kind(inst.at("kind").get<std::string>());
        for (auto n : detail::scalar_or_list<std::size_t>(inst, "n", 0))
          for (auto sigma : detail::scalar_or_list<Symbol>(inst, "alphabet", 4))
            for (auto pl : detail::scalar_or_list<double>(inst, "plant_lambda", 0.5))
              cfg.specs.push_back({kind, n, sigma, pl, 1});
      }
    }
    if (j.contains("lcs")) {
      const auto& l = j.at("lcs");
      cfg.lcs.eps = l.value("eps", cfg.lcs.eps);
      cfg.lcs.scale.anchors = l.value("anchor_scale", cfg.lcs.scale.anchors);
      cfg.lcs.scale.rounds = l.value("round_scale", cfg.lcs.scale.rounds);
      cfg.lcs.scale.nearby = l.value("nearby_scale", cfg.lcs.scale.nearby);
    }
    if (j.contains("lis")) {
      const auto& l = j.at("lis");
      cfg.lis.eps = l.value("eps", cfg.lis.eps);
      cfg.lis.delta = l.value("delta", cfg.lis.delta);
      cfg.lis.domain_sample_scale = l.value("domain_sample_scale", cfg.lis.domain_sample_scale);
      cfg.lis.eval_scale = l.value("eval_scale", cfg.lis.eval_scale);
    }
    if (j.contains("recursive")) {
      const auto& l = j.at("recursive");
      cfg.recursive.kappa = l.value("kappa", cfg.recursive.kappa);
      cfg.recursive.eps = l.value("eps", cfg.recursive.eps);
      cfg.recursive.domain_sample_scale = l.value("domain_sample_scale", cfg.recursive.domain_sample_scale);
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("matrix: ") + e.what());
  }
}

inline MatrixConfig load_matrix(const std::string& toml_text) { return matrix_from_json(toml::parse(toml_text)); }

inline void write_jsonl(std::ostream& out, const std::vector<RunReport>& reports) {
  for (const auto& r : reports) out << to_json(r).dump() << '\n';
}

inline std::vector<RunReport> read_jsonl(std::istream& in) {
  std::vector<RunReport> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    try {
      out.push_back(run_report_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("jsonl line " + std::to_string(no) + ": " + e.what());
    }
  }
  return out;
}

struct ScalingRow {
  std::string algorithm;
  InstanceKind kind;
  Symbol alphabet_size;
  double plant_lambda;
  std::string metric;
  double exponent;
  std::size_t points;
};

// Exponent of each counter (and wall time) in n, per (algorithm, instance family), using the per-n mean.
inline std::vector<ScalingRow> scaling_exponents(const std::vector<RunReport>& reports) {
  using Key = std::tuple<std::string, int, Symbol, double>;
  std::map<Key, std::map<std::string, std::map<std::size_t, std::vector<double>>>> series;
  for (const auto& r : reports) {
    if (!r.error.empty()) continue;
    auto& by_metric = series[{r.algorithm, int(r.spec.kind), r.spec.alphabet_size, r.spec.plant_lambda}];
    by_metric["wall_ms"][r.spec.n].push_back(r.wall_ms);
    for (const auto& [name, v] : r.counters) by_metric[name][r.spec.n].push_back(double(v));
  }
  std::vector<ScalingRow> out;
  for (const auto& [key, by_metric] : series) {
    for (const auto& [metric, by_n] : by_metric) {
      if (by_n.size() < 2) continue;
      std::vector<double> xs, ys;
      bool positive = true;
      for (const auto& [n, vals] : by_n) {
        const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / double(vals.size());
        if (mean <= 0) positive = false;
        xs.push_back(double(n));
        ys.push_back(mean);
      }
      if (!positive) continue;
      out.push_back({std::get<0>(key), InstanceKind(std::get<1>(key)), std::get<2>(key), std::get<3>(key), metric,
                     log_log_slope(xs, ys), xs.size()});
    }
  }
  return out;
}

struct Summary {
  std::size_t count = 0;
  double mean = 0, stddev = 0, min = 0, max = 0;
};

inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  s.count = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = v.size() > 1 ? std::sqrt(ss / double(v.size() - 1)) : 0.0;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

inline std::string render_markdown(const std::vector<RunReport>& reports) {
  std::ostringstream md;
  md << std::fixed << std::setprecision(4);
  md << "# Benchmark report\n\n## Ratios (estimate / exact)\n\n";
  md << "| algorithm | instance | n | runs | mean | stddev | min | max | mean wall ms |\n";
  md << "|---|---|---|---|---|---|---|---|---|\n";
  using Key = std::tuple<std::string, std::string, std::size_t>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : reports) {
    if (!r.error.empty()) continue;
    auto& g = groups[{r.algorithm, to_string(r.spec.kind), r.spec.n}];
    if (r.ratio) g.first.push_back(*r.ratio);
    g.second.push_back(r.wall_ms);
  }
  for (const auto& [key, g] : groups) {
    const auto s = summarize(g.first);
    const auto w = summarize(g.second);
    md << "| " << std::get<0>(key) << " | " << std::get<1>(key) << " | " << std::get<2>(key) << " | " << w.count;
    if (s.count)
      md << " | " << s.mean << " | " << s.stddev << " | " << s.min << " | " << s.max;
    else
      md << " | - | - | - | -";
    md << " | " << w.mean << " |\n";
  }
  md << "\n## Scaling exponents (log-log slope in n)\n\n";
  md << "| algorithm | instance | alphabet | plant_lambda | metric | exponent | points |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (const auto& row : scaling_exponents(reports)) {
    md << "| " << row.algorithm << " | " << to_string(row.kind) << " | " << row.alphabet_size << " | "
       << row.plant_lambda << " | " << row.metric << " | " << row.exponent << " | " << row.points << " |\n";
  }
  std::size_t failures = 0;
  for (const auto& r : reports) failures += r.error.empty() ? 0 : 1;
  if (failures) {
    md << "\n## Failed runs\n\n| algorithm | instance | n | seed | error |\n|---|---|---|---|---|\n";
    for (const auto& r : reports)
      if (!r.error.empty())
        md << "| " << r.algorithm << " | " << to_string(r.spec.kind) << " | " << r.spec.n << " | " << r.seed << " | "
           << r.error << " |\n";
  }
  return md.str();
}

}  // namespace lcslis
