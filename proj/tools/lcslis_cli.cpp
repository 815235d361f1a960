// SPDX-License-Identifier: Apache-2.0
// lcslis: command-line front end. stdout carries the answer only; progress goes to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lcslis/harness.hpp"
#include "lcslis/io.hpp"
#include "lcslis/lis_recursive.hpp"
#include "lcslis/lis_sublinear.hpp"
#include "lcslis/pipeline.hpp"
#include "lcslis/windows.hpp"

using nlohmann::json;
namespace ll = lcslis;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string report;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--report", c.report, "write a JSON report to this path");
  cmd->add_option("--threads", c.threads, "cap on worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

ll::InputMode parse_mode(const std::string& m) {
  if (m == "text") return ll::InputMode::Text;
  if (m == "numeric") return ll::InputMode::Numeric;
  throw ll::InputError("unknown input mode: " + m);
}

void emit_report(const Common& c, const std::string& command, json params, json result,
                 const std::map<std::string, std::uint64_t>& counters, const std::map<std::string, double>& timings) {
  if (c.report.empty()) return;
  json j = {{"tool", "lcslis"},
            {"command", command},
            {"seed", c.seed},
            {"params", std::move(params)},
            {"result", std::move(result)},
            {"counters", counters},
            {"timings", timings}};
  std::ofstream out(c.report);
  if (!out) throw ll::InputError("cannot write report: " + c.report);
  out << j.dump(2) << '\n';
}

void write_certificate(const std::string& path, const ll::Matching& m) {
  std::ofstream out(path);
  if (!out) throw ll::InputError("cannot write certificate: " + path);
  for (const auto& p : m.pairs) out << p.i << ' ' << p.j << '\n';
}

ll::Regime parse_regime(const std::string& r) {
  if (r == "cubic") return ll::Regime::Cubic;
  if (r == "quadratic") return ll::Regime::Quadratic;
  if (r == "auto") return ll::Regime::Auto;
  throw ll::InputError("unknown regime: " + r);
}

void print_tree(const CLI::App* app, std::ostream& out) {
  out << app->help() << '\n';
  for (const auto* sub : app->get_subcommands([](const CLI::App*) { return true; })) print_tree(sub, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate LCS and LIS: sparsified window pipelines, sublinear LIS, exact oracles and a bench runner"};
  app.require_subcommand(1);
  bool flag_reference = false;
  app.add_flag("--flag-reference", flag_reference, "print help for every subcommand and exit");

  Common common;

  // lcs
  auto* lcs = app.add_subcommand("lcs", "longest common subsequence");
  lcs->require_subcommand(1);
  std::string in_a, in_b, mode = "text", regime = "auto", cert_path;
  double eps = 0.1;
  double anchor_scale = 1.0, round_scale = 1.0, nearby_scale = 1.0;
  const auto add_pair_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--input-a", in_a, "first sequence file")->required();
    cmd->add_option("--input-b", in_b, "second sequence file")->required();
    cmd->add_option("--mode", mode, "text (bytes) or numeric (whitespace-separated integers)")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "numeric"}));
    add_common(cmd, common);
  };
  const auto add_approx_flags = [&](CLI::App* cmd) {
    cmd->add_option("--regime", regime, "cubic, quadratic or auto")
        ->capture_default_str()
        ->check(CLI::IsMember({"cubic", "quadratic", "auto"}));
    cmd->add_option("--eps", eps, "accuracy parameter")->capture_default_str();
    cmd->add_option("--certificate", cert_path, "write the certificate matching (one 'i j' pair per line)");
    cmd->add_option("--anchor-scale", anchor_scale, "multiplier on anchor draws")->capture_default_str();
    cmd->add_option("--round-scale", round_scale, "multiplier on anchor rounds")->capture_default_str();
    cmd->add_option("--nearby-scale", nearby_scale, "multiplier on the nearby-search rate")->capture_default_str();
  };
  auto* lcs_approx = lcs->add_subcommand("approx", "approximate LCS with a verified certificate");
  add_pair_inputs(lcs_approx);
  add_approx_flags(lcs_approx);
  auto* lcs_exact_cmd = lcs->add_subcommand("exact", "exact LCS length");
  add_pair_inputs(lcs_exact_cmd);
  auto* lcs_bal = lcs->add_subcommand("balanced", "approximate LCS with the balanced-alphabet baseline");
  add_pair_inputs(lcs_bal);
  add_approx_flags(lcs_bal);

  // lis
  auto* lis = app.add_subcommand("lis", "longest increasing subsequence");
  lis->require_subcommand(1);
  std::string lis_in, lis_mode = "numeric";
  double lis_eps = 0.1, lis_delta = 0.1, lambda = 0.5, kappa = 1.0 / 3.0;
  double domain_scale = ll::LisConfig{}.domain_sample_scale, eval_scale = 1.0;
  std::optional<double> lambda_opt;
  const auto add_lis_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", lis_in, "array file")->required();
    cmd->add_option("--mode", lis_mode, "numeric or text")->capture_default_str()->check(CLI::IsMember({"text", "numeric"}));
    add_common(cmd, common);
  };
  const auto add_lis_knobs = [&](CLI::App* cmd) {
    cmd->add_option("--eps", lis_eps, "accuracy parameter")->capture_default_str();
    cmd->add_option("--delta", lis_delta, "failure parameter of domain sampling")->capture_default_str();
    cmd->add_option("--domain-sample-scale", domain_scale, "multiplier on the per-subarray sample count")
        ->capture_default_str();
    cmd->add_option("--eval-scale", eval_scale, "multiplier on the evaluation sampling rate")->capture_default_str();
  };
  auto* lis_approx_cmd = lis->add_subcommand("approx", "sublinear LIS estimate");
  add_lis_input(lis_approx_cmd);
  add_lis_knobs(lis_approx_cmd);
  auto* lis_decide_cmd = lis->add_subcommand("decide", "accept iff lis(A) >= lambda*n (gap decision)");
  add_lis_input(lis_decide_cmd);
  add_lis_knobs(lis_decide_cmd);
  lis_decide_cmd->add_option("--lambda", lambda, "normalized threshold")->required();
  auto* lis_rec_cmd = lis->add_subcommand("recursive", "recursive O(n^kappa)-access decision");
  add_lis_input(lis_rec_cmd);
  add_lis_knobs(lis_rec_cmd);
  lis_rec_cmd->add_option("--kappa", kappa, "access exponent in (0,1)")->capture_default_str();
  lis_rec_cmd->add_option("--lambda", lambda_opt, "decide at this lambda; omitted: sweep down from 1");
  auto* lis_exact_cmd = lis->add_subcommand("exact", "exact LIS by patience sorting");
  add_lis_input(lis_exact_cmd);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance (numeric format)");
  std::string kind = "random-uniform", out_a, out_b, out_c, witness_path;
  std::size_t gen_n = 0;
  ll::Symbol alphabet = 4;
  double plant_lambda = 0.5;
  std::vector<std::string> kind_names;
  for (const auto& [k, name] : ll::instance_kind_names()) kind_names.push_back(name);
  gen->add_option("--kind", kind, "instance family")->capture_default_str()->check(CLI::IsMember(kind_names));
  gen->add_option("--n", gen_n, "length")->required();
  gen->add_option("--alphabet", alphabet, "alphabet size (lcs kinds)")->capture_default_str();
  gen->add_option("--plant-lambda", plant_lambda, "planted fraction (planted-lcs)")->capture_default_str();
  gen->add_option("--out", out_a, "file for the first sequence (default stdout)");
  gen->add_option("--out-b", out_b, "file for the second sequence");
  gen->add_option("--out-c", out_c, "file for the third sequence (footnote-triple)");
  gen->add_option("--witness", witness_path, "file for the planted witness matching");
  add_common(gen, common);

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark matrix runner");
  bench->require_subcommand(1);
  std::string matrix_path, runs_out, runs_in, tables_out;
  auto* bench_run = bench->add_subcommand("run", "run a TOML matrix and write JSONL");
  bench_run->add_option("--matrix", matrix_path, "TOML matrix file")->required();
  bench_run->add_option("--out", runs_out, "JSONL output")->required();
  add_common(bench_run, common);
  auto* bench_report = bench->add_subcommand("report", "summarize JSONL runs as Markdown tables");
  bench_report->add_option("--in", runs_in, "JSONL input")->required();
  bench_report->add_option("--out", tables_out, "Markdown output (default stdout)");
  add_common(bench_report, common);

  // debug
  auto* debug = app.add_subcommand("debug", "inspection helpers");
  debug->require_subcommand(1);
  auto* dbg_windows = debug->add_subcommand("windows", "build a window family and print its size");
  std::size_t win_n = 0;
  std::optional<ll::Index> win_d;
  std::string win_regime = "quadratic";
  double win_eps0 = 0.5, win_lambda = 1.0;
  dbg_windows->add_option("--n", win_n, "sequence length")->required();
  dbg_windows->add_option("--regime", win_regime, "quadratic or cubic")
      ->capture_default_str()
      ->check(CLI::IsMember({"quadratic", "cubic"}));
  dbg_windows->add_option("--d", win_d, "base window length (default ceil(sqrt(n)*lambda))");
  dbg_windows->add_option("--eps0", win_eps0, "window accuracy")->capture_default_str();
  dbg_windows->add_option("--lambda", win_lambda, "used for the default d")->capture_default_str();
  add_common(dbg_windows, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (flag_reference) {
      print_tree(&app, std::cout);
      return 0;
    }
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    std::map<std::string, double> timings;
    ll::Stopwatch total;

    if (lcs_approx->parsed() || lcs_bal->parsed()) {
      const bool balanced = lcs_bal->parsed();
      auto seqs = ll::load_sequences({in_a, in_b}, parse_mode(mode));
      ll::LcsConfig cfg;
      cfg.regime = parse_regime(regime);
      cfg.eps = eps;
      cfg.seed = common.seed;
      cfg.threads = common.threads;
      cfg.scale = {anchor_scale, round_scale, nearby_scale};
      std::cerr << "lcs " << (balanced ? "balanced" : "approx") << ": |A|=" << seqs[0].size()
                << " |B|=" << seqs[1].size() << " regime=" << regime << '\n';
      const auto rep = balanced ? ll::lcs_balanced_alphabet(seqs[0], seqs[1], cfg) : ll::approx_lcs(seqs[0], seqs[1], cfg);
      if (!cert_path.empty()) write_certificate(cert_path, rep.certificate);
      std::cout << rep.estimate << '\n';
      timings = rep.timings_ms;
      emit_report(common, balanced ? "lcs balanced" : "lcs approx",
                  {{"input_a", in_a}, {"input_b", in_b}, {"mode", mode}, {"regime", regime}, {"eps", eps},
                   {"anchor_scale", anchor_scale}, {"round_scale", round_scale}, {"nearby_scale", nearby_scale},
                   {"threads", common.threads}},
                  {{"estimate", rep.estimate},
                   {"lambda_final", rep.lambda_final},
                   {"accepted", rep.accepted},
                   {"branch", rep.branch},
                   {"regime", ll::to_string(rep.regime)},
                   {"n", rep.n},
                   {"len_a", rep.len_a},
                   {"len_b", rep.len_b},
                   {"padded", rep.padded},
                   {"sweep_steps", rep.sweep_steps},
                   {"certificate_size", rep.certificate.size()},
                   {"certificate_path", cert_path.empty() ? json(nullptr) : json(cert_path)}},
                  rep.counters, timings);
      return 0;
    }

    if (lcs_exact_cmd->parsed()) {
      auto seqs = ll::load_sequences({in_a, in_b}, parse_mode(mode));
      const std::size_t len = ll::lcs_length(seqs[0].view(), seqs[1].view());
      std::cout << len << '\n';
      timings["total"] = total.ms();
      emit_report(common, "lcs exact", {{"input_a", in_a}, {"input_b", in_b}, {"mode", mode}},
                  {{"estimate", len}, {"len_a", seqs[0].size()}, {"len_b", seqs[1].size()}},
                  {{"dp_cells", std::uint64_t(seqs[0].size()) * seqs[1].size()}}, timings);
      return 0;
    }

    if (lis_exact_cmd->parsed() || lis_approx_cmd->parsed() || lis_decide_cmd->parsed() || lis_rec_cmd->parsed()) {
      const auto a = ll::load_sequence(lis_in, parse_mode(lis_mode));
      std::cerr << "lis: n=" << a.size() << '\n';
      json params = {{"input", lis_in}, {"mode", lis_mode}};
      ll::LisConfig cfg;
      cfg.eps = lis_eps;
      cfg.delta = lis_delta;
      cfg.domain_sample_scale = domain_scale;
      cfg.eval_scale = eval_scale;
      cfg.seed = common.seed;
      cfg.threads = common.threads;
      if (!lis_exact_cmd->parsed()) {
        params["eps"] = lis_eps;
        params["delta"] = lis_delta;
        params["domain_sample_scale"] = domain_scale;
        params["eval_scale"] = eval_scale;
      }
      if (lis_exact_cmd->parsed()) {
        const std::size_t len = ll::lis_exact(a);
        std::cout << len << '\n';
        timings["total"] = total.ms();
        emit_report(common, "lis exact", params, {{"estimate", len}, {"n", a.size()}}, {{"accesses", a.size()}},
                    timings);
      } else if (lis_approx_cmd->parsed()) {
        std::atomic<std::uint64_t> reads{0};
        const auto res = ll::lis_approx(a, cfg, &reads);
        std::cout << res.estimate << '\n';
        timings["total"] = total.ms();
        json estimates = json::array();
        for (const auto& d : res.trace) estimates.push_back(d.estimate);
        emit_report(common, "lis approx", params,
                    {{"estimate", res.estimate},
                     {"lambda_final", res.lambda_final},
                     {"branch", res.branch},
                     {"access_count", res.accesses},
                     {"decisions", res.decisions},
                     {"sample_rate", res.sample_rate},
                     {"estimates", estimates},
                     {"n", a.size()}},
                    {{"accesses", res.accesses}}, timings);
      } else if (lis_decide_cmd->parsed()) {
        const auto d = ll::lis_decide(a, lambda, cfg);
        std::cout << (d.accept ? "accept" : "reject") << '\n';
        timings["total"] = total.ms();
        params["lambda"] = lambda;
        emit_report(common, "lis decide", params,
                    {{"accept", d.accept},
                     {"estimate", d.estimate},
                     {"threshold", d.threshold},
                     {"pseudo_solutions", d.t},
                     {"samples_per_subarray", d.k},
                     {"subarrays", d.subarrays},
                     {"evaluation_rate", d.rate},
                     {"access_count", d.accesses}},
                    {{"accesses", d.accesses}}, timings);
      } else {
        ll::RecursionConfig rc;
        rc.kappa = kappa;
        rc.eps = lis_eps;
        rc.delta = lis_delta;
        rc.domain_sample_scale = domain_scale;
        rc.eval_scale = eval_scale;
        rc.threads = common.threads;
        params["kappa"] = kappa;
        json result;
        std::uint64_t accesses = 0;
        if (lambda_opt) {
          params["lambda"] = *lambda_opt;
          std::atomic<std::uint64_t> reads{0};
          const auto r = ll::recursive_lis(a.view(), *lambda_opt, rc, common.seed, &reads);
          std::cout << (r.accept ? "accept" : "reject") << '\n';
          accesses = r.accesses;
          result = {{"accept", r.accept},     {"depth", r.depth},           {"max_depth", r.plan.max_depth},
                    {"zeta", r.plan.zeta},    {"oracle_calls", r.oracle_calls}, {"base_calls", r.base_calls},
                    {"access_count", accesses}};
        } else {
          const auto s = ll::recursive_lis_sweep(a.view(), rc, common.seed);
          std::cout << s.lambda_accept << '\n';
          accesses = s.accesses;
          result = {{"accept", s.lambda_accept > 0.0}, {"lambda_accept", s.lambda_accept}, {"decisions", s.decisions},
                    {"depth", s.depth}, {"access_count", accesses}};
        }
        timings["total"] = total.ms();
        emit_report(common, "lis recursive", params, result, {{"accesses", accesses}}, timings);
      }
      return 0;
    }

    if (gen->parsed()) {
      ll::InstanceSpec spec{ll::parse_instance_kind(kind), gen_n, alphabet, plant_lambda, common.seed};
      const auto inst = ll::generate(spec);
      const auto put = [](const std::string& path, const ll::Sequence& s) {
        if (path.empty()) {
          std::cout << ll::format_numeric(s.symbols);
          return;
        }
        std::ofstream out(path);
        if (!out) throw ll::InputError("cannot write " + path);
        out << ll::format_numeric(s.symbols);
      };
      put(out_a, inst.a);
      if (!out_b.empty()) put(out_b, inst.b);
      if (!out_c.empty()) put(out_c, inst.c);
      if (!witness_path.empty()) write_certificate(witness_path, inst.witness);
      timings["total"] = total.ms();
      emit_report(common, "gen", ll::to_json(spec),
                  {{"len_a", inst.a.size()}, {"len_b", inst.b.size()}, {"len_c", inst.c.size()},
                   {"witness_size", inst.witness.size()}},
                  {}, timings);
      return 0;
    }

    if (bench_run->parsed()) {
      auto cfg = ll::load_matrix(ll::read_file(matrix_path));
      if (bench_run->count("--threads")) cfg.threads = common.threads;
      std::cerr << "bench: " << cfg.specs.size() << " instance specs x " << cfg.seeds.size() << " seeds x "
                << cfg.algorithms.size() << " algorithms\n";
      const auto runs = ll::run_matrix(cfg);
      std::ofstream out(runs_out);
      if (!out) throw ll::InputError("cannot write " + runs_out);
      ll::write_jsonl(out, runs);
      std::size_t failed = 0;
      for (const auto& r : runs) failed += r.error.empty() ? 0 : 1;
      std::cout << runs.size() << '\n';
      timings["total"] = total.ms();
      emit_report(common, "bench run", {{"matrix", matrix_path}, {"out", runs_out}},
                  {{"runs", runs.size()}, {"failures", failed}}, {}, timings);
      return 0;
    }

    if (bench_report->parsed()) {
      std::ifstream in(runs_in);
      if (!in) throw ll::InputError("cannot open " + runs_in);
      const auto runs = ll::read_jsonl(in);
      const auto md = ll::render_markdown(runs);
      if (tables_out.empty()) {
        std::cout << md;
      } else {
        std::ofstream out(tables_out);
        if (!out) throw ll::InputError("cannot write " + tables_out);
        out << md;
      }
      timings["total"] = total.ms();
      emit_report(common, "bench report", {{"in", runs_in}}, {{"runs", runs.size()}}, {}, timings);
      return 0;
    }

    if (dbg_windows->parsed()) {
      const ll::Index n = ll::Index(win_n);
      const ll::Index d = win_d ? *win_d : ll::Index(std::max(1.0, std::ceil(std::sqrt(double(n)) * win_lambda - ll::kSlack)));
      const auto w = win_regime == "cubic" ? ll::build_windows_cubic(n, d, win_eps0) : ll::build_windows_quadratic(n, d, win_eps0);
      std::cout << w.k() << '\n';
      json wa = json::array(), wb = json::array();
      for (const auto& x : w.a.windows) wa.push_back({x.left, x.length, x.layer});
      for (const auto& x : w.b.windows) wb.push_back({x.left, x.length, x.layer});
      timings["total"] = total.ms();
      emit_report(common, "debug windows", {{"n", win_n}, {"d", d}, {"regime", win_regime}, {"eps0", win_eps0}},
                  {{"k", w.k()}, {"w_max", w.b.w_max}, {"w_min", w.b.w_min}, {"w_gap", w.b.w_gap},
                   {"w_layers", w.b.w_layers}, {"a", wa}, {"b", wb}},
                  {}, timings);
      return 0;
    }
  } catch (const ll::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const ll::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
