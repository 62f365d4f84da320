// Benchmark harness: every pipeline as a subcommand, CSV rows out.
//
//   slra_cli gen --family svd-profile --n 64 --r 8 --seed 1 -o m.mtx
//   slra_cli lra --input m.mtx --mult asph --d 3 --l 8
//   slra_cli cur --algo ca --loops 5
//   slra_cli selftest --quick
//
// Per-trial seeds are hashed from the master seed and the trial index, so a
// fixed (config, seed) pair gives bit-identical CSV. The default seed comes
// from the SLRA_SEED environment variable. Wall-clock timing is reported on
// stderr and deliberately kept out of the CSV.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slra/cur.hpp"
#include "slra/errors.hpp"
#include "slra/hss.hpp"
#include "slra/leverage.hpp"
#include "slra/lra.hpp"
#include "slra/lsr.hpp"
#include "slra/mmio.hpp"
#include "slra/selftest.hpp"
#include "slra/sketch.hpp"
#include "slra/testgen.hpp"

using namespace slra;

namespace {

/// Flat or one-level-nested JSON file as a CLI11 config source:
/// {"seed": 7, "lra": {"l": 8}}.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }
  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<CLI::ConfigItem> out;
    std::function<void(const nlohmann::json&, std::vector<std::string>)> walk =
        [&](const nlohmann::json& node, std::vector<std::string> parents) {
          for (auto it = node.begin(); it != node.end(); ++it) {
            if (it.value().is_object()) {
              auto p = parents;
              p.push_back(it.key());
              walk(it.value(), p);
            } else {
              CLI::ConfigItem item;
              item.parents = parents;
              item.name = it.key();
              item.inputs = {it.value().is_string() ? it.value().get<std::string>()
                                                    : it.value().dump()};
              out.push_back(std::move(item));
            }
          }
        };
    walk(j, {});
    return out;
  }
};

std::uint64_t default_seed() {
  const char* env = std::getenv("SLRA_SEED");
  return env ? std::strtoull(env, nullptr, 10) : 0;
}

struct Stats {
  double mean = 0, std = 0;
};

Stats summarize(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(v.size()));
  return s;
}

const char* kCsvHeader =
    "command,input,algorithm,m,n,r,k,l,trials,mean_error,std_error,"
    "entry_accesses,seed\n";

std::string csv_row(const std::string& command, const std::string& input,
                    const std::string& algorithm, Index m, Index n, Index r,
                    Index k, Index l, int trials, Stats stats,
                    unsigned long long accesses, std::uint64_t seed) {
  std::ostringstream out;
  out << command << "," << input << "," << algorithm << "," << m << "," << n
      << "," << r << "," << k << "," << l << "," << trials << ","
      << format_stat(stats.mean) << "," << format_stat(stats.std) << ","
      << accesses << "," << seed << "\n";
  return out.str();
}

void emit(const std::string& output, const std::string& text) {
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(output);
    if (!f) throw std::runtime_error("cannot open output file: " + output);
    f << text;
  }
}

/// Shared input options: a MatrixMarket file or a generator family.
struct InputOpts {
  std::string input;  // .mtx path; overrides the family when set
  std::string family = "factor-gaussian";
  Index m = 0, n = 256, r = 8;
  double noise = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "MatrixMarket input file");
    cmd->add_option("--family", family,
                    "generator family (svd-profile, factor-gaussian, laplacian, "
                    "fd-inverse, gravity, shaw, hilbert, cauchy)");
    cmd->add_option("--m", m, "rows (defaults to n)");
    cmd->add_option("--n", n, "columns");
    cmd->add_option("--r", r, "target rank");
    cmd->add_option("--noise", noise, "generator noise level");
  }

  /// Matrix for one trial; files are fixed, families re-seeded per trial.
  Matrix make(std::uint64_t trial_seed) const {
    if (!input.empty()) return read_matrix_market(input);
    InputSpec spec;
    spec.family = family;
    spec.m = m > 0 ? m : n;
    spec.n = n;
    spec.r = r;
    spec.noise = noise;
    spec.seed = trial_seed;
    return spec.make();
  }

  std::string label() const { return input.empty() ? family : input; }
};

OpPtr right_multiplier(const std::string& kind, Index n, Index l, int d, Rng& rng) {
  if (kind == "gaussian") return gen_gaussian(n, l, rng);
  OpPtr base;
  if (kind == "ah")
    base = make_abridged_hadamard(n, d);
  else if (kind == "aph")
    base = gen_aph(n, d, rng);
  else if (kind == "asph")
    base = gen_asph(n, d, rng);
  else
    throw CLI::ValidationError("--mult", "unknown multiplier: " + kind);
  return take_columns(std::move(base), l, ColumnMode::Random, rng);
}

OpPtr left_multiplier(const std::string& kind, Index k, Index m, int d, Rng& rng) {
  if (kind == "gaussian") return gen_gaussian(k, m, rng);
  OpPtr rows = make_sub_identity(IndexSet(rng.distinct_indices(k, m), m), m);
  if (kind == "asph") return make_product({rows, gen_asph(m, d, rng)});
  if (kind == "circulant")
    return make_product({rows, gen_sparse_circulant(m, 32, rng),
                         gen_sign_diagonal(m, rng)});
  if (kind == "householder")
    return make_product({rows, gen_householder_chain(m, 30, rng)});
  if (kind == "bidiagonal") {
    Vector b1(m - 1), b2(m - 1);
    for (Index i = 0; i < m - 1; ++i) {
      b1(i) = rng.sign();
      b2(i) = rng.sign();
    }
    return make_product({rows, make_sum({make_inverse_bidiagonal(b1, true),
                                         make_inverse_bidiagonal(b2, false)},
                                        {1, 1})});
  }
  throw CLI::ValidationError("--mult", "unknown multiplier: " + kind);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report_runtime(const Timer& timer, int trials) {
  std::cerr << "runtime: " << format_stat(timer.seconds()) << " s total, "
            << format_stat(timer.seconds() / std::max(trials, 1))
            << " s per trial\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"superfast low-rank approximation and regression benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();  // global --seed/--trials/-o usable after the subcommand
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file");

  std::uint64_t seed = default_seed();
  int trials = 1;
  std::string output;
  app.add_option("--seed", seed, "master seed (default from SLRA_SEED, else 0)")
      ->capture_default_str();
  app.add_option("--trials", trials, "trials per row")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("-o,--output", output, "output file (default stdout)");

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "write a generated matrix as MatrixMarket");
  InputOpts gen_in;
  gen_in.attach(gen);
  std::string gen_out;
  gen->add_option("-o,--output", gen_out, "output .mtx path")->required();
  gen->callback([&] {
    write_matrix_market(gen_out, gen_in.make(seed));
    std::cerr << "wrote " << gen_in.label() << " -> " << gen_out << "\n";
  });

  // ---- lsr ----------------------------------------------------------------
  auto* lsr = app.add_subcommand("lsr", "sketch-and-solve least squares");
  std::string lsr_family = "gaussian", lsr_mult = "gaussian";
  Index lsr_m = 1024, lsr_n = 50, lsr_k = 300;
  int lsr_d = 3;
  lsr->add_option("--family", lsr_family, "gaussian|illcond|semicoherent|coherent");
  lsr->add_option("--m", lsr_m, "rows");
  lsr->add_option("--n", lsr_n, "unknowns");
  lsr->add_option("--k", lsr_k, "sketch size");
  lsr->add_option("--mult", lsr_mult,
                  "gaussian|asph|circulant|householder|bidiagonal");
  lsr->add_option("--d", lsr_d, "recursion depth of structured multipliers");
  lsr->callback([&] {
    Timer timer;
    LsrFamily family = lsr_family_from_string(lsr_family);
    std::vector<double> ratios;
    for (int t = 0; t < trials; ++t) {
      Rng rng(Rng::derive_seed(seed, static_cast<std::uint64_t>(t)));
      LsrProblem p = gen_lsr_family(family, lsr_m, lsr_n, rng);
      OpPtr F = left_multiplier(lsr_mult, lsr_k, lsr_m, lsr_d, rng);
      LsrReport rep = sketch_solve(p, *F, true);
      ratios.push_back(rep.ratio.value());
    }
    const auto accesses =
        static_cast<unsigned long long>(lsr_m) * static_cast<unsigned long long>(lsr_n);
    emit(output, std::string(kCsvHeader) +
                     csv_row("lsr", lsr_family, lsr_mult, lsr_m, lsr_n, lsr_n,
                             lsr_k, 0, trials, summarize(ratios), accesses, seed));
    report_runtime(timer, trials);
  });

  // ---- lra ----------------------------------------------------------------
  auto* lra = app.add_subcommand("lra", "randomized range-finder approximation");
  InputOpts lra_in;
  lra_in.family = "svd-profile";
  lra_in.attach(lra);
  std::string lra_mult = "gaussian";
  Index lra_l = 0;
  int lra_d = 3;
  lra->add_option("--mult", lra_mult, "gaussian|ah|aph|asph");
  lra->add_option("--l", lra_l, "sketch width (default r)");
  lra->add_option("--d", lra_d, "recursion depth of structured multipliers");
  lra->callback([&] {
    Timer timer;
    std::vector<double> errs;
    Index m = 0, n = 0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = Rng::derive_seed(seed, static_cast<std::uint64_t>(t));
      Rng rng(ts);
      Matrix M = lra_in.make(ts);
      m = M.rows();
      n = M.cols();
      const Index l = lra_l > 0 ? lra_l : lra_in.r;
      const Index r = std::min(lra_in.r > 0 ? lra_in.r : l, l);
      OpPtr H = right_multiplier(lra_mult, n, l, lra_d, rng);
      errs.push_back(spectral_norm(M - range_finder(M, *H, r).product()));
    }
    const Index l = lra_l > 0 ? lra_l : lra_in.r;
    const auto accesses =
        static_cast<unsigned long long>(m) * static_cast<unsigned long long>(n);
    emit(output, std::string(kCsvHeader) +
                     csv_row("lra", lra_in.label(), lra_mult, m, n,
                             std::min(lra_in.r > 0 ? lra_in.r : l, l), 0, l,
                             trials, summarize(errs), accesses, seed));
    report_runtime(timer, trials);
  });

  // ---- cur ----------------------------------------------------------------
  auto* cur = app.add_subcommand("cur", "CUR decompositions");
  InputOpts cur_in;
  cur_in.family = "gravity";
  cur_in.attach(cur);
  std::string cur_algo = "ca";
  Index cur_k = 0, cur_l = 0;
  int cur_loops = 5;
  cur->add_option("--algo", cur_algo, "primitive|cynical|ca|leverage");
  cur->add_option("--k", cur_k, "row-sample size (default 2r)");
  cur->add_option("--l", cur_l, "column-sample size (default 2r)");
  cur->add_option("--loops", cur_loops, "cross-approximation loops");
  cur->callback([&] {
    Timer timer;
    std::vector<double> errs;
    unsigned long long accesses = 0;
    Index m = 0, n = 0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = Rng::derive_seed(seed, static_cast<std::uint64_t>(t));
      Rng rng(ts);
      Matrix M = cur_in.make(ts);
      m = M.rows();
      n = M.cols();
      const Index r = cur_in.r;
      const Index k = cur_k > 0 ? cur_k : 2 * r;
      const Index l = cur_l > 0 ? cur_l : 2 * r;
      DenseOracle o(M);
      CurDecomposition c;
      if (cur_algo == "primitive") {
        c = primitive_cur(o, IndexSet(rng.distinct_indices(k, m), m),
                          IndexSet(rng.distinct_indices(l, n), n), r);
      } else if (cur_algo == "cynical") {
        c = cynical_cur(o, std::min(4 * r, m), std::min(4 * r, n), k, l, r, rng);
      } else if (cur_algo == "ca") {
        c = cross_approx(o, r, k, l, IndexSet(), cur_loops, 1.1, std::nullopt, rng)
                .first;
      } else if (cur_algo == "leverage") {
        c = cur_via_leverage(o, r, k, l, 1.0, 1.0, SampleMode::Exactly,
                             std::nullopt, rng);
      } else {
        throw CLI::ValidationError("--algo", "unknown algorithm: " + cur_algo);
      }
      accesses += o.accesses();
      errs.push_back(cur_evaluate(M, c, NormKind::Spectral) / spectral_norm(M));
    }
    accesses /= static_cast<unsigned long long>(trials);
    emit(output, std::string(kCsvHeader) +
                     csv_row("cur", cur_in.label(), cur_algo, m, n, cur_in.r,
                             cur_k > 0 ? cur_k : 2 * cur_in.r,
                             cur_l > 0 ? cur_l : 2 * cur_in.r, trials,
                             summarize(errs), accesses, seed));
    report_runtime(timer, trials);
  });

  // ---- leverage -----------------------------------------------------------
  auto* lev = app.add_subcommand("leverage", "leverage-score sampled CUR");
  InputOpts lev_in;
  lev_in.attach(lev);
  Index lev_k = 0, lev_l = 0;
  double lev_beta = 1.0;
  std::string lev_mode = "exactly";
  bool lev_uniform = false;
  lev->add_option("--k", lev_k, "row-sample size (default 8r)");
  lev->add_option("--l", lev_l, "column-sample size (default 8r)");
  lev->add_option("--beta", lev_beta, "score quality parameter");
  lev->add_option("--mode", lev_mode, "exactly|expected");
  lev->add_flag("--uniform", lev_uniform, "use uniform scores (superfast path)");
  lev->callback([&] {
    Timer timer;
    if (lev_mode != "exactly" && lev_mode != "expected")
      throw CLI::ValidationError("--mode", "unknown mode: " + lev_mode);
    const SampleMode mode =
        lev_mode == "exactly" ? SampleMode::Exactly : SampleMode::Expected;
    std::vector<double> errs;
    unsigned long long accesses = 0;
    Index m = 0, n = 0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = Rng::derive_seed(seed, static_cast<std::uint64_t>(t));
      Rng rng(ts);
      Matrix M = lev_in.make(ts);
      m = M.rows();
      n = M.cols();
      const Index r = lev_in.r;
      const Index k = lev_k > 0 ? lev_k : 8 * r;
      const Index l = lev_l > 0 ? lev_l : 8 * r;
      DenseOracle o(M);
      std::optional<LeverageScores> scores;
      if (lev_uniform) scores = uniform_scores(n);
      CurDecomposition c =
          cur_via_leverage(o, r, k, l, lev_beta, lev_beta, mode, scores, rng);
      accesses += o.accesses();
      errs.push_back(cur_evaluate(M, c, NormKind::Spectral) / spectral_norm(M));
    }
    accesses /= static_cast<unsigned long long>(trials);
    emit(output, std::string(kCsvHeader) +
                     csv_row("leverage", lev_in.label(),
                             lev_uniform ? "uniform-scores" : "svd-scores", m, n,
                             lev_in.r, lev_k > 0 ? lev_k : 8 * lev_in.r,
                             lev_l > 0 ? lev_l : 8 * lev_in.r, trials,
                             summarize(errs), accesses, seed));
    report_runtime(timer, trials);
  });

  // ---- hss ----------------------------------------------------------------
  auto* hss = app.add_subcommand("hss", "hierarchical approximation and matvec");
  InputOpts hss_in;
  hss_in.family = "cauchy";
  hss_in.n = 256;
  hss_in.attach(hss);
  int hss_depth = 3;
  double hss_tol = 1e-6;
  std::string hss_strategy = "cur_ca";
  hss->add_option("--depth", hss_depth, "partition depth");
  hss->add_option("--tol", hss_tol, "per-block relative tolerance");
  hss->add_option("--strategy", hss_strategy, "svd|cur_ca");
  hss->callback([&] {
    Timer timer;
    if (hss_strategy != "svd" && hss_strategy != "cur_ca")
      throw CLI::ValidationError("--strategy", "unknown strategy: " + hss_strategy);
    const HssStrategy strategy =
        hss_strategy == "svd" ? HssStrategy::Svd : HssStrategy::CurCa;
    std::vector<double> errs;
    unsigned long long accesses = 0;
    Index n = 0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = Rng::derive_seed(seed, static_cast<std::uint64_t>(t));
      Rng rng(ts);
      Matrix M = hss_in.make(ts);
      n = M.cols();
      DenseOracle o(M);
      HssMatrix h = build_hss(o, hss_depth, hss_in.r, hss_tol, strategy, rng);
      accesses += o.accesses();
      errs.push_back(hss_error(h, M, NormKind::Spectral) / spectral_norm(M));
    }
    accesses /= static_cast<unsigned long long>(trials);
    emit(output, std::string(kCsvHeader) +
                     csv_row("hss", hss_in.label(), hss_strategy, n, n, hss_in.r,
                             hss_depth, 0, trials, summarize(errs), accesses, seed));
    report_runtime(timer, trials);
  });

  // ---- selftest -----------------------------------------------------------
  auto* selftest = app.add_subcommand("selftest", "acceptance suite");
  bool quick = false;
  selftest->add_flag("--quick", quick, "reduced trial counts");
  selftest->callback([&] {
    auto results = run_acceptance(seed, quick);
    int failed = 0;
    for (const auto& r : results) {
      std::cerr << "criterion " << r.id << " " << r.name << " "
                << (r.pass ? "PASS" : "FAIL") << " (" << format_stat(r.seconds)
                << " s)\n";
      if (!r.pass) ++failed;
    }
    emit(output, acceptance_csv(results, seed));
    if (failed > 0) throw CLI::RuntimeError("selftest failures", failed);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
