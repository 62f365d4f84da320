#include "slra/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "slra/cur.hpp"
#include "slra/errors.hpp"
#include "slra/hss.hpp"
#include "slra/leverage.hpp"
#include "slra/lra.hpp"
#include "slra/lsr.hpp"
#include "slra/sketch.hpp"
#include "slra/testgen.hpp"

namespace slra {

namespace {

Rng trial_rng(std::uint64_t seed, int criterion, std::uint64_t trial) {
  return Rng(Rng::derive_seed(Rng::derive_seed(seed, 1000u + criterion), trial));
}

double rel_spectral(const Matrix& M, const Matrix& approx, double scale) {
  return spectral_norm(M - approx) / scale;
}

LowRankFactors zero_factors(Index rows, Index cols) {
  LowRankFactors f;
  f.U = Matrix::Zero(rows, 0);
  f.V = Matrix::Zero(0, cols);
  return f;
}

// --- 1. exactness on exact-rank-r inputs -----------------------------------

struct AlgTally {
  const char* name;
  int failures = 0;
  double worst = 0;
};

CriterionResult crit_exactness(std::uint64_t seed, bool quick) {
  CriterionResult out{1, "exactness", false, 0, 1e-9, 0, "", 0};
  const int trials = quick ? 30 : 100;
  AlgTally algs[6] = {{"range_finder"}, {"lra_premult"}, {"primitive_cur"},
                      {"cynical_cur"},  {"cross_approx"}, {"cur_via_leverage"}};
  const Index m = 128, n = 128;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, 1, static_cast<std::uint64_t>(t));
    const Index r = (t % 2 == 0) ? 4 : 8;
    Matrix M = gen_factor_gaussian(m, n, r, 0.0, rng);
    const double scale = spectral_norm(M);
    DenseOracle o(M);

    auto run = [&](int a, auto&& body) {
      try {
        double err = body();
        algs[a].worst = std::max(algs[a].worst, err);
      } catch (const RangeFailure&) { ++algs[a].failures; }
        catch (const PremultRankFailure&) { ++algs[a].failures; }
        catch (const GeneratorRankFailure&) { ++algs[a].failures; }
        catch (const SelectionFailure&) { ++algs[a].failures; }
        catch (const EmptySample&) { ++algs[a].failures; }
    };

    run(0, [&] {
      OpPtr H = gen_gaussian(n, r, rng);
      return rel_spectral(M, range_finder(M, *H, r).product(), scale);
    });
    run(1, [&] {
      OpPtr F = gen_gaussian(r + 2, m, rng);
      OpPtr H = gen_gaussian(n, r, rng);
      return rel_spectral(M, lra_premult(M, *F, *H, r).product(), scale);
    });
    run(2, [&] {
      IndexSet I(rng.distinct_indices(r + 2, m), m);
      IndexSet J(rng.distinct_indices(r + 2, n), n);
      return cur_evaluate(M, primitive_cur(M, I, J, r), NormKind::Spectral) / scale;
    });
    run(3, [&] {
      return cur_evaluate(M, cynical_cur(o, 4 * r, 4 * r, r, r, r, rng),
                          NormKind::Spectral) / scale;
    });
    run(4, [&] {
      auto [c, trace] = cross_approx(o, r, r, r, IndexSet(), 2, 1.1, std::nullopt, rng);
      return cur_evaluate(M, c, NormKind::Spectral) / scale;
    });
    run(5, [&] {
      CurDecomposition c = cur_via_leverage(o, r, 4 * r, 4 * r, 1.0, 1.0,
                                            SampleMode::Exactly, std::nullopt, rng);
      return cur_evaluate(M, c, NormKind::Spectral) / scale;
    });
  }
  bool ok = true;
  std::ostringstream d;
  for (const AlgTally& a : algs) {
    out.metric = std::max(out.metric, a.worst);
    if (a.worst > 1e-9 || a.failures * 20 > trials) ok = false;
    d << a.name << " worst=" << format_stat(a.worst) << " fails=" << a.failures << "; ";
  }
  out.pass = ok;
  out.detail = d.str();
  return out;
}

// --- 2. graded-spectrum mean-error band for structured slices --------------

CriterionResult crit_graded_band(std::uint64_t seed, bool quick) {
  CriterionResult out{2, "graded-spectrum-band", false, 0, 1e-6, 0, "", 0};
  const int trials = quick ? 20 : 100;
  const Index n = 256, r = 8;
  double means[2] = {0, 0};
  int redraws = 0;
  for (int kind = 0; kind < 2; ++kind) {
    double sum = 0;
    for (int t = 0; t < trials; ++t) {
      Rng rng = trial_rng(seed, 2, static_cast<std::uint64_t>(kind * trials + t));
      Matrix M = gen_svd_profile(n, r, rng);
      for (int attempt = 0; attempt < 5; ++attempt) {
        OpPtr base = (kind == 0) ? gen_aph(n, 3, rng) : gen_asph(n, 3, rng);
        OpPtr H = take_columns(std::move(base), r, ColumnMode::Random, rng);
        try {
          sum += spectral_norm(M - range_finder(M, *H, r).product());
          break;
        } catch (const RangeFailure&) {
          ++redraws;
        }
      }
    }
    means[kind] = sum / trials;
  }
  out.metric = std::max(means[0], means[1]);
  out.pass = out.metric <= out.threshold;
  std::ostringstream d;
  d << "mean-ah=" << format_stat(means[0]) << "; mean-asph=" << format_stat(means[1])
    << "; redraws=" << redraws;
  out.detail = d.str();
  return out;
}

// --- 3. residual-ratio bands for the sketch-and-solve multipliers ----------

CriterionResult crit_lsr_band(std::uint64_t seed, bool quick) {
  CriterionResult out{3, "lsr-residual-band", false, 0, 1.25, 0, "", 0};
  const int trials = quick ? 8 : 50;
  const Index m = 4096, d = 100, k = 600;
  const char* names[5] = {"gaussian", "asph", "circulant", "householder", "bidiagonal"};
  double sums[5] = {0, 0, 0, 0, 0};
  int skipped = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, 3, static_cast<std::uint64_t>(t));
    LsrProblem p = gen_lsr_family(LsrFamily::Gaussian, m, d, rng);
    Eigen::HouseholderQR<Matrix> qr(p.A);
    Vector x_star = qr.solve(p.b);
    const double r_opt = (p.A * x_star - p.b).norm();

    auto rows = [&] { return make_sub_identity(IndexSet(rng.distinct_indices(k, m), m), m); };
    OpPtr mult[5];
    mult[0] = gen_gaussian(k, m, rng);
    mult[1] = make_product({rows(), gen_asph(m, 3, rng)});
    mult[2] = make_product({rows(), gen_sparse_circulant(m, 32, rng),
                            gen_sign_diagonal(m, rng)});
    mult[3] = make_product({rows(), gen_householder_chain(m, 30, rng)});
    Vector b1(m - 1), b2(m - 1);
    for (Index i = 0; i < m - 1; ++i) {
      b1(i) = rng.sign();
      b2(i) = rng.sign();
    }
    mult[4] = make_product({rows(), make_sum({make_inverse_bidiagonal(b1, true),
                                              make_inverse_bidiagonal(b2, false)},
                                             {1, 1})});
    for (int a = 0; a < 5; ++a) {
      try {
        LsrReport rep = sketch_solve(p, *mult[a]);
        sums[a] += (p.A * rep.x_hat - p.b).norm() / r_opt;
      } catch (const SketchRankFailure&) {
        ++skipped;
        sums[a] += 2.0;  // penalized, should not occur
      }
    }
  }
  std::ostringstream det;
  bool ok = true;
  for (int a = 0; a < 5; ++a) {
    const double mean = sums[a] / trials;
    const double hi = (a == 4) ? 2.0 : 1.25;
    if (mean < 1.0 - 1e-9 || mean > hi) ok = false;
    if (a < 4) out.metric = std::max(out.metric, mean);
    det << names[a] << "=" << format_stat(mean) << "; ";
  }
  det << "skipped=" << skipped;
  out.pass = ok && skipped == 0;
  out.detail = det.str();
  return out;
}

// --- 4. sampled-spectrum concentration -------------------------------------

CriterionResult crit_sampled_spectrum(std::uint64_t seed, bool quick) {
  const int trials = quick ? 30 : 100;
  CriterionResult out{4, "sampled-spectrum", false, 0,
                      std::ceil(0.85 * trials), 0, "", 0};
  const Index n = 4096, r = 8;
  const double delta = 0.1;
  const Index l = static_cast<Index>(
      std::ceil(8.0 * r * std::log(2.0 * r / delta)));
  const double eps = epsilon_for_sample(r, l, delta);
  int good = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, 4, static_cast<std::uint64_t>(t));
    Matrix V = thin_qr(rng.gaussian_matrix(n, r)).first;
    LeverageScores scores = svd_leverage_scores(V);
    SampleRescale s = sample_exactly(scores, l, rng);
    Matrix W(static_cast<Index>(s.indices.size()), r);
    for (Index u = 0; u < W.rows(); ++u)
      W.row(u) = s.d(u) * V.row(s.indices[static_cast<size_t>(u)]);
    Vector sigma = svd(W).sigma;
    bool inside = true;
    for (Index i = 0; i < sigma.size(); ++i) {
      const double sq = sigma(i) * sigma(i);
      if (sq < 1.0 - eps || sq > 1.0 + eps) inside = false;
    }
    if (inside) ++good;
  }
  out.metric = good;
  out.pass = good >= static_cast<int>(out.threshold);
  std::ostringstream d;
  d << "l=" << l << "; eps=" << format_stat(eps) << "; good=" << good << "/" << trials;
  out.detail = d.str();
  return out;
}

// --- 5. leverage-score uniformity of Gaussian inputs -----------------------

CriterionResult crit_leverage_uniformity(std::uint64_t seed, bool quick) {
  CriterionResult out{5, "leverage-uniformity", false, 0, 1e-3, 0, "", 0};
  const int trials_a = quick ? 30 : 100;
  const Index n_wide = 8192;
  int good = 0;
  for (int t = 0; t < trials_a; ++t) {
    Rng rng = trial_rng(seed, 5, static_cast<std::uint64_t>(t));
    if (gaussian_score_gap(rng.gaussian_matrix(8, n_wide)) <= 3.0 / n_wide) ++good;
  }

  const int trials_b = quick ? 5 : 20;
  const Index n = 256, r = 8;
  double sum = 0;
  for (int t = 0; t < trials_b; ++t) {
    Rng rng = trial_rng(seed, 5, 10000u + static_cast<std::uint64_t>(t));
    Matrix M = gen_factor_gaussian(n, n, r, 1e-5, rng);
    DenseOracle o(M);
    CurDecomposition c = cur_via_leverage(o, r, 64, 64, 1.0, 1.0,
                                          SampleMode::Exactly, uniform_scores(n), rng);
    sum += cur_evaluate(M, c, NormKind::Spectral) / spectral_norm(M);
  }
  const double mean_b = sum / trials_b;
  out.metric = mean_b;
  const int need = static_cast<int>(std::ceil(0.9 * trials_a));
  out.pass = good >= need && mean_b <= out.threshold;
  std::ostringstream d;
  d << "score-gap-good=" << good << "/" << trials_a
    << "; uniform-cur-mean=" << format_stat(mean_b);
  out.detail = d.str();
  return out;
}

// --- 6. top-SVD -> CUR conversion identity + nucleus bound -----------------

CriterionResult crit_conversion(std::uint64_t seed, bool quick) {
  CriterionResult out{6, "conversion-identity", false, 0, 1e-10, 0, "", 0};
  const int trials = quick ? 30 : 100;
  const Index m = 48, n = 32, r = 4;
  const double h = 1.1;
  int bound_violations = 0;
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, 6, static_cast<std::uint64_t>(t));
    Matrix M = gen_factor_gaussian(m, n, r, 0.0, rng);
    Svd top = svd(M).head(r);
    CurDecomposition c = top_svd_to_cur(top, r, r, h, CurSelector::Deterministic, rng);
    const double err =
        spectral_norm(cur_reconstruct(M, c) - top.reconstruct()) / top.sigma(0);
    worst = std::max(worst, err);
    const double bound = t_factor(m, r, h) * t_factor(n, r, h) / top.sigma(r - 1);
    if (spectral_norm(c.nucleus) > bound * (1 + 1e-6)) ++bound_violations;
  }
  out.metric = worst;
  out.pass = worst <= out.threshold && bound_violations == 0;
  std::ostringstream d;
  d << "worst-identity=" << format_stat(worst)
    << "; nucleus-bound-violations=" << bound_violations;
  out.detail = d.str();
  return out;
}

// --- 7. rank-r truncation error bound --------------------------------------

CriterionResult crit_truncation(std::uint64_t seed, bool quick) {
  CriterionResult out{7, "truncation-bound", false, 0, 0, 0, "", 0};
  const int trials = quick ? 30 : 100;
  const Index n = 64, r = 6;
  double worst_margin = -1e300;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, 7, static_cast<std::uint64_t>(t));
    Matrix M = gen_factor_gaussian(n, n, r, 0.01, rng);
    OpPtr H = gen_gaussian(n, r + 4, rng);
    LowRankFactors f;
    try {
      f = range_finder(M, *H, r);
    } catch (const RangeFailure&) {
      ++failures;
      continue;
    }
    LowRankFactors tr = two_stage_truncate(f, r);
    Vector sigma = svd(M).sigma;
    const double tau = sigma.tail(sigma.size() - r).norm();
    const double lhs = (tr.product() - M).norm();
    const double rhs = tau + 2.0 * (f.product() - M).norm() + 1e-8;
    worst_margin = std::max(worst_margin, lhs - rhs);
  }
  out.metric = worst_margin;
  out.pass = worst_margin <= 0 && failures == 0;
  std::ostringstream d;
  d << "worst-margin=" << format_stat(worst_margin) << "; range-failures=" << failures;
  out.detail = d.str();
  return out;
}

// --- 8. posterior estimator coverage and footprint -------------------------

CriterionResult crit_posterior(std::uint64_t seed, bool quick) {
  const int trials = quick ? 30 : 100;
  CriterionResult out{8, "posterior-coverage", false, 0,
                      std::ceil(0.9 * trials), 0, "", 0};
  const Index n = 64, q = 20, s = 20;
  int covered = 0;
  bool footprint_ok = true;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(seed, 8, static_cast<std::uint64_t>(t));
    Matrix E = rng.gaussian_matrix(n, n);
    DenseOracle o(E);
    LraErrorEstimate est = posterior_error_estimate(o, zero_factors(n, n), q, s, rng);
    if (o.accesses() != static_cast<unsigned long long>(q * s)) footprint_ok = false;
    out.entry_accesses = o.accesses();
    const double truth = E.norm();
    if (est.has_interval && est.ci_lo <= truth && truth <= est.ci_hi) ++covered;
  }
  out.metric = covered;
  out.pass = covered >= static_cast<int>(out.threshold) && footprint_ok;
  std::ostringstream d;
  d << "covered=" << covered << "/" << trials
    << "; reads-exact=" << (footprint_ok ? "yes" : "no");
  out.detail = d.str();
  return out;
}

// --- 9. pseudo-Gaussian product normality ----------------------------------

CriterionResult crit_pseudo_gaussian(std::uint64_t seed, bool) {
  CriterionResult out{9, "pseudo-gaussian-ks", false, 0, 19, 0, "", 0};
  const Index n = 256, T = 20;
  const int meta = 20, reps = 500;
  int passes = 0;
  for (int mrun = 0; mrun < meta; ++mrun) {
    Rng rng = trial_rng(seed, 9, static_cast<std::uint64_t>(mrun));
    const Index j = rng.uniform_index(n);
    const Index i = rng.uniform_index(n);
    std::vector<double> sample;
    sample.reserve(reps);
    for (int rep = 0; rep < reps; ++rep) {
      Vector col = bidiagonal_product_column(n, T, j, rng);
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().mean());
      sample.push_back((col(i) - mean) / sd);
    }
    if (ks_normality(sample).pass) ++passes;
  }
  out.metric = passes;
  out.pass = passes >= static_cast<int>(out.threshold);
  std::ostringstream d;
  d << "ks-passes=" << passes << "/" << meta;
  out.detail = d.str();
  return out;
}

// --- 10. HSS accuracy, sublinearity, matvec fidelity -----------------------

CriterionResult crit_hss(std::uint64_t seed, bool quick) {
  CriterionResult out{10, "hss-sublinear", false, 0, 1e-4, 0, "", 0};
  Rng rng = trial_rng(seed, 10, 0);
  Matrix M = cauchy_kernel(512);
  DenseOracle o(M);
  HssMatrix h = build_hss(o, 4, 16, 1e-7, HssStrategy::CurCa, rng);
  out.entry_accesses = o.accesses();
  const double rel = hss_error(h, M, NormKind::Spectral) / spectral_norm(M);
  out.metric = rel;

  bool decreasing = true;
  double prev = 1e300;
  std::ostringstream ratios;
  for (Index n : {Index(128), Index(256), Index(512)}) {
    Rng r2 = trial_rng(seed, 10, 100u + static_cast<std::uint64_t>(n));
    Matrix C = cauchy_kernel(n);
    DenseOracle oc(C);
    build_hss(oc, 3, 8, 1e-6, HssStrategy::CurCa, r2);
    const double ratio = static_cast<double>(oc.accesses()) /
                         (static_cast<double>(n) * static_cast<double>(n));
    if (ratio >= prev) decreasing = false;
    prev = ratio;
    ratios << " " << format_stat(ratio);
  }

  Matrix R = hss_reconstruct(h);
  const double scale = spectral_norm(R);
  bool matvec_ok = true;
  const int probes = quick ? 5 : 20;
  for (int t = 0; t < probes; ++t) {
    Vector x = rng.gaussian_vector(512);
    if ((hss_matvec(h, x) - R * x).norm() > 1e-10 * scale * x.norm()) matvec_ok = false;
  }
  out.pass = rel <= out.threshold && decreasing && matvec_ok;
  std::ostringstream d;
  d << "rel-error=" << format_stat(rel) << "; access-ratios" << ratios.str()
    << "; matvec=" << (matvec_ok ? "ok" : "bad");
  out.detail = d.str();
  return out;
}

// --- 11. hard inputs defeat fixed sub-identity sketches --------------------

CriterionResult crit_hard_inputs(std::uint64_t seed, bool) {
  CriterionResult out{11, "hard-input-honesty", false, 0, 32, 0, "", 0};
  (void)seed;  // the pipeline is fixed; nothing random to derive
  const Index n = 8;
  IndexSet I0({0}, n), J0({0}, n);
  int big_errors = 0;
  unsigned long long max_reads = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Matrix M = gen_delta(n, n, i, j);
      DenseOracle o(M);
      Matrix approx = Matrix::Zero(n, n);
      try {
        CurDecomposition c = primitive_cur(o, I0, J0, 1);
        approx = cur_reconstruct(M, c);
      } catch (const GeneratorRankFailure&) {
        // generator reads a zero entry: the honest answer is the zero matrix
      }
      max_reads = std::max(max_reads, o.accesses());
      if (chebyshev_norm(M - approx) >= 0.5) ++big_errors;
    }
  out.metric = big_errors;
  out.entry_accesses = max_reads;
  out.pass = big_errors >= 32 && max_reads < 32;
  std::ostringstream d;
  d << "errors-at-least-half=" << big_errors << "/64; footprint=" << max_reads;
  out.detail = d.str();
  return out;
}

// --- 12. determinism of the seeded suite -----------------------------------

CriterionResult crit_determinism(std::uint64_t seed, bool quick) {
  CriterionResult out{12, "determinism", false, 0, 1, 0, "", 0};
  auto subset = [&] {
    std::vector<CriterionResult> rs;
    rs.push_back(crit_conversion(seed, quick));
    rs.push_back(crit_posterior(seed, quick));
    rs.push_back(crit_hard_inputs(seed, quick));
    return acceptance_csv(rs, seed);
  };
  const std::string first = subset(), second = subset();
  out.metric = (first == second) ? 1 : 0;
  out.pass = first == second;
  out.detail = out.pass ? "repeat-run-identical=yes" : "repeat-run-identical=no";
  return out;
}

}  // namespace

std::string format_stat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, bool quick) {
  using Clock = std::chrono::steady_clock;
  std::vector<CriterionResult> out;
  CriterionResult (*crits[12])(std::uint64_t, bool) = {
      crit_exactness,  crit_graded_band, crit_lsr_band,  crit_sampled_spectrum,
      crit_leverage_uniformity, crit_conversion, crit_truncation, crit_posterior,
      crit_pseudo_gaussian, crit_hss, crit_hard_inputs, crit_determinism};
  for (auto* fn : crits) {
    const auto t0 = Clock::now();
    CriterionResult r = fn(seed, quick);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string acceptance_csv(const std::vector<CriterionResult>& results,
                           std::uint64_t seed) {
  std::ostringstream out;
  out << "criterion,name,pass,metric,threshold,entry_accesses,seed,detail\n";
  for (const CriterionResult& r : results)
    out << r.id << "," << r.name << "," << (r.pass ? 1 : 0) << ","
        << format_stat(r.metric) << "," << format_stat(r.threshold) << ","
        << r.entry_accesses << "," << seed << "," << r.detail << "\n";
  return out.str();
}

}  // namespace slra
