#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "slra/linalg.hpp"
#include "slra/sketch.hpp"

namespace slra {

/// Overdetermined least-squares instance: minimize ||A x - b||, m > d.
struct LsrProblem {
  Matrix A;  // m x d
  Vector b;  // length m
};

struct LsrReport {
  Vector x_hat;
  double sketched_residual = 0;
  std::optional<double> true_residual;
  std::optional<double> ratio;
  nlohmann::json multiplier;
  Index k = 0;
  bool validated = true;
  int attempts = 1;
};

/// Minimum-norm minimizer A^+ b.
Vector solve_exact(const LsrProblem& p);

double residual_norm(const LsrProblem& p, const Vector& x);

/// ||A x_hat - b|| / min_x ||A x - b||; +inf when the optimum is ~0.
double residual_ratio(const LsrProblem& p, const Vector& x_hat);

/// Sketch-and-solve: x_hat = argmin ||(FA) x - Fb|| via QR on the k x (d+1)
/// sketch. Throws SketchRankFailure when FA drops below numerical rank d.
LsrReport sketch_solve(const LsrProblem& p, const SketchOperator& F,
                       bool with_true_residual = false);

/// Retry loop: attempt i uses F_i = base_F * Q_i (implicit pre-processing);
/// each solution is validated against an independently drawn second sketch of
/// the same shape, accepted when the two sketched residuals agree within
/// accept_tol. After max_retries the best attempt is returned un-validated.
LsrReport solve_with_retries(const LsrProblem& p, OpPtr base_F,
                             const std::vector<OpPtr>& q_family, int max_retries,
                             double accept_tol, Rng& rng);

}  // namespace slra
