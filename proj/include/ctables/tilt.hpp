#pragma once

// Geometric exponential tilting of the independence model.
//
// Each cell is geometric with P(Y = y) = e^{-theta y} (1 - e^{-theta}),
// theta > 0, and the cell parameter is rank-1: theta_ijk = alpha_i + beta_j
// + gamma_k. The log-partition function is psi(theta) = -log(1 - e^{-theta}),
// the cell mean 1/(e^theta - 1) and the cell variance e^theta/(e^theta - 1)^2.
//
// For margins s = (a, b, c) the log-likelihood of any table in the fiber is
//
//   l(alpha, beta, gamma) = -<a,alpha> - <b,beta> - <c,gamma> - sum psi(theta_ijk),
//
// strictly concave modulo gauge, with gradient margins(Z) - s where Z is the
// table of cell means. Its maximizer makes the expected table hit the margins.

#include <cstddef>
#include <string>
#include <vector>

#include "ctables/fiber.hpp"
#include "ctables/tensor.hpp"

namespace ctables {

// Throw DomainError unless theta > 0 and finite.
double log_partition(double theta);
double mean_count(double theta);
double count_variance(double theta);

// Plane-sum margins allowed to be real (e.g. B n^2 with non-integer B n^2).
using RealMargins = std::vector<std::vector<double>>;

RealMargins to_real(const MarginSpec& spec);

struct Tilting {
  // One parameter vector per axis: alpha, beta[, gamma].
  std::vector<std::vector<double>> axes;

  std::size_t rank() const noexcept { return axes.size(); }
  Dims dims() const;
  const std::vector<double>& alpha() const { return axes.at(0); }
  const std::vector<double>& beta() const { return axes.at(1); }
  const std::vector<double>& gamma() const { return axes.at(2); }
};

// theta for every cell, row-major. Does not check positivity.
std::vector<double> cell_parameters(const Tilting& tilting);

// Shifts the axis vectors by constants summing to zero so that all axes have
// the same mean. Cell parameters are unchanged.
Tilting gauge_normalized(Tilting tilting);

struct LikelihoodEval {
  double value = 0.0;
  std::vector<std::vector<double>> gradient;  // margins(Z) - s, per axis
};

LikelihoodEval log_likelihood(const RealMargins& margins, const Tilting& tilting);

// Z_ijk = mean_count(theta_ijk). DomainError if some theta <= 0.
RealTable expected_table(const Tilting& tilting);

// max_i |margin_i(Z) - s_i| / s_i over all axes.
double margin_residual(const RealMargins& margins, const RealTable& expected);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 500;
};

struct SolveReport {
  Tilting tilting;
  RealTable expected;
  double residual_inf = 0.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Maximum-likelihood tilting for strictly positive plane-sum margins.
///
/// Damped Newton on the gauge-fixed parameters: the Hessian's kernel (shifts
/// between axes) is filled in with a rank-(k-1) term, steps are cut back to
/// keep every theta positive, then an Armijo line search on l (factor 0.5,
/// slope 1e-4). Once the predicted gain drops below what l can resolve in
/// double precision, steps are accepted on decrease of the margin residual. Throws ZeroMargin for a zero margin entry and
/// MismatchedTotals for inconsistent totals. Failure to converge is reported
/// through `converged == false` with the best iterate.
SolveReport solve_mle(const RealMargins& margins, const SolveOptions& options = {});
SolveReport solve_mle(const MarginSpec& spec, const SolveOptions& options = {});

// Conditional law of the geometric-cell model on a fiber, evaluated cell by
// cell from the product of geometric pmfs and normalized over the fiber.
std::vector<double> fiber_conditional_under_tilting(const Fiber& fiber, const Tilting& tilting);

// ---- Barvinok margins a = b = c = (B n^2, n^2, ..., n^2) ----------------

double critical_ratio_3way();                 // 1 / (2^{2/3} - 1)
double critical_ratio_2way(double C);         // 1 + sqrt(1 + 1/C)

enum class Regime { Subcritical, Supercritical, NearCritical };

inline constexpr double kNearCriticalBand = 0.05;

Regime classify_regime(double B, double critical, double band = kNearCriticalBand);
const char* to_string(Regime regime);

RealMargins barvinok_margins(std::size_t n, double B);

// Left-hand sides of the two reduced margin equations for P = 1 + p and
// Q = 1 + q; the right-hand sides are B n^2 and n^2.
struct BarvinokEquations {
  double heavy = 0.0;
  double light = 0.0;
};
BarvinokEquations barvinok_lhs(std::size_t n, double p, double q);

struct BarvinokCells {
  double z111 = 0.0, z121 = 0.0, z221 = 0.0, z222 = 0.0;
};

struct BarvinokSolution {
  double P = 0.0;
  double Q = 0.0;
  double p_minus_one = 0.0;  // P - 1 to full relative precision
  double q_minus_one = 0.0;
  std::size_t n = 0;
  double B = 0.0;
  Regime regime = Regime::Subcritical;
  double residual = 0.0;  // max relative residual of the two equations
  int iterations = 0;

  BarvinokCells cells() const;
};

/// Solves the symmetric reduction alpha = beta = gamma = (log P, log Q, ...)
/// by a 2-D Newton iteration on (log(P-1), log(Q-1)) with backtracking on the
/// log-residuals. Throws NotConverged if the relative residual stays above
/// `tol`.
BarvinokSolution barvinok_solve(std::size_t n, double B, double tol = 1e-10);

// Same iteration without the convergence check; `residual` tells the caller
// how far it got.
BarvinokSolution barvinok_solve_unchecked(std::size_t n, double B);

// ---- 2-way typical table ---------------------------------------------------

// g(X) = sum f(X_ij), f(x) = (x+1) log(x+1) - x log x.
double entropy_objective(const RealTable& table);

struct TypicalTable {
  RealTable table;
  double objective = 0.0;
  SolveReport report;
};

// Maximizer of g over the transportation polytope P(r, c), obtained from the
// dual geometric tilting Z_ij = 1/(e^{alpha_i + beta_j} - 1).
TypicalTable typical_table_2way(const std::vector<double>& rows, const std::vector<double>& cols,
                                const SolveOptions& options = {});

}  // namespace ctables
