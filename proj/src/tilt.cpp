#include "ctables/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "ctables/error.hpp"

namespace ctables {

namespace {

void require_positive(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw Error(ErrorKind::DomainError, "tilting parameter must be positive, got " +
                                            std::to_string(theta));
}

// Parameter slot of every cell on every axis, for a flat parameter vector
// laid out axis by axis.
struct CellLayout {
  Dims dims;
  std::vector<std::size_t> offsets;
  std::size_t params = 0;
  std::vector<std::size_t> slots;  // cells x rank

  explicit CellLayout(Dims d) : dims(std::move(d)) {
    for (auto n : dims) {
      offsets.push_back(params);
      params += n;
    }
    const std::size_t cells = cell_count(dims);
    slots.resize(cells * dims.size());
    for (std::size_t c = 0; c < cells; ++c) {
      auto idx = unflatten(dims, c);
      for (std::size_t a = 0; a < dims.size(); ++a) slots[c * dims.size() + a] = offsets[a] + idx[a];
    }
  }

  std::size_t cells() const { return slots.size() / dims.size(); }
  std::size_t slot(std::size_t cell, std::size_t axis) const { return slots[cell * dims.size() + axis]; }

  Eigen::VectorXd thetas(const Eigen::VectorXd& x) const {
    Eigen::VectorXd th(cells());
    for (std::size_t c = 0; c < cells(); ++c) {
      double s = 0.0;
      for (std::size_t a = 0; a < dims.size(); ++a) s += x[slot(c, a)];
      th[c] = s;
    }
    return th;
  }

  Eigen::VectorXd pack(const Tilting& t) const {
    Eigen::VectorXd x(params);
    for (std::size_t a = 0; a < dims.size(); ++a)
      for (std::size_t i = 0; i < dims[a]; ++i) x[offsets[a] + i] = t.axes[a][i];
    return x;
  }

  Tilting unpack(const Eigen::VectorXd& x) const {
    Tilting t;
    for (std::size_t a = 0; a < dims.size(); ++a)
      t.axes.emplace_back(x.data() + offsets[a], x.data() + offsets[a] + dims[a]);
    return t;
  }
};

Dims check_margins(const RealMargins& margins) {
  Dims dims;
  for (const auto& m : margins) dims.push_back(m.size());
  check_dims(dims);
  double total = -1.0;
  for (std::size_t a = 0; a < margins.size(); ++a) {
    double sum = 0.0;
    for (double v : margins[a]) {
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite margin entry");
      if (v < 0.0) throw Error(ErrorKind::NegativeEntry, "negative margin entry");
      if (v == 0.0)
        throw Error(ErrorKind::ZeroMargin, "margin entry on axis " + std::to_string(a) +
                                               " is zero; the MLE does not exist, remove that slice");
      sum += v;
    }
    if (total < 0.0) {
      total = sum;
    } else if (std::abs(sum - total) > 1e-12 * total) {
      throw Error(ErrorKind::MismatchedTotals, "axis totals differ");
    }
  }
  return dims;
}

double likelihood_value(const Eigen::VectorXd& s, const Eigen::VectorXd& x, const Eigen::VectorXd& th) {
  double v = -s.dot(x);
  for (Eigen::Index c = 0; c < th.size(); ++c) v -= log_partition(th[c]);
  return v;
}

void equalize_axis_means(const CellLayout& layout, Eigen::VectorXd& x) {
  const std::size_t k = layout.dims.size();
  std::vector<double> means(k);
  for (std::size_t a = 0; a < k; ++a)
    means[a] = x.segment(layout.offsets[a], layout.dims[a]).mean();
  const double target = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(k);
  for (std::size_t a = 0; a < k; ++a)
    x.segment(layout.offsets[a], layout.dims[a]).array() += target - means[a];
}

}  // namespace

double log_partition(double theta) {
  require_positive(theta);
  return theta > 1.0 ? -std::log1p(-std::exp(-theta)) : -std::log(-std::expm1(-theta));
}

double mean_count(double theta) {
  require_positive(theta);
  return 1.0 / std::expm1(theta);
}

double count_variance(double theta) {
  require_positive(theta);
  // e^t / (e^t - 1)^2 = 1 / ((e^t - 1)(1 - e^-t))
  return 1.0 / (std::expm1(theta) * -std::expm1(-theta));
}

RealMargins to_real(const MarginSpec& spec) {
  RealMargins m;
  for (const auto& axis : spec.axis_sums) m.emplace_back(axis.begin(), axis.end());
  return m;
}

Dims Tilting::dims() const {
  Dims d;
  for (const auto& a : axes) d.push_back(a.size());
  return d;
}

std::vector<double> cell_parameters(const Tilting& tilting) {
  const CellLayout layout(tilting.dims());
  const auto th = layout.thetas(layout.pack(tilting));
  return {th.data(), th.data() + th.size()};
}

Tilting gauge_normalized(Tilting tilting) {
  const CellLayout layout(tilting.dims());
  auto x = layout.pack(tilting);
  equalize_axis_means(layout, x);
  return layout.unpack(x);
}

RealTable expected_table(const Tilting& tilting) {
  auto th = cell_parameters(tilting);
  for (auto& t : th) t = mean_count(t);
  return RealTable(tilting.dims(), std::move(th));
}

LikelihoodEval log_likelihood(const RealMargins& margins, const Tilting& tilting) {
  if (tilting.dims() != check_margins(margins))
    throw Error(ErrorKind::DimensionMismatch, "tilting and margins have different shapes");
  const CellLayout layout(tilting.dims());
  const auto x = layout.pack(tilting);
  const auto th = layout.thetas(x);
  Eigen::VectorXd s(layout.params);
  for (std::size_t a = 0; a < margins.size(); ++a)
    for (std::size_t i = 0; i < margins[a].size(); ++i) s[layout.offsets[a] + i] = margins[a][i];
  LikelihoodEval out;
  out.value = likelihood_value(s, x, th);
  const RealTable z = expected_table(tilting);
  for (std::size_t a = 0; a < margins.size(); ++a) {
    auto m = plane_margins(z, a);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] -= margins[a][i];
    out.gradient.push_back(std::move(m));
  }
  return out;
}

double margin_residual(const RealMargins& margins, const RealTable& expected) {
  double worst = 0.0;
  for (std::size_t a = 0; a < margins.size(); ++a) {
    const auto m = plane_margins(expected, a);
    for (std::size_t i = 0; i < m.size(); ++i)
      worst = std::max(worst, std::abs(m[i] - margins[a][i]) / margins[a][i]);
  }
  return worst;
}

SolveReport solve_mle(const RealMargins& margins, const SolveOptions& options) {
  const Dims dims = check_margins(margins);
  const CellLayout layout(dims);
  const std::size_t k = dims.size();
  const std::size_t cells = layout.cells();
  const auto D = static_cast<Eigen::Index>(layout.params);

  Eigen::VectorXd s(D);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < dims[a]; ++i) s[layout.offsets[a] + i] = margins[a][i];
  const double total = std::accumulate(margins[0].begin(), margins[0].end(), 0.0);

  // Constant start: exact for constant margins.
  const double theta0 = std::log1p(static_cast<double>(cells) / total);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(D, theta0 / static_cast<double>(k));

  // Kernel of the parameter-to-theta map: +1 on axis 0, -1 on axis a.
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(D, static_cast<Eigen::Index>(k - 1));
  for (std::size_t a = 1; a < k; ++a) {
    kernel.col(a - 1).segment(0, dims[0]).setOnes();
    kernel.col(a - 1).segment(layout.offsets[a], dims[a]).setConstant(-1.0);
  }

  auto gradient_and_residual = [&](const Eigen::VectorXd& th, Eigen::VectorXd& grad) {
    grad = -s;
    for (std::size_t c = 0; c < cells; ++c) {
      const double z = mean_count(th[c]);
      for (std::size_t a = 0; a < k; ++a) grad[layout.slot(c, a)] += z;
    }
    return (grad.array().abs() / s.array()).maxCoeff();
  };

  Eigen::VectorXd th = layout.thetas(x);
  Eigen::VectorXd grad;
  double residual = gradient_and_residual(th, grad);
  double value = likelihood_value(s, x, th);
  int iter = 0;
  while (residual > options.tol && iter < options.max_iter) {
    ++iter;
    // Negative Hessian: sum over cells of var * e_c e_c^T.
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(D, D);
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = count_variance(th[c]);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) info(layout.slot(c, a), layout.slot(c, b)) += v;
    }
    const double scale = info.diagonal().mean();
    info += scale * kernel * kernel.transpose();
    const Eigen::VectorXd step = info.ldlt().solve(grad);
    if (!step.allFinite()) break;

    const Eigen::VectorXd dth = layout.thetas(step);
    double t = 1.0;
    for (std::size_t c = 0; c < cells; ++c)
      if (dth[c] < 0.0) t = std::min(t, 0.99 * (th[c] - 1e-14) / -dth[c]);

    const double slope = grad.dot(step);
    // Below this predicted gain, l cannot resolve the Armijo test and the
    // margin residual takes over as the merit function.
    const double resolvable = 1e3 * std::numeric_limits<double>::epsilon() * (std::abs(value) + 1.0);
    const double t_max = t;
    Eigen::VectorXd trial;
    Eigen::VectorXd trial_th;
    bool accepted = false;
    if (t * slope > resolvable) {
      for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
        trial = x + t * step;
        trial_th = layout.thetas(trial);
        if ((trial_th.array() <= 0.0).any()) continue;
        const double trial_value = likelihood_value(s, trial, trial_th);
        if (trial_value >= value + 1e-4 * t * slope && t * slope > resolvable) {
          accepted = true;
          value = trial_value;
          break;
        }
      }
    }
    if (!accepted) {
      t = t_max;
      for (int halvings = 0; halvings < 30 && !accepted; ++halvings, t *= 0.5) {
        trial = x + t * step;
        trial_th = layout.thetas(trial);
        if ((trial_th.array() <= 0.0).any()) continue;
        Eigen::VectorXd trial_grad;
        if (gradient_and_residual(trial_th, trial_grad) < residual) {
          accepted = true;
          value = likelihood_value(s, trial, trial_th);
        }
      }
      if (!accepted) break;
    }
    x = trial;
    equalize_axis_means(layout, x);
    th = layout.thetas(x);
    residual = gradient_and_residual(th, grad);
  }

  SolveReport report;
  report.tilting = layout.unpack(x);
  report.expected = expected_table(report.tilting);
  report.residual_inf = residual;
  report.log_likelihood = likelihood_value(s, x, th);
  report.iterations = iter;
  report.converged = residual <= options.tol;
  return report;
}

SolveReport solve_mle(const MarginSpec& spec, const SolveOptions& options) {
  validate_margin_spec(spec);
  return solve_mle(to_real(spec), options);
}

std::vector<double> fiber_conditional_under_tilting(const Fiber& fiber, const Tilting& tilting) {
  if (tilting.dims() != fiber.spec.dims())
    throw Error(ErrorKind::DimensionMismatch, "tilting and fiber have different shapes");
  const auto th = cell_parameters(tilting);
  std::vector<double> logw;
  logw.reserve(fiber.size());
  for (const auto& table : fiber.tables) {
    double lp = 0.0;
    for (std::size_t c = 0; c < table.size(); ++c)
      lp += -th[c] * static_cast<double>(table[c]) - log_partition(th[c]);
    logw.push_back(lp);
  }
  return normalize_log_weights(logw);
}

// ---- Barvinok margins ------------------------------------------------------

double critical_ratio_3way() { return 1.0 / (std::cbrt(4.0) - 1.0); }

double critical_ratio_2way(double C) {
  if (!(C > 0.0)) throw Error(ErrorKind::InvalidInput, "C must be positive");
  return 1.0 + std::sqrt(1.0 + 1.0 / C);
}

Regime classify_regime(double B, double critical, double band) {
  if (std::abs(B - critical) < band) return Regime::NearCritical;
  return B < critical ? Regime::Subcritical : Regime::Supercritical;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Supercritical: return "supercritical";
    case Regime::NearCritical: return "near-critical";
  }
  return "unknown";
}

RealMargins barvinok_margins(std::size_t n, double B) {
  if (n < 2 || !(B > 0.0)) throw Error(ErrorKind::InvalidInput, "need n >= 2 and B > 0");
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  std::vector<double> axis(n, n2);
  axis[0] = B * n2;
  return RealMargins(3, axis);
}

namespace {

// Denominators P^3-1, P^2Q-1, PQ^2-1, Q^3-1 written without cancellation.
struct Denominators {
  double d111, d121, d221, d222;
};

Denominators denominators(double p, double q) {
  return {p * (p * p + 3.0 * p + 3.0), (1.0 + p) * (1.0 + p) * q + p * (2.0 + p),
          (1.0 + q) * (1.0 + q) * p + q * (2.0 + q), q * (q * q + 3.0 * q + 3.0)};
}

}  // namespace

BarvinokEquations barvinok_lhs(std::size_t n, double p, double q) {
  const auto d = denominators(p, q);
  const double m = static_cast<double>(n) - 1.0;
  return {1.0 / d.d111 + 2.0 * m / d.d121 + m * m / d.d221,
          1.0 / d.d121 + 2.0 * m / d.d221 + m * m / d.d222};
}

BarvinokCells BarvinokSolution::cells() const {
  const auto d = denominators(p_minus_one, q_minus_one);
  return {1.0 / d.d111, 1.0 / d.d121, 1.0 / d.d221, 1.0 / d.d222};
}

BarvinokSolution barvinok_solve_unchecked(std::size_t n, double B) {
  if (n < 2 || !(B > 0.0) || !std::isfinite(B))
    throw Error(ErrorKind::InvalidInput, "need n >= 2 and finite B > 0");
  const double nn = static_cast<double>(n);
  const double m = nn - 1.0;
  const double heavy_rhs = B * nn * nn;
  const double light_rhs = nn * nn;
  const double Bc = critical_ratio_3way();

  auto residuals = [&](double u, double v) {
    const auto lhs = barvinok_lhs(n, std::exp(u), std::exp(v));
    return Eigen::Vector2d(std::log(lhs.heavy / heavy_rhs), std::log(lhs.light / light_rhs));
  };
  auto relative = [&](double u, double v) {
    const auto lhs = barvinok_lhs(n, std::exp(u), std::exp(v));
    return std::max(std::abs(lhs.heavy / heavy_rhs - 1.0), std::abs(lhs.light / light_rhs - 1.0));
  };

  // Start from the large-n asymptotics: Q^3 = 2, and P from the subcritical
  // limit or P^3 - 1 = 1/(n^2 (B - B_c)).
  const double ratio = (1.0 / B + 1.0) / std::cbrt(4.0);
  double u = std::log(std::max(ratio - 1.0, 1.0 / (3.0 * nn * nn * std::max(B - Bc, 1.0 / nn))));
  double v = std::log(std::cbrt(2.0) - 1.0);

  Eigen::Vector2d F = residuals(u, v);
  int iter = 0;
  for (; iter < 200 && relative(u, v) > 1e-15; ++iter) {
    const double p = std::exp(u), q = std::exp(v);
    const double P = 1.0 + p, Q = 1.0 + q;
    const auto d = denominators(p, q);
    const auto lhs = barvinok_lhs(n, p, q);
    const double s111 = 1.0 / (d.d111 * d.d111), s121 = 1.0 / (d.d121 * d.d121);
    const double s221 = 1.0 / (d.d221 * d.d221), s222 = 1.0 / (d.d222 * d.d222);
    Eigen::Matrix2d J;
    J(0, 0) = -(3.0 * P * P * s111 + 2.0 * m * 2.0 * P * Q * s121 + m * m * Q * Q * s221) * p / lhs.heavy;
    J(0, 1) = -(2.0 * m * P * P * s121 + m * m * 2.0 * P * Q * s221) * q / lhs.heavy;
    J(1, 0) = -(2.0 * P * Q * s121 + 2.0 * m * Q * Q * s221) * p / lhs.light;
    J(1, 1) = -(P * P * s121 + 2.0 * m * 2.0 * P * Q * s221 + m * m * 3.0 * Q * Q * s222) * q / lhs.light;
    Eigen::Vector2d step = -J.partialPivLu().solve(F);
    if (!step.allFinite()) break;
    const double longest = step.cwiseAbs().maxCoeff();
    if (longest > 3.0) step *= 3.0 / longest;

    const double merit = F.squaredNorm();
    double t = 1.0;
    bool moved = false;
    for (int halvings = 0; halvings < 50; ++halvings, t *= 0.5) {
      const Eigen::Vector2d trial = residuals(u + t * step[0], v + t * step[1]);
      if (trial.allFinite() && trial.squaredNorm() < merit) {
        u += t * step[0];
        v += t * step[1];
        F = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  BarvinokSolution sol;
  sol.p_minus_one = std::exp(u);
  sol.q_minus_one = std::exp(v);
  sol.P = 1.0 + sol.p_minus_one;
  sol.Q = 1.0 + sol.q_minus_one;
  sol.n = n;
  sol.B = B;
  sol.regime = classify_regime(B, Bc);
  sol.residual = relative(u, v);
  sol.iterations = iter;
  return sol;
}

BarvinokSolution barvinok_solve(std::size_t n, double B, double tol) {
  BarvinokSolution sol = barvinok_solve_unchecked(n, B);
  if (!(sol.residual <= tol))
    throw Error(ErrorKind::NotConverged,
                "Barvinok system n=" + std::to_string(n) + " B=" + std::to_string(B) +
                    ": residual " + std::to_string(sol.residual) + " after " + std::to_string(sol.iterations) +
                    " iterations at P-1=" + std::to_string(sol.p_minus_one) +
                    ", Q-1=" + std::to_string(sol.q_minus_one));
  return sol;
}

// ---- 2-way typical table ---------------------------------------------------

double entropy_objective(const RealTable& table) {
  double g = 0.0;
  for (double x : table.data()) g += (x + 1.0) * std::log1p(x) - (x > 0.0 ? x * std::log(x) : 0.0);
  return g;
}

TypicalTable typical_table_2way(const std::vector<double>& rows, const std::vector<double>& cols,
                                const SolveOptions& options) {
  SolveReport report = solve_mle(RealMargins{rows, cols}, options);
  TypicalTable out{report.expected, entropy_objective(report.expected), std::move(report)};
  return out;
}

}  // namespace ctables
