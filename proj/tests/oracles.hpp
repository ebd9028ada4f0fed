#pragma once

// Test-only reference computations, deliberately written without the
// library's enumeration, solver or pruning code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// All nonnegative tables with the given plane sums, filling cells from the
// LAST flat offset backwards with only the trivial upper bound. Returned as
// flat row-major vectors, sorted.
inline std::vector<std::vector<std::int64_t>> reverse_order_fiber(
    const std::vector<std::vector<std::int64_t>>& sums) {
  std::vector<std::size_t> dims;
  for (const auto& s : sums) dims.push_back(s.size());
  std::size_t cells = 1;
  for (auto d : dims) cells *= d;
  auto coord = [&](std::size_t flat, std::size_t axis) {
    std::size_t stride = 1;
    for (std::size_t a = dims.size(); a-- > axis + 1;) stride *= dims[a];
    return (flat / stride) % dims[axis];
  };
  auto rem = sums;
  std::vector<std::int64_t> cur(cells, 0);
  std::vector<std::vector<std::int64_t>> out;
  std::function<void(std::size_t)> rec = [&](std::size_t left) {
    if (left == 0) {
      for (const auto& r : rem)
        for (auto v : r)
          if (v != 0) return;
      out.push_back(cur);
      return;
    }
    const std::size_t c = left - 1;
    std::int64_t hi = INT64_MAX;
    for (std::size_t a = 0; a < dims.size(); ++a) hi = std::min(hi, rem[a][coord(c, a)]);
    for (std::int64_t v = 0; v <= hi; ++v) {
      for (std::size_t a = 0; a < dims.size(); ++a) rem[a][coord(c, a)] -= v;
      cur[c] = v;
      rec(c);
      for (std::size_t a = 0; a < dims.size(); ++a) rem[a][coord(c, a)] += v;
    }
    cur[c] = 0;
  };
  rec(cells);
  std::sort(out.begin(), out.end());
  return out;
}

// Typical table of a 2-way margin by primal ascent of
// g(X) = sum (x+1)log(x+1) - x log x on the affine set {rows r, cols c}:
// the gradient log(1 + 1/x) is projected onto zero-margin matrices and
// steps are scaled by the local curvature x(x+1).
inline std::vector<std::vector<double>> typical_table_primal(const std::vector<double>& r,
                                                             const std::vector<double>& c,
                                                             double tol = 1e-12,
                                                             int max_iter = 2000000) {
  const std::size_t m = r.size(), n = c.size();
  double total = 0;
  for (double x : r) total += x;
  std::vector<std::vector<double>> X(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) X[i][j] = r[i] * c[j] / total;
  auto project = [&](std::vector<std::vector<double>>& G) {
    std::vector<double> rm(m, 0), cm(n, 0);
    double gm = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        rm[i] += G[i][j] / n;
        cm[j] += G[i][j] / m;
        gm += G[i][j] / (m * n);
      }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) G[i][j] -= rm[i] + cm[j] - gm;
  };
  for (int it = 0; it < max_iter; ++it) {
    std::vector<std::vector<double>> G(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) G[i][j] = std::log1p(1.0 / X[i][j]);
    project(G);
    double gmax = 0, eta = INFINITY;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        gmax = std::max(gmax, std::abs(G[i][j]));
        eta = std::min(eta, X[i][j] * (X[i][j] + 1.0));
      }
    if (gmax < tol) break;
    eta *= 0.25;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) X[i][j] += eta * G[i][j];
  }
  return X;
}

struct BarvinokRoot {
  long double P = 0, Q = 0;
};

// Symmetric 3-way Barvinok system solved by nested bisection in long double:
// the inner loop solves the light margin equation for P given Q, the outer
// loop moves Q until the heavy equation balances. Cells are evaluated as
// 1/(P^a Q^b - 1) directly.
inline BarvinokRoot barvinok_bisect(std::size_t n, double B) {
  using ld = long double;
  const ld m = static_cast<ld>(n) - 1, n2 = static_cast<ld>(n) * n;
  auto cells = [](ld P, ld Q) {
    return std::array<ld, 4>{1 / (P * P * P - 1), 1 / (P * P * Q - 1), 1 / (P * Q * Q - 1),
                             1 / (Q * Q * Q - 1)};
  };
  auto light = [&](ld P, ld Q) {
    const auto z = cells(P, Q);
    return z[1] + 2 * m * z[2] + m * m * z[3];
  };
  auto heavy = [&](ld P, ld Q) {
    const auto z = cells(P, Q);
    return z[0] + 2 * m * z[1] + m * m * z[2];
  };
  // bisection on log(x - 1) for a decreasing function f with f(lo) > 0 > f(hi)
  auto solve = [](auto f, ld lo, ld hi) {
    for (int it = 0; it < 400; ++it) {
      const ld mid = (lo + hi) / 2;
      (f(1 + std::exp(mid)) > 0 ? lo : hi) = mid;
    }
    return 1 + std::exp((lo + hi) / 2);
  };
  auto p_of_q = [&](ld Q) {
    return solve([&](ld P) { return light(P, Q) - n2; }, -60.0L, 10.0L);
  };
  // heavy(P(Q), Q) increases with Q along the light curve
  ld lo = std::log(std::cbrt(1 + 1 / (n2 / (m * m))) - 1), hi = 5.0L;
  for (int it = 0; it < 300; ++it) {
    const ld mid = (lo + hi) / 2;
    const ld Q = 1 + std::exp(mid);
    (heavy(p_of_q(Q), Q) < static_cast<ld>(B) * n2 ? lo : hi) = mid;
  }
  const ld Q = 1 + std::exp((lo + hi) / 2);
  return {p_of_q(Q), Q};
}

// Corner entry of the 2-way typical table for margins with `k` bezel rows and
// columns of margin `rb` and `n` bulk ones of margin `ru`. By symmetry the
// row and column parameters agree and take two values, a (bezel) and
// c (bulk); both equations are solved by nested bisection on log a, log c.
inline double two_class_corner(std::size_t k, std::size_t n, double rb, double ru) {
  using ld = long double;
  const ld K = static_cast<ld>(k), N = static_cast<ld>(n);
  auto z = [](ld t) { return 1 / std::expm1(t); };
  auto c_of_a = [&](ld a) {
    ld lo = -40, hi = 6;
    for (int it = 0; it < 300; ++it) {
      const ld mid = (lo + hi) / 2, c = std::exp(mid);
      (K * z(a + c) + N * z(2 * c) > ru ? lo : hi) = mid;
    }
    return std::exp((lo + hi) / 2);
  };
  ld lo = -40, hi = 6;
  for (int it = 0; it < 300; ++it) {
    const ld mid = (lo + hi) / 2, a = std::exp(mid), c = c_of_a(a);
    (K * z(2 * a) + N * z(a + c) > rb ? lo : hi) = mid;
  }
  return static_cast<double>(z(2 * std::exp((lo + hi) / 2)));
}

}  // namespace oracle
