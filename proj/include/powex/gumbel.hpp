#pragma once

// Gumbel law Lambda(x) = exp(-e^{-x}): cdf/pdf, raw moments m_r via the
// cumulant recursion (k1 = gamma, k_j = (j-1)! zeta(j)), and the matching
// quadrature oracles. Tilted moments T_{r,k} = int x^r e^{-kx} dLambda are
// the building blocks that turn kernel integrals into moment combinations.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "powex/quadrature.hpp"
#include "powex/specfun.hpp"

namespace powex {

struct GumbelPoint {
  double cdf;
  double pdf;
};

inline GumbelPoint gumbel_cdf_pdf(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("gumbel_cdf_pdf: non-finite argument");
  const double w = std::exp(-x); // may overflow to +inf for very negative x
  const double cdf = std::exp(-w);
  const double pdf = std::exp(-x - w); // log-domain form; -x - inf -> -inf -> 0
  return {cdf, pdf};
}

struct GumbelMomentTable {
  int max_order = 0;
  std::vector<double> moments;   // m_0..m_R
  std::vector<double> cumulants; // cumulants[j] = kappa_{j+1}, j = 0..R-1

  double moment(int r) const {
    if (r < 0 || r > max_order) throw std::invalid_argument("GumbelMomentTable: order out of range");
    return moments[static_cast<std::size_t>(r)];
  }
};

inline GumbelMomentTable moment_table(int R) {
  if (R < 0 || R > kZetaMaxOrder) throw std::invalid_argument("moment_table: requires 0 <= R <= 16 (zeta table bound)");
  GumbelMomentTable tbl;
  tbl.max_order = R;
  tbl.cumulants.resize(static_cast<std::size_t>(R));
  for (int j = 1; j <= R; ++j) {
    if (j == 1) {
      tbl.cumulants[0] = kEulerGamma;
    } else {
      double fact = 1.0;
      for (int i = 2; i < j; ++i) fact *= i;
      tbl.cumulants[static_cast<std::size_t>(j - 1)] = fact * kZeta[j - 2];
    }
  }
  tbl.moments.resize(static_cast<std::size_t>(R) + 1);
  tbl.moments[0] = 1.0;
  for (int r = 1; r <= R; ++r) {
    double binom = 1.0;
    double sum = 0.0;
    for (int j = 0; j <= r - 1; ++j) {
      // binom = C(r-1, j)
      sum += binom * tbl.cumulants[static_cast<std::size_t>(j)] * tbl.moments[static_cast<std::size_t>(r - 1 - j)];
      binom = binom * (r - 1 - j) / (j + 1);
    }
    tbl.moments[static_cast<std::size_t>(r)] = sum;
  }
  return tbl;
}

namespace detail {

// int_0^inf (-ln u)^r u^k e^{-u} du, split at u = 1 (log singularity at 0).
inline double log_power_integral(int r, int k, double target_abs_tol) {
  auto f = [r, k](double u) {
    const double lg = -std::log(u);
    double p = 1.0;
    for (int i = 0; i < r; ++i) p *= lg;
    double uk = 1.0;
    for (int i = 0; i < k; ++i) uk *= u;
    return p * uk * std::exp(-u);
  };
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 0.5 * target_abs_tol; // per half
  const IntegralResult left = integrate(f, 0.0, 1.0, cfg);
  const IntegralResult right = integrate(f, 1.0, INFINITY, cfg);
  if (!left.converged || !right.converged) {
    throw std::runtime_error("gumbel moment quadrature did not converge; achieved error bound " +
                             std::to_string(left.error_bound + right.error_bound));
  }
  return left.value + right.value;
}

} // namespace detail

inline double tilted_moment(int r, int k) {
  if (r < 0 || r > kZetaMaxOrder) throw std::invalid_argument("tilted_moment: requires 0 <= r <= 16");
  if (k < 0 || k > 2) throw std::invalid_argument("tilted_moment: requires 0 <= k <= 2");
  // scale the absolute target by a crude magnitude bound (T grows ~ r!)
  double mag = 1.0;
  for (int i = 2; i <= r; ++i) mag *= i;
  return detail::log_power_integral(r, k, 1e-11 * std::max(1.0, mag));
}

inline double moment_quadrature_oracle(int r) {
  if (r < 0 || r > kZetaMaxOrder) throw std::invalid_argument("moment_quadrature_oracle: requires 0 <= r <= 16");
  return tilted_moment(r, 0);
}

} // namespace powex
