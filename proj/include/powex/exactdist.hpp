#pragma once

// Exact cdf, pdf and moments of the normalized powered extreme
// (|M_n|^t - d)/c. Every n-fold power goes through exponents of the form
//   n * ln Phi(z) = -exp(log_n + ln(-ln Phi(z))),
// never through Phi^n directly: n overflows and the tail underflows long
// before their combination does. Moments integrate in y = z_n space, where
// the integrand is a smooth bump near y = b with Gaussian decay and no
// endpoint singularity.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "powex/norming.hpp"
#include "powex/quadrature.hpp"
#include "powex/specfun.hpp"

namespace powex {

struct MomentEstimate {
  enum class Method { quadrature, montecarlo };
  int r = 0;
  double value = 0.0;
  double error_bound = 0.0;
  Method method = Method::quadrature;
  double std_error = 0.0;       // montecarlo only
  std::uint64_t samples = 0;    // montecarlo only
  bool converged = true;
};

namespace detail {

// ln(-ln Phi(y)) for y >= 0. With A = -ln Phi = Q + Q^2/2 + ... this is
// log(A); once Q underflows (y > 36) A equals Q to double precision and the
// asymptotic log-tail takes over.
inline double log_neg_log_phi(double y) {
  const TailValue tv = normal_tail(y);
  if (y <= 36.0) return std::log(-std::log1p(-tv.q));
  return tv.log_q;
}

// log_n + ln(-ln Phi(y)), with the b^2/2 and y^2/2 pieces cancelled
// analytically when both sides live on the asymptotic tail; for b, y >= 36
// the naive sum would otherwise lose ~eps * b^2/2 absolute.
inline double scaled_tail_exponent(const NormingScale& s, double y) {
  if (y > 36.0 && s.b >= 36.0) {
    const double quad = 0.5 * (s.b - y) * (s.b + y); // (b^2 - y^2)/2
    return quad + std::log(s.b / y) + mills_log4(y);
  }
  return s.log_n + log_neg_log_phi(y);
}

// n * ln Phi(y) (or (n-1) * ln Phi(y) with use_nm1) for y >= 0
inline double n_log_phi(const NormingScale& s, double y, bool use_nm1) {
  double e = scaled_tail_exponent(s, y);
  if (use_nm1) {
    // ln(n-1) = log_n + log1p(-1/n)
    const double inv_n = s.log_n < 700.0 ? std::exp(-s.log_n) : 0.0;
    e += std::log1p(-inv_n);
  }
  if (e > 700.0) return -std::numeric_limits<double>::infinity();
  return -std::exp(e);
}

// n * ln Phi(-y) = n * ln Q(y) for y >= 0
inline double n_log_phi_neg(const NormingScale& s, double y, bool use_nm1) {
  const TailValue tv = normal_tail(y);
  double logn = s.log_n;
  if (use_nm1) {
    const double inv_n = s.log_n < 700.0 ? std::exp(-s.log_n) : 0.0;
    logn += std::log1p(-inv_n);
  }
  const double e = logn + std::log(-tv.log_q);
  if (e > 700.0) return -std::numeric_limits<double>::infinity();
  return -std::exp(e);
}

// x(y) = (y^t - d)/c without cancellation near y = b
inline double x_of_y(const NormingScale& s, double y) {
  if (s.is_two) {
    return ((y - s.b) * (y + s.b) + 2.0 / (s.b * s.b)) / s.c;
  }
  if (y <= 0.0) return s.support_left;
  // y^t - d = d expm1(t ln(y/b))
  return s.d * std::expm1(s.t * std::log(y / s.b)) / s.c;
}

// ln of n phi(y) with the log_n cancellation handled: the scale stores
// log_n = b^2/2 + ln b + ln(2pi)/2 exactly, so
// log_n + ln phi(y) = (b-y)(b+y)/2 + ln b.
inline double log_n_phi(const NormingScale& s, double y) {
  return 0.5 * (s.b - y) * (s.b + y) + std::log(s.b);
}

} // namespace detail

// P((|M_n|^t - d)/c <= x) = Phi^n(z_n) - Phi^n(-z_n)
inline double powered_cdf(const NormingScale& s, double x) {
  if (!(s.c * x + s.d > 0.0)) return 0.0;
  const double z = z_of_x(s, x);
  const double upper = std::exp(detail::n_log_phi(s, z, false));
  const double lower = std::exp(detail::n_log_phi_neg(s, z, false));
  double p = upper - lower;
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

// g_{n,t}(x) = C_n(x) (Phi^{n-1}(z_n) + Phi^{n-1}(-z_n)), 0 outside support
inline double powered_pdf(const NormingScale& s, double x) {
  if (!(s.c * x + s.d > 0.0)) return 0.0;
  const double z = z_of_x(s, x);
  const double li = log_intensity(s, x);
  const double a1 = li + detail::n_log_phi(s, z, true);
  const double a2 = li + detail::n_log_phi_neg(s, z, true);
  return std::exp(a1) + std::exp(a2);
}

namespace detail {

// y-space integrand of the r-th moment:
//   f(y) = n phi(y) (Phi^{n-1}(y) + Phi^{n-1}(-y)) x(y)^r
inline double moment_integrand(const NormingScale& s, int r, double y) {
  if (y <= 0.0) return 0.0;
  const double lw = log_n_phi(s, y);
  const double e1 = lw + n_log_phi(s, y, true);
  const double e2 = lw + n_log_phi_neg(s, y, true);
  const double xv = x_of_y(s, y);
  double xr = 1.0;
  for (int i = 0; i < r; ++i) xr *= xv;
  return (std::exp(e1) + std::exp(e2)) * xr;
}

// log-magnitude used for window location only
inline double moment_log_magnitude(const NormingScale& s, int r, double y) {
  if (y <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lw = log_n_phi(s, y);
  const double tail1 = n_log_phi(s, y, true);
  const double tail2 = n_log_phi_neg(s, y, true);
  const double xv = std::abs(x_of_y(s, y));
  const double xterm = r > 0 ? r * std::log(std::max(xv, 1e-300)) : 0.0;
  return lw + std::max(tail1, tail2) + xterm;
}

} // namespace detail

// Exact r-th moment by quadrature. The window around y ~ b expands until the
// log-integrand has dropped 60 nats below its running peak on both sides;
// analytic bounds for the discarded tails are folded into error_bound.
inline MomentEstimate exact_moment(const NormingScale& s, int r, const QuadratureConfig& cfg = {}) {
  if (r < 0) throw std::invalid_argument("exact_moment: requires r >= 0");

  const double step = 0.5 / std::max(s.b, 1.0);
  const double drop = 60.0;

  double peak = detail::moment_log_magnitude(s, r, s.b);
  // right expansion
  double y_hi = s.b;
  for (int i = 1; i < 200000; ++i) {
    const double y = s.b + i * step;
    const double lm = detail::moment_log_magnitude(s, r, y);
    if (lm > peak) peak = lm;
    y_hi = y;
    if (lm < peak - drop) break;
  }
  // left expansion
  double y_lo = s.b;
  for (int i = 1;; ++i) {
    const double y = s.b - i * step;
    if (y <= step) {
      y_lo = 0.0;
      break;
    }
    const double lm = detail::moment_log_magnitude(s, r, y);
    if (lm > peak) peak = lm;
    y_lo = y;
    if (lm < peak - drop) break;
  }

  auto f = [&s, r](double y) { return detail::moment_integrand(s, r, y); };
  const IntegralResult res = integrate(f, y_lo, y_hi, cfg);

  // analytic tail bounds
  double tail_err = 0.0;
  {
    // right: integrand <= n phi(y) (y^t/c)^r and
    // int_y^inf phi(u) u^m du <= 2 phi(y) y^{m-1} once y^2 >= 2m
    const double m = s.t * r;
    const double log_right = detail::log_n_phi(s, y_hi) + (m - 1.0) * std::log(y_hi) -
                             r * std::log(s.c) + std::log(2.0);
    if (y_hi * y_hi >= 2.0 * m + 2.0) tail_err += std::exp(std::min(log_right, 700.0));
    if (y_lo > 0.0) {
      // left: |x| <= d/c on (0, y_lo], and n phi(y) Phi^{n-1}(y) increases
      // up to the peak near y = b, so its sup over (0, y_lo] sits at y_lo
      // (factor 2 covers the O(1/b) slack next to the peak); the
      // Phi^{n-1}(-y) piece is dominated by n phi(0) 2^{-(n-1)}
      const double lx = r * (std::log(s.d) - std::log(s.c));
      const double log_f1 = std::log(y_lo) + detail::log_n_phi(s, y_lo) +
                            detail::n_log_phi(s, y_lo, true) + lx + std::log(2.0);
      const double log_f2 = std::log(y_lo) + s.log_n + std::log(kInvSqrt2Pi) +
                            detail::n_log_phi_neg(s, 0.0, true) + lx;
      tail_err += std::exp(std::min(log_f1, 700.0)) + std::exp(std::min(log_f2, 700.0));
    }
  }

  MomentEstimate est;
  est.r = r;
  est.value = res.value;
  est.error_bound = res.error_bound + tail_err;
  est.method = MomentEstimate::Method::quadrature;
  est.converged = res.converged;
  return est;
}

} // namespace powex
