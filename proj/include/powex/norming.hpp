#pragma once

// Optimal norming for powered normal extremes |M_n|^t:
//   2 pi b^2 exp(b^2) = n^2
//   t != 2:  c = t b^{t-2},      d = b^t
//   t == 2:  c = 2 - 2 b^{-2},   d = b^2 - 2 b^{-2}
// n is treated as real-valued throughout the analytic pipeline; only the
// Monte Carlo sampler insists on integers. log_n is stored instead of n so
// effective sample sizes up to e^{1e5} stay representable.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "powex/specfun.hpp"

namespace powex {

struct NormingScale {
  double t = 1.0;
  bool is_two = false;
  double b = 0.0;
  double log_n = 0.0; // = b^2/2 + ln b + ln(2 pi)/2, exactly as stored
  double c = 0.0;
  double d = 0.0;
  double support_left = 0.0; // -d/c; the density lives on (support_left, inf)
};

// True when t is close to, but not exactly, 2. The t = 2 branch is selected
// by exact equality and the two expansion families do not connect
// continuously, so such t gets a stderr note when a scale is built.
inline bool near_two(double t) {
  return t != 2.0 && std::abs(t - 2.0) < 1e-6;
}

namespace detail {

inline void check_power_index(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("norming: power index t must be > 0");
  if (near_two(t)) {
    std::fputs("powex: warning: t within 1e-6 of 2 but not equal; the t != 2 expansion branch applies\n", stderr);
  }
}

inline NormingScale build_scale(double t, double b) {
  NormingScale s;
  s.t = t;
  s.is_two = (t == 2.0);
  s.b = b;
  s.log_n = 0.5 * b * b + std::log(b) + 0.5 * kLn2Pi;
  if (s.is_two) {
    const double ib2 = 1.0 / (b * b);
    s.c = 2.0 - 2.0 * ib2;
    s.d = b * b - 2.0 * ib2;
  } else {
    s.c = t * std::pow(b, t - 2.0);
    s.d = std::pow(b, t);
  }
  s.support_left = -s.d / s.c;
  return s;
}

inline void check_support(const NormingScale& s, double x) {
  const double w = s.c * x + s.d;
  if (!(w > 0.0)) {
    std::ostringstream msg;
    msg << "argument x = " << x << " is outside the support (x must exceed -d/c = " << s.support_left << ")";
    throw std::domain_error(msg.str());
  }
}

// log1p-style offsets: cx + d = b^t (1 + t x / b^2)          (t != 2)
//                      cx + d = b^2 (1 + theta)              (t == 2)
inline double log_offset(const NormingScale& s, double x) {
  if (s.is_two) {
    const double ib2 = 1.0 / (s.b * s.b);
    return std::log1p((2.0 * x - 2.0 * (1.0 + x) * ib2) * ib2);
  }
  return std::log1p(s.t * x / (s.b * s.b));
}

} // namespace detail

inline NormingScale scale_from_n(double t, double n) {
  detail::check_power_index(t);
  if (!(n > 3.0)) throw std::invalid_argument("scale_from_n: requires n > 3");
  // b^2 = W(n^2 / (2 pi)), solved in log space
  const double log_a = 2.0 * std::log(n) - kLn2Pi;
  const double u = product_log_from_log(log_a);
  const double b = std::sqrt(u);
  if (t == 2.0 && !(b > 1.0)) {
    std::ostringstream msg;
    msg << "scale_from_n: t = 2 requires b > 1 (else c <= 0); n = " << n << " gives b = " << b;
    throw std::invalid_argument(msg.str());
  }
  return detail::build_scale(t, b);
}

inline NormingScale scale_from_b(double t, double b) {
  detail::check_power_index(t);
  if (!(b > 1.0)) throw std::invalid_argument("scale_from_b: requires b > 1");
  return detail::build_scale(t, b);
}

// z_n = (c x + d)^{1/t}
inline double z_of_x(const NormingScale& s, double x) {
  detail::check_support(s, x);
  const double w = s.c * x + s.d;
  if (s.is_two) return std::sqrt(w);
  if (s.t == 1.0) return w;
  return std::pow(w, 1.0 / s.t);
}

// ln C_n(x) with C_n(x) = n phi(z_n) dz_n/dx, arranged so the analytic
// cancellation of the b^2/2 and ln b pieces happens exactly:
//   t != 2: ln C = -(b^2/2) expm1(2 lam / t) + (1/t - 1) lam,
//           lam = log1p(t x / b^2)
//   t == 2: ln C = -x + (1+x)/b^2 + log1p(-1/b^2) - lam/2,
//           lam = log1p(2 x / b^2 - 2(1+x)/b^4)
inline double log_intensity(const NormingScale& s, double x) {
  detail::check_support(s, x);
  const double lam = detail::log_offset(s, x);
  if (s.is_two) {
    const double ib2 = 1.0 / (s.b * s.b);
    return -x + (1.0 + x) * ib2 + std::log1p(-ib2) - 0.5 * lam;
  }
  return -(0.5 * s.b * s.b) * std::expm1(2.0 * lam / s.t) + (1.0 / s.t - 1.0) * lam;
}

} // namespace powex
