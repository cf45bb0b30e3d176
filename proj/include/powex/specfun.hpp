#pragma once

// Underflow-safe standard-normal tail machinery, the product-log solver
// u*exp(u) = a, and the constants (gamma, zeta) the moment recursions need.
// Everything is plain binary64; log-domain variants keep quantities in range
// where the direct ones underflow.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace powex {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kLn2Pi = 1.8378770664093454836;       // ln(2*pi)
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794; // 1/sqrt(2*pi)

// zeta(2)..zeta(16); index 0 <-> zeta(2)
inline constexpr double kZeta[15] = {
    1.6449340668482264365,  1.2020569031595942854,  1.0823232337111381915,
    1.0369277551433699263,  1.0173430619844491397,  1.0083492773819228268,
    1.0040773561979443394,  1.0020083928260822144,  1.0009945751278180853,
    1.0004941886041194646,  1.0002460865533080483,  1.0001227133475784891,
    1.0000612481350587048,  1.0000305882363070205,  1.0000152822594086519};

inline constexpr int kZetaMaxOrder = 16;

inline double zeta_even_or_odd(int j) {
  if (j < 2 || j > kZetaMaxOrder) throw std::invalid_argument("zeta table covers orders 2..16");
  return kZeta[j - 2];
}

namespace detail {

// z*z split into hi + lo so exp(-z^2/2) keeps full relative accuracy.
struct SquareSplit {
  double hi;
  double lo;
};

inline SquareSplit square_split(double z) {
  const double hi = z * z;
  const double lo = std::fma(z, z, -hi);
  return {hi, lo};
}

// Cody's rational approximations (Math. Comp. 1969, netlib SPECFUN calerf).
inline double erf_small(double x) {
  // |x| <= 0.46875
  static const double a[5] = {3.1611237438705656, 113.864154151050156,
                              377.485237685302021, 3209.37758913846947,
                              0.185777706184603153};
  static const double b[4] = {23.6012909523441209, 244.024637934444173,
                              1282.61652607737228, 2844.23683343917062};
  const double ysq = x * x;
  double xnum = a[4] * ysq;
  double xden = ysq;
  for (int i = 0; i < 3; ++i) {
    xnum = (xnum + a[i]) * ysq;
    xden = (xden + b[i]) * ysq;
  }
  return x * (xnum + a[3]) / (xden + b[3]);
}

// exp(x^2) * erfc(x) for x >= 0.46875
inline double erfcx_large(double x) {
  static const double c[9] = {0.564188496988670089, 8.88314979438837594,
                              66.1191906371416295,  298.635138197400131,
                              881.95222124176909,   1712.04761263407058,
                              2051.07837782607147,  1230.33935479799725,
                              2.15311535474403846e-8};
  static const double d[8] = {15.7449261107098347, 117.693950891312499,
                              537.181101862009858, 1621.38957456669019,
                              3290.79923573345963, 4362.61909014324716,
                              3439.36767414372164, 1230.33935480374942};
  static const double p[6] = {0.305326634961232344, 0.360344899949804439,
                              0.125781726111229246, 0.0160837851487422766,
                              6.58749161529837803e-4, 0.0163153871373020978};
  static const double q[5] = {2.56852019228982242, 1.87295284992346047,
                              0.527905102951428412, 0.0605183413124413191,
                              0.00233520497626869185};
  static const double sqrpi = 0.56418958354775628695; // 1/sqrt(pi)
  if (x <= 4.0) {
    double xnum = c[8] * x;
    double xden = x;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + c[i]) * x;
      xden = (xden + d[i]) * x;
    }
    return (xnum + c[7]) / (xden + d[7]);
  }
  const double y = 1.0 / (x * x);
  double xnum = p[5] * y;
  double xden = y;
  for (int i = 0; i < 4; ++i) {
    xnum = (xnum + p[i]) * y;
    xden = (xden + q[i]) * y;
  }
  double res = y * (xnum + p[4]) / (xden + q[4]);
  return (sqrpi - res) / x;
}

// log of the Mills series 1 - z^-2 + 3 z^-4 - 15 z^-6 + 105 z^-8; the last
// term keeps |log q - ln(q)| below 1e-12 through the underflow window
// z in (36, 38.6) where both representations exist
inline double mills_log4(double z) {
  const double u = 1.0 / (z * z);
  return std::log1p(-u * (1.0 - u * (3.0 - u * (15.0 - 105.0 * u))));
}

// Mills ratio (1-Phi(z))/phi(z) for Newton steps
inline double mills_ratio(double z, double q, double pdf) {
  if (z > 36.0 || pdf <= 0.0) {
    const double u = 1.0 / (z * z);
    return (1.0 - u * (1.0 - u * (3.0 - 15.0 * u))) / z;
  }
  return q / pdf;
}

} // namespace detail

inline double normal_pdf(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("normal_pdf: non-finite argument");
  const auto s = detail::square_split(z);
  // exp(-(hi+lo)/2) = exp(-hi/2)*(1 - lo/2 + ...)
  return kInvSqrt2Pi * std::exp(-0.5 * s.hi) * (1.0 - 0.5 * s.lo);
}

// Upper tail 1 - Phi(z) for z >= 0, both directly and in log space.
struct TailValue {
  double q;     // 1 - Phi(z); underflows to 0 for z >~ 38.6
  double log_q; // ln(1 - Phi(z)); finite for any finite z
};

inline TailValue normal_tail(double z) {
  if (!(z >= 0.0)) throw std::invalid_argument("normal_tail: requires z >= 0 (use symmetry for the other side)");
  static const double kInvSqrt2 = 0.70710678118654752440;
  const double x = z * kInvSqrt2;
  double q;
  if (x <= 0.46875) {
    q = 0.5 * (1.0 - detail::erf_small(x));
  } else {
    const auto s = detail::square_split(z);
    const double e = std::exp(-0.5 * s.hi) * (1.0 - 0.5 * s.lo);
    q = 0.5 * detail::erfcx_large(x) * e;
  }
  double log_q;
  if (z <= 36.0) {
    log_q = std::log(q);
  } else {
    const auto s = detail::square_split(z);
    log_q = -0.5 * (s.hi + s.lo) - std::log(z) - 0.5 * kLn2Pi + detail::mills_log4(z);
  }
  return {q, log_q};
}

// Inverse of normal_tail: z >= 0 with 1 - Phi(z) = q, for q in (0, 1/2].
// AS241 (PPND16) start, then log-space Newton against normal_tail.
inline double normal_quantile_complement(double q) {
  if (!(q > 0.0) || !(q <= 0.5)) throw std::invalid_argument("normal_quantile_complement: q must lie in (0, 1/2]");
  if (q == 0.5) return 0.0;

  const double p = q; // lower-tail area of -z
  const double qm = p - 0.5;
  double z;
  // Wichura, Applied Statistics 37 (1988), algorithm AS241
  if (std::abs(qm) <= 0.425) {
    const double r = 0.180625 - qm * qm;
    const double num = (((((((2.50908092873012267270e3 * r + 3.34305755835881281050e4) * r + 6.72657709270087008530e4) * r +
                            4.59219539315498714570e4) * r + 1.37316937655094611250e4) * r + 1.97159095030655144270e3) * r +
                          1.33141667891784377450e2) * r + 3.38713287279636660800);
    const double den = (((((((5.22649527885285456100e3 * r + 2.87290857357219426740e4) * r + 3.93078958000927106100e4) * r +
                            2.12137943015865958670e4) * r + 5.39419602142475110770e3) * r + 6.87187007492057908300e2) * r +
                          4.23133307016009112520e1) * r + 1.0);
    z = -qm * num / den; // = -Phi^{-1}(p) since p < 1/2
  } else {
    const double r0 = std::sqrt(-std::log(p));
    if (r0 <= 5.0) {
      const double r = r0 - 1.6;
      const double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                              1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.76949722146069140550) * r +
                            4.63033784615654529590) * r + 1.42343711074968357734);
      const double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                              1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940) * r +
                            2.05319162663775882187) * r + 1.0);
      z = num / den;
    } else {
      const double r = r0 - 5.0;
      const double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                              2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580) * r +
                            5.46378491116411436990) * r + 6.65790464350110377720);
      const double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                              7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                            5.99832206555887937690e-1) * r + 1.0);
      z = num / den;
    }
  }
  // polish in log space: d/dz ln(1-Phi) = -phi/(1-Phi)
  const double target = std::log(q);
  for (int it = 0; it < 3; ++it) {
    const TailValue tv = normal_tail(z);
    const double m = detail::mills_ratio(z, tv.q, normal_pdf(z));
    const double step = (tv.log_q - target) * m;
    z += step;
    if (z < 0.0) z = 0.0;
    if (std::abs(step) <= 1e-14 * (1.0 + z)) break;
  }
  return z;
}

// Solve u * exp(u) = a on u > 0 (and small u <= 0 side down to a -> 0+),
// i.e. ln(u) + u = ln(a). Accepting ln(a) directly keeps n-like arguments
// representable far beyond the double range.
inline double product_log_from_log(double log_a) {
  if (!std::isfinite(log_a)) throw std::invalid_argument("product_log: log(a) must be finite");
  const double L = log_a;
  double u;
  if (L > 1.0) {
    const double ll = std::log(L);
    u = L - ll + ll / L;
  } else if (L > -2.0) {
    u = 0.5;
  } else {
    const double a = std::exp(L);
    u = a * (1.0 - a);
    if (u <= 0.0) u = std::numeric_limits<double>::min();
  }
  for (int it = 0; it < 60; ++it) {
    const double f = std::log(u) + u - L;
    const double un = u - f / (1.0 + 1.0 / u);
    double next = un > 0.0 ? un : 0.5 * u;
    if (std::abs(next - u) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(u)) {
      u = next;
      break;
    }
    u = next;
  }
  return u;
}

inline double product_log(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("product_log: requires a > 0");
  return product_log_from_log(std::log(a));
}

} // namespace powex
