#pragma once

// Adaptive Gauss-Kronrod (G7/K15) panel integrator over finite and
// (semi-)infinite intervals. Infinite endpoints are folded onto a finite
// interval with algebraic maps:
//   (a, +inf):     x = a + t/(1-t),   t in (0,1),  dx = dt/(1-t)^2
//   (-inf, b):     x = b - t/(1-t),   t in (0,1)
//   (-inf, +inf):  x = t/(1-t^2),     t in (-1,1), dx = (1+t^2)/(1-t^2)^2 dt
// Panels split at the worst error estimate first, ties broken by the left
// endpoint, so results are bit-stable across runs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace powex {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
};

struct IntegralResult {
  double value = 0.0;
  double error_bound = 0.0;
  int subdivisions_used = 0;
  bool converged = false;
};

namespace detail {

// QUADPACK dqk15 abscissae/weights
inline constexpr double kKronrodX[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
  double resabs;
};

template <class F>
inline Panel gk15(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  if (std::isnan(f0)) throw std::domain_error("integrand returned NaN at x = " + std::to_string(mid));
  double k15 = kKronrodW[7] * f0;
  double g7 = kGaussW[3] * f0;
  double resabs = kKronrodW[7] * std::abs(f0);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodX[i];
    const double x1 = mid - dx;
    const double x2 = mid + dx;
    const double f1 = f(x1);
    const double f2 = f(x2);
    if (std::isnan(f1)) throw std::domain_error("integrand returned NaN at x = " + std::to_string(x1));
    if (std::isnan(f2)) throw std::domain_error("integrand returned NaN at x = " + std::to_string(x2));
    k15 += kKronrodW[i] * (f1 + f2);
    resabs += kKronrodW[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) g7 += kGaussW[i / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = k15 * half;
  p.resabs = resabs * std::abs(half);
  p.error = std::abs((k15 - g7) * half) + std::numeric_limits<double>::epsilon() * p.resabs;
  return p;
}

struct WorstFirst {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error; // max-heap on error
    return lhs.a > rhs.a;                                     // ties: leftmost first
  }
};

template <class F>
inline IntegralResult adapt_finite(const F& f, double a, double b, const QuadratureConfig& cfg) {
  if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
  if (cfg.abs_tol <= 0.0 || cfg.rel_tol <= 0.0 || cfg.max_subdivisions < 1)
    throw std::invalid_argument("integrate: tolerances must be positive, max_subdivisions >= 1");

  std::vector<Panel> heap;
  heap.reserve(64);
  heap.push_back(gk15(f, a, b));
  double total = heap[0].value;
  double err = heap[0].error;
  int splits = 0;
  const WorstFirst cmp;
  while (splits < cfg.max_subdivisions && err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) { // interval exhausted at double resolution
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), cmp);
      break;
    }
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++splits;
  }
  // refresh the accumulated sums to kill drift from the incremental updates
  total = 0.0;
  err = 0.0;
  std::vector<Panel> ordered = heap;
  std::sort(ordered.begin(), ordered.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const Panel& p : ordered) {
    total += p.value;
    err += p.error;
  }
  IntegralResult res;
  res.value = total;
  res.error_bound = err;
  res.subdivisions_used = splits;
  res.converged = err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
  return res;
}

} // namespace detail

inline IntegralResult integrate(const std::function<double(double)>& f, double a, double b,
                                const QuadratureConfig& cfg = {}) {
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) return detail::adapt_finite(f, a, b, cfg);
  if (lo_inf && hi_inf) {
    auto g = [&f](double t) {
      const double s = 1.0 - t * t;
      const double x = t / s;
      return f(x) * (1.0 + t * t) / (s * s);
    };
    return detail::adapt_finite(g, -1.0, 1.0, cfg);
  }
  if (hi_inf) {
    auto g = [&f, a](double t) {
      const double s = 1.0 - t;
      return f(a + t / s) / (s * s);
    };
    return detail::adapt_finite(g, 0.0, 1.0, cfg);
  }
  auto g = [&f, b](double t) {
    const double s = 1.0 - t;
    return f(b - t / s) / (s * s);
  };
  return detail::adapt_finite(g, 0.0, 1.0, cfg);
}

} // namespace powex
