#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "powex/quadrature.hpp"
#include "powex/specfun.hpp"

using namespace powex;

namespace {

// int_0^1 x^k e^{-a x} dx by alternating series in long double
double poly_exp_integral(int k, double a) {
  long double sum = 0.0L;
  long double term;
  long double apow = 1.0L;
  long double fact = 1.0L;
  for (int j = 0; j < 80; ++j) {
    if (j > 0) {
      apow *= -static_cast<long double>(a);
      fact *= j;
    }
    term = apow / (fact * (k + j + 1));
    sum += term;
    if (fabsl(term) < 1e-25L * fabsl(sum) && j > static_cast<int>(a)) break;
  }
  return static_cast<double>(sum);
}

} // namespace

TEST_CASE("basic integrals", "[quadrature]") {
  QuadratureConfig cfg;
  auto sq = integrate([](double x) { return x * x; }, 0.0, 1.0, cfg);
  CHECK(sq.converged);
  CHECK(sq.value == Catch::Approx(1.0 / 3.0).epsilon(1e-14));

  auto ex = integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY, cfg);
  CHECK(ex.converged);
  CHECK(ex.value == Catch::Approx(1.0).epsilon(1e-12));

  auto gauss = integrate([](double x) { return normal_pdf(x); }, -INFINITY, INFINITY, cfg);
  CHECK(gauss.converged);
  CHECK(gauss.value == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linearity within combined error bounds", "[quadrature]") {
  QuadratureConfig cfg;
  auto f = [](double x) { return std::sin(x); };
  auto g = [](double x) { return std::exp(-x); };
  const double alpha = 2.75, beta = -1.25;
  auto lhs = integrate([&](double x) { return alpha * f(x) + beta * g(x); }, 0.0, 2.0, cfg);
  auto fi = integrate(f, 0.0, 2.0, cfg);
  auto gi = integrate(g, 0.0, 2.0, cfg);
  const double combined = std::abs(alpha) * fi.error_bound + std::abs(beta) * gi.error_bound + lhs.error_bound;
  CHECK(std::abs(lhs.value - (alpha * fi.value + beta * gi.value)) <= combined + 1e-15);
}

TEST_CASE("interval additivity", "[quadrature]") {
  QuadratureConfig cfg;
  auto f = [](double x) { return std::cos(3.0 * x) * std::exp(0.2 * x); };
  for (double split : {0.3, 1.0, 2.7}) {
    auto whole = integrate(f, 0.0, 3.0, cfg);
    auto left = integrate(f, 0.0, split, cfg);
    auto right = integrate(f, split, 3.0, cfg);
    CHECK(std::abs(whole.value - (left.value + right.value)) <=
          whole.error_bound + left.error_bound + right.error_bound + 1e-14);
  }
}

TEST_CASE("error bound honesty on a closed-form battery", "[quadrature]") {
  QuadratureConfig cfg;
  int cases = 0;
  int within_bound = 0;
  auto record = [&](double value, double truth, double bound) {
    ++cases;
    const double err = std::abs(value - truth);
    if (err <= bound + 1e-16) ++within_bound;
    CHECK(err <= 10.0 * bound + 1e-15); // never worse than 10x the reported bound
  };

  for (int k = 0; k <= 9; ++k) {
    for (double a : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      auto res = integrate([k, a](double x) { return std::pow(x, k) * std::exp(-a * x); }, 0.0, 1.0, cfg);
      record(res.value, poly_exp_integral(k, a), res.error_bound);
    }
  }
  {
    auto res = integrate([](double u) { return std::log(u); }, 0.0, 1.0, cfg);
    record(res.value, -1.0, res.error_bound);
  }
  {
    auto res = integrate([](double u) { return u * std::log(u); }, 0.0, 1.0, cfg);
    record(res.value, -0.25, res.error_bound);
  }
  {
    auto res = integrate([](double x) { return std::exp(-x * x); }, 0.0, 5.0, cfg);
    record(res.value, std::sqrt(M_PI) / 2.0 * std::erf(5.0), res.error_bound);
  }
  for (double w : {1.0, 4.0, 9.5}) {
    auto res = integrate([w](double x) { return std::sin(w * x); }, 0.0, 2.0, cfg);
    record(res.value, (1.0 - std::cos(2.0 * w)) / w, res.error_bound);
  }
  REQUIRE(cases >= 56);
  CHECK(static_cast<double>(within_bound) >= 0.99 * cases);
}

TEST_CASE("deterministic results on repeat runs", "[quadrature]") {
  QuadratureConfig cfg;
  auto f = [](double x) { return std::exp(-x) * std::cos(7.0 * x); };
  auto r1 = integrate(f, 0.0, INFINITY, cfg);
  auto r2 = integrate(f, 0.0, INFINITY, cfg);
  CHECK(r1.value == r2.value);
  CHECK(r1.error_bound == r2.error_bound);
  CHECK(r1.subdivisions_used == r2.subdivisions_used);
}

TEST_CASE("NaN from the integrand aborts with the abscissa", "[quadrature]") {
  QuadratureConfig cfg;
  CHECK_THROWS_AS(integrate([](double x) { return std::sqrt(x - 0.5); }, 0.0, 1.0, cfg), std::domain_error);
  try {
    integrate([](double x) { return std::sqrt(x - 0.5); }, 0.0, 1.0, cfg);
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("NaN") != std::string::npos);
    CHECK(std::string(e.what()).find("x = ") != std::string::npos);
  }
}

TEST_CASE("non-convergence is reported, not hidden", "[quadrature]") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-300; // must stay positive but unreachable
  cfg.max_subdivisions = 8;
  auto res = integrate([](double x) { return std::sin(50.0 * x); }, 0.0, 3.0, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.error_bound > 0.0);
  CHECK(res.subdivisions_used == 8);
}

TEST_CASE("config validation", "[quadrature]") {
  QuadratureConfig bad;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, bad), std::invalid_argument);
  QuadratureConfig bad2;
  bad2.max_subdivisions = 0;
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, bad2), std::invalid_argument);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 1.0, QuadratureConfig{}), std::invalid_argument);
}
