// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Usage: powex_acceptance [N]   (N = 1..9; no argument runs all)
//
// Criteria 4 and 6 compare the exact law against the printed analytic forms
// at t = 2 and are expected to fail there; the measured limits are recorded
// in README.md. The suite reports what it measures.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "powex/convergence.hpp"
#include "powex/exactdist.hpp"
#include "powex/expansion.hpp"
#include "powex/gumbel.hpp"
#include "powex/montecarlo.hpp"
#include "powex/norming.hpp"

using namespace powex;

namespace {

int g_checks = 0;
int g_failures = 0;

void expect(bool ok, const std::string& what) {
  ++g_checks;
  if (!ok) {
    ++g_failures;
    std::printf("       FAILED: %s\n", what.c_str());
  }
}

bool criterion1() {
  const GumbelMomentTable tbl = moment_table(12);
  for (int r = 0; r <= 12; ++r) {
    const double oracle = moment_quadrature_oracle(r);
    expect(std::abs(tbl.moment(r) - oracle) <= 1e-9 * std::max(1.0, std::abs(tbl.moment(r))),
           "recursion vs quadrature at r = " + std::to_string(r));
  }
  for (int r = 1; r <= 8; ++r) {
    const double lhs = tilted_moment(r, 1);
    const double rhs = moment_quadrature_oracle(r) - r * moment_quadrature_oracle(r - 1);
    expect(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)),
           "T_{r,1} identity at r = " + std::to_string(r));
  }
  return true;
}

bool criterion2() {
  const GumbelMomentTable tbl = moment_table(8);
  for (double t : {0.5, 1.0, 3.0}) {
    for (int r : {1, 2, 3}) {
      const double lhs = varpi_integral_oracle(t, r);
      const double F = first_order_term(t, r, tbl);
      expect(std::abs(lhs + F) <= 1e-8 * std::max(1.0, std::abs(F)),
             "varpi integral vs -F at t = " + std::to_string(t) + ", r = " + std::to_string(r));
    }
  }
  return true;
}

bool criterion3() {
  const GumbelMomentTable tbl = moment_table(8);
  for (int r : {1, 2, 3}) {
    const double oracle = tau_integral_oracle(2.0, r);
    const double closed = theorem_rhs(2.0, r, tbl);
    expect(std::abs(oracle - closed) <= 1e-8 * std::max(1.0, std::abs(oracle)),
           "tau oracle vs closed form at r = " + std::to_string(r));
    if (r == 1) {
      std::printf("       t=2 r=1: tau oracle = %.9f, closed form = %.9f\n", oracle, closed);
      expect(std::abs(oracle - 4.91081970007962161) <= 1e-6, "t=2 r=1 frozen value");
    }
  }
  return true;
}

bool criterion4() {
  const double pairs[5][2] = {{1.0, 1.0}, {0.5, 1.0}, {3.0, 2.0}, {2.0, 1.0}, {2.0, 2.0}};
  for (const auto& pr : pairs) {
    const double t = pr[0];
    const int r = static_cast<int>(pr[1]);
    const VerificationReport rep = verify_theorem(t, r, default_b_grid());
    std::printf("       t=%.1f r=%d: sign=%+d L_emp=%.6f L_tau=%.6f L_closed=%.6f dev_tau=%.2f%% dev_closed=%.2f%% verdict=%s\n",
                t, r, rep.sign_detected, rep.L_empirical, rep.L_tau_oracle, rep.L_closed_form,
                100.0 * rep.rel_dev_emp_vs_oracle, 100.0 * rep.rel_dev_emp_vs_closed, rep.verdict.c_str());
    expect(rep.matched_oracle || rep.matched_closed,
           "L_empirical within 10% of an analytic candidate at t = " + std::to_string(t) + ", r = " + std::to_string(r));
    expect(rep.fit_agreement_ok,
           "quadratic vs linear extrapolation agreement at t = " + std::to_string(t) + ", r = " + std::to_string(r));
  }
  return true;
}

bool criterion5() {
  for (double t : {0.5, 1.0, 3.0}) {
    const double slope = rate_estimate(t, 1, default_b_grid());
    std::printf("       t=%.1f r=1: slope = %.4f (expect [-1.15, -0.85])\n", t, slope);
    expect(slope >= -1.15 && slope <= -0.85, "rate slope at t = " + std::to_string(t));
  }
  const double slope2 = rate_estimate(2.0, 1, default_b_grid());
  std::printf("       t=2.0 r=1: slope = %.4f (expect [-2.2, -1.8])\n", slope2);
  expect(slope2 >= -2.2 && slope2 <= -1.8, "rate slope at t = 2");
  return true;
}

bool criterion6() {
  for (double t : {1.0, 2.0}) {
    const DensityReport rep = verify_density(t, {0.0, 1.0, 2.0}, default_b_grid());
    expect(rep.signs_consistent, "detected density signs consistent across x at t = " + std::to_string(t));
    for (const DensityPointReport& row : rep.rows) {
      std::printf("       t=%.1f x=%.0f: sign=%+d R1->%.5f (varpi %.5f, dev %.2f%%) R2->%.5f (tau %.5f, dev %.2f%%)\n",
                  t, row.x, row.sign_detected, row.R1_limit, row.varpi, 100.0 * row.rel_dev_R1,
                  row.R2_limit, row.tau, 100.0 * row.rel_dev_R2);
      expect(row.rel_dev_R1 <= 0.05,
             "R1 within 5% of varpi at t = " + std::to_string(t) + ", x = " + std::to_string(row.x));
      expect(row.rel_dev_R2 <= 0.15,
             "R2 within 15% of tau at t = " + std::to_string(t) + ", x = " + std::to_string(row.x));
    }
  }
  return true;
}

bool criterion7() {
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    for (double b : {2.0, 5.0, 20.0}) {
      const NormingScale s = scale_from_b(t, b);
      const MomentEstimate mass = exact_moment(s, 0);
      expect(mass.converged && std::abs(mass.value - 1.0) <= 1e-10,
             "unit mass at t = " + std::to_string(t) + ", b = " + std::to_string(b));
    }
  }
  for (double t : {0.5, 1.0, 3.0}) {
    for (double b : {2.0, 5.0, 10.0, 20.0, 100.0}) {
      const NormingScale s = scale_from_b(t, b);
      expect(std::abs(std::exp(log_intensity(s, 0.0)) - 1.0) <= 1e-12,
             "C_n(0) = 1 at t = " + std::to_string(t) + ", b = " + std::to_string(b));
    }
  }
  const double h = 1e-4;
  for (double t : {1.0, 2.0}) {
    const NormingScale s = t == 1.0 ? scale_from_n(1.0, 100.0) : scale_from_b(2.0, 3.0);
    for (double x : {-1.0, 0.0, 1.0, 3.0}) {
      if (x - h <= s.support_left) continue;
      const double fd = (powered_cdf(s, x + h) - powered_cdf(s, x - h)) / (2.0 * h);
      const double pdf = powered_pdf(s, x);
      expect(std::abs(fd - pdf) <= std::max(1e-6, 1e-4 * pdf),
             "cdf/pdf finite difference at t = " + std::to_string(t) + ", x = " + std::to_string(x));
    }
  }
  return true;
}

bool criterion8() {
  {
    McConfig cfg;
    cfg.t = 1.0;
    cfg.n = 100;
    cfg.replications = 10000000;
    cfg.seed = 42;
    const NormingScale s = scale_from_n(1.0, 100.0);
    const auto mc = mc_moments(cfg, s, 1);
    const auto rep = mc_moments(cfg, s, 1);
    expect(mc[0].value == rep[0].value, "bit-exact seed replay (t = 1)");
    const MomentEstimate quad = exact_moment(s, 1);
    const double zscore = std::abs(mc[0].value - quad.value) / mc[0].std_error;
    std::printf("       t=1 n=100 1e7 reps: mc = %.7f +- %.7f, quad = %.7f, z = %.2f\n",
                mc[0].value, mc[0].std_error, quad.value, zscore);
    expect(zscore <= 4.0, "t = 1, n = 100 within 4 standard errors");
  }
  {
    McConfig cfg;
    cfg.t = 2.0;
    cfg.n = 1000;
    cfg.replications = 1000000;
    cfg.seed = 4242;
    const NormingScale s = scale_from_n(2.0, 1000.0);
    const auto mc = mc_moments(cfg, s, 2);
    const MomentEstimate quad = exact_moment(s, 2);
    const double zscore = std::abs(mc[1].value - quad.value) / mc[1].std_error;
    std::printf("       t=2 n=1000 1e6 reps: mc = %.7f +- %.7f, quad = %.7f, z = %.2f\n",
                mc[1].value, mc[1].std_error, quad.value, zscore);
    expect(zscore <= 4.0, "t = 2, n = 1000 within 4 standard errors");
  }
  return true;
}

bool criterion9() {
  // investigative: which printed form does the exact law follow?
  for (double t : {0.5, 1.0, 3.0}) {
    const VerificationReport rep = verify_theorem(t, 1, default_b_grid());
    const char* match = rep.matched_oracle && rep.matched_closed ? "both candidates"
                        : rep.matched_oracle                     ? "tau_integral_oracle (Eq. as-printed kernels)"
                        : rep.matched_closed                     ? "theorem_rhs (closed form as printed)"
                                                                 : "neither candidate";
    std::printf("       t=%.1f r=1: L_emp = %.5f matches %s (dev tau %.2f%%, dev closed %.2f%%)\n",
                t, rep.L_empirical, match, 100.0 * rep.rel_dev_emp_vs_oracle, 100.0 * rep.rel_dev_emp_vs_closed);
    expect(rep.sign_conclusive, "conclusive sign detection at t = " + std::to_string(t));
  }
  const VerificationReport rep2 = verify_theorem(2.0, 1, default_b_grid());
  const char* side = rep2.sign_detected == -1 ? "the printed varpi(2,.) kernel (b^4(m-m_r) -> +F)"
                                              : "Remark 2.1's sign (b^4(m-m_r) -> -F)";
  std::printf("       t=2.0 r=1: detected sign %+d; the first-order term follows %s\n", rep2.sign_detected, side);
  expect(rep2.sign_conclusive, "conclusive sign detection at t = 2");
  return true;
}

struct Criterion {
  int id;
  const char* label;
  std::function<bool()> fn;
};

} // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "Gumbel moments: recursion vs quadrature (1e-9), tilted identity (1e-9)", criterion1},
      {2, "analytic identity t != 2: varpi integral = -first-order term (1e-8)", criterion2},
      {3, "analytic identity t = 2: tau oracle = closed form (1e-8)", criterion3},
      {4, "Theorem empirical limits within 10% of a candidate + fit agreement", criterion4},
      {5, "convergence-rate slopes: -1 for t != 2, -2 for t = 2", criterion5},
      {6, "density expansion: R1 -> varpi (5%), R2 -> tau (15%) at x in {0,1,2}", criterion6},
      {7, "exactness plumbing: unit mass, C_n(0) = 1, cdf/pdf consistency", criterion7},
      {8, "Monte Carlo cross-check within 4 standard errors, bit-exact replay", criterion8},
      {9, "ambiguity adjudication: conclusive sign detection and candidate match report", criterion9},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int total_failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    g_checks = 0;
    g_failures = 0;
    try {
      c.fn();
    } catch (const std::exception& e) {
      ++g_failures;
      std::printf("       EXCEPTION: %s\n", e.what());
    }
    std::printf("[%s] criterion %d: %s (%d checks, %d failed)\n", g_failures == 0 ? "PASS" : "FAIL", c.id,
                c.label, g_checks, g_failures);
    std::fflush(stdout);
    total_failures += g_failures;
  }
  return total_failures == 0 ? 0 : 1;
}
