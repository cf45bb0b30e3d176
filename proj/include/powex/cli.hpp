#pragma once

// Batch front-end. Subcommands map one-to-one onto the calculators and the
// verification harness; every command writes one table (CSV or JSON) to
// stdout or --out. A plain `key = value` config file (# comments) can seed
// any flag; explicit command-line flags win.
//
// Exit codes: 0 all verdicts pass, 1 a verification verdict failed,
//             2 usage/config error, 3 numerical non-convergence.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "powex/convergence.hpp"
#include "powex/exactdist.hpp"
#include "powex/expansion.hpp"
#include "powex/gumbel.hpp"
#include "powex/io.hpp"
#include "powex/montecarlo.hpp"
#include "powex/norming.hpp"

namespace powex {

struct RunConfig {
  double t = 1.0;
  int r = 1;
  int rmax = 4;
  double n = 0.0;
  double b = 0.0;
  std::vector<double> grid_b2 = {25.0, 50.0, 100.0, 200.0, 400.0};
  double empirical_tol = 0.10;
  std::uint64_t mc_n = 100;
  std::uint64_t reps = 1000000;
  std::uint64_t seed = 42;
  std::vector<double> x_list = {0.0, 1.0, 2.0};
  std::string format = "csv";
  std::string out;
};

namespace cli_detail {

inline std::vector<double> b_list_from_grid(const std::vector<double>& grid_b2) {
  std::vector<double> b;
  b.reserve(grid_b2.size());
  for (double b2 : grid_b2) b.push_back(std::sqrt(b2));
  return b;
}

inline int emit(const Table& tbl, const RunConfig& rc, std::ostream& out_stream) {
  if (!rc.out.empty()) {
    std::ofstream f(rc.out);
    if (!f) throw std::invalid_argument("cannot open output file: " + rc.out);
    tbl.write(f, rc.format);
  } else {
    tbl.write(out_stream, rc.format);
  }
  return 0;
}

inline const char* bool_verdict(bool ok) { return ok ? "pass" : "fail"; }

} // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"powered normal extremes: exact moments vs asymptotic expansions"};
  app.set_config("--config", "", "key = value config file merged under explicit flags");

  RunConfig rc;
  int exit_verdict = 0;

  auto add_common = [&rc](CLI::App* cmd) {
    cmd->configurable(true); // lets `subcommand.key = value` config lines reach these options
    cmd->add_option("--format", rc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", rc.out, "write the table to this path instead of stdout");
  };

  CLI::App* norming_cmd = app.add_subcommand("norming", "norming constants b, c, d, log_n from --n or --b");
  norming_cmd->add_option("--t", rc.t, "power index")->required();
  norming_cmd->add_option("--n", rc.n, "sample size (real-valued, > 3)");
  norming_cmd->add_option("--b", rc.b, "auxiliary scale b > 1");
  add_common(norming_cmd);

  CLI::App* gumbel_cmd = app.add_subcommand("gumbel-moments", "Gumbel moments m_0..m_R by cumulant recursion");
  gumbel_cmd->add_option("--rmax", rc.rmax, "highest order (<= 16)")->required();
  add_common(gumbel_cmd);

  CLI::App* kernels_cmd = app.add_subcommand("kernels", "expansion kernels kappa1, kappa2, varpi, tau at (t, x)");
  kernels_cmd->add_option("--t", rc.t)->required();
  kernels_cmd->add_option("--x", rc.x_list, "one or more evaluation points")->required();
  add_common(kernels_cmd);

  CLI::App* moments_cmd = app.add_subcommand("moments", "exact moments of the normalized powered extreme (quadrature)");
  moments_cmd->add_option("--t", rc.t)->required();
  moments_cmd->add_option("--b", rc.b, "auxiliary scale b > 1");
  moments_cmd->add_option("--n", rc.n, "sample size, alternative to --b");
  moments_cmd->add_option("--rmax", rc.rmax);
  add_common(moments_cmd);

  CLI::App* mc_cmd = app.add_subcommand("mc-check", "Monte Carlo moments vs quadrature, 4 sigma gate");
  mc_cmd->add_option("--t", rc.t)->required();
  mc_cmd->add_option("--n", rc.mc_n, "integer sample size per maximum")->required();
  mc_cmd->add_option("--reps", rc.reps, "replications (>= 1e4)");
  mc_cmd->add_option("--seed", rc.seed);
  mc_cmd->add_option("--rmax", rc.rmax);
  add_common(mc_cmd);

  CLI::App* vt_cmd = app.add_subcommand("verify-theorem", "empirical second-order limit vs analytic candidates");
  vt_cmd->add_option("--t", rc.t)->required();
  vt_cmd->add_option("--r", rc.r)->required();
  vt_cmd->add_option("--grid", rc.grid_b2, "grid of b^2 values");
  vt_cmd->add_option("--emp-tol", rc.empirical_tol, "relative tolerance for the empirical match");
  add_common(vt_cmd);

  CLI::App* vd_cmd = app.add_subcommand("verify-density", "density expansion: R1 -> varpi, R2 -> tau");
  vd_cmd->add_option("--t", rc.t)->required();
  vd_cmd->add_option("--x-list", rc.x_list, "evaluation points");
  vd_cmd->add_option("--grid", rc.grid_b2, "grid of b^2 values");
  add_common(vd_cmd);

  CLI::App* rates_cmd = app.add_subcommand("rates", "log-log convergence-rate slope of |m_exact - m_r|");
  rates_cmd->add_option("--t", rc.t)->required();
  rates_cmd->add_option("--r", rc.r)->required();
  rates_cmd->add_option("--grid", rc.grid_b2, "grid of b^2 values");
  add_common(rates_cmd);

  app.require_subcommand(0, 1);

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  std::string prog = "powex";
  argv.push_back(prog.data());
  for (std::string& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (norming_cmd->parsed()) {
      NormingScale s;
      if (norming_cmd->count("--b")) {
        s = scale_from_b(rc.t, rc.b);
      } else if (norming_cmd->count("--n")) {
        s = scale_from_n(rc.t, rc.n);
      } else {
        err << "norming: one of --n or --b is required\n";
        return 2;
      }
      Table tbl;
      tbl.header = {"t", "b", "c", "d", "log_n", "support_left"};
      tbl.add_row({format_g17(s.t), format_g17(s.b), format_g17(s.c), format_g17(s.d), format_g17(s.log_n),
                   format_g17(s.support_left)});
      return cli_detail::emit(tbl, rc, out);
    }

    if (gumbel_cmd->parsed()) {
      const GumbelMomentTable tbl_m = moment_table(rc.rmax);
      Table tbl;
      tbl.header = {"r", "m_r"};
      for (int r = 0; r <= tbl_m.max_order; ++r) tbl.add_row({std::to_string(r), format_g17(tbl_m.moment(r))});
      return cli_detail::emit(tbl, rc, out);
    }

    if (kernels_cmd->parsed()) {
      Table tbl;
      tbl.header = {"t", "x", "kappa1", "kappa2", "varpi", "tau"};
      for (double x : rc.x_list) {
        const KernelValues k = kernels(rc.t, x);
        tbl.add_row({format_g17(rc.t), format_g17(x), format_g17(k.kappa1), format_g17(k.kappa2),
                     format_g17(k.varpi), format_g17(k.tau)});
      }
      return cli_detail::emit(tbl, rc, out);
    }

    if (moments_cmd->parsed()) {
      NormingScale s;
      if (moments_cmd->count("--b")) {
        s = scale_from_b(rc.t, rc.b);
      } else if (moments_cmd->count("--n")) {
        s = scale_from_n(rc.t, rc.n);
      } else {
        err << "moments: one of --n or --b is required\n";
        return 2;
      }
      Table tbl;
      tbl.header = {"r", "value", "error_bound", "converged"};
      bool nonconverged = false;
      for (int r = 0; r <= rc.rmax; ++r) {
        const MomentEstimate est = exact_moment(s, r);
        nonconverged = nonconverged || !est.converged;
        tbl.add_row({std::to_string(r), format_g17(est.value), format_g17(est.error_bound),
                     est.converged ? "true" : "false"});
      }
      const int rcode = cli_detail::emit(tbl, rc, out);
      if (nonconverged) {
        err << "moments: quadrature did not converge for at least one order\n";
        return 3;
      }
      return rcode;
    }

    if (mc_cmd->parsed()) {
      McConfig mc;
      mc.t = rc.t;
      mc.n = rc.mc_n;
      mc.replications = rc.reps;
      mc.seed = rc.seed;
      const NormingScale s = scale_from_n(rc.t, static_cast<double>(rc.mc_n));
      const std::vector<MomentEstimate> mcs = mc_moments(mc, s, rc.rmax);
      Table tbl;
      tbl.header = {"r", "mc_value", "std_error", "quad_value", "quad_error", "zscore", "verdict"};
      bool all_ok = true;
      for (const MomentEstimate& est : mcs) {
        const MomentEstimate qe = exact_moment(s, est.r);
        const double z = std::abs(est.value - qe.value) / std::max(est.std_error, 1e-300);
        const bool ok = z <= 4.0;
        all_ok = all_ok && ok;
        tbl.add_row({std::to_string(est.r), format_g17(est.value), format_g17(est.std_error),
                     format_g17(qe.value), format_g17(qe.error_bound), format_g17(z), cli_detail::bool_verdict(ok)});
      }
      const int rcode = cli_detail::emit(tbl, rc, out);
      (void)rcode;
      return all_ok ? 0 : 1;
    }

    if (vt_cmd->parsed()) {
      VerifyOptions opt;
      opt.empirical_tol = rc.empirical_tol;
      const VerificationReport rep =
          verify_theorem(rc.t, rc.r, cli_detail::b_list_from_grid(rc.grid_b2), QuadratureConfig{}, opt);
      Table tbl;
      tbl.header = {"t", "r", "sign", "L_empirical", "L_tau_oracle", "L_closed_form",
                    "dev_oracle", "dev_closed", "rate_slope", "verdict"};
      tbl.add_row({format_g17(rep.t), std::to_string(rep.r), std::to_string(rep.sign_detected),
                   format_g17(rep.L_empirical), format_g17(rep.L_tau_oracle), format_g17(rep.L_closed_form),
                   format_g17(rep.rel_dev_emp_vs_oracle), format_g17(rep.rel_dev_emp_vs_closed),
                   format_g17(rep.rate_slope), rep.verdict});
      cli_detail::emit(tbl, rc, out);
      return rep.passed ? 0 : 1;
    }

    if (vd_cmd->parsed()) {
      const DensityReport rep = verify_density(rc.t, rc.x_list, cli_detail::b_list_from_grid(rc.grid_b2));
      Table tbl;
      tbl.header = {"t", "x", "sign", "R1_limit", "varpi", "dev_R1", "R2_limit", "tau", "dev_R2", "points", "verdict"};
      for (const DensityPointReport& row : rep.rows) {
        const bool ok = row.R1_ok && row.R2_ok;
        tbl.add_row({format_g17(rep.t), format_g17(row.x), std::to_string(row.sign_detected),
                     format_g17(row.R1_limit), format_g17(row.varpi), format_g17(row.rel_dev_R1),
                     format_g17(row.R2_limit), format_g17(row.tau), format_g17(row.rel_dev_R2),
                     std::to_string(row.points_used), cli_detail::bool_verdict(ok)});
      }
      cli_detail::emit(tbl, rc, out);
      return rep.passed ? 0 : 1;
    }

    if (rates_cmd->parsed()) {
      const double slope = rate_estimate(rc.t, rc.r, cli_detail::b_list_from_grid(rc.grid_b2));
      const double lo = rc.t == 2.0 ? -2.2 : -1.15;
      const double hi = rc.t == 2.0 ? -1.8 : -0.85;
      const bool ok = slope >= lo && slope <= hi;
      Table tbl;
      tbl.header = {"t", "r", "slope", "expected_lo", "expected_hi", "verdict"};
      tbl.add_row({format_g17(rc.t), std::to_string(rc.r), format_g17(slope), format_g17(lo), format_g17(hi),
                   cli_detail::bool_verdict(ok)});
      cli_detail::emit(tbl, rc, out);
      return ok ? 0 : 1;
    }

    out << app.help();
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return exit_verdict;
}

} // namespace powex
