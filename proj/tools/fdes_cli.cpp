// Command line front end: single Poisson or Poisson-Boltzmann runs on the
// manufactured test problems, and multi-grid convergence studies with CSV
// output. Exit codes: 0 success, 2 solver did not converge, 64 usage error.

#include <chrono>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fdes/harness.hpp"
#include "fdes/pb.hpp"
#include "fdes/poisson.hpp"

namespace {

constexpr int kExitNoConverge = 2;
constexpr int kExitUsage = 64;

struct CommonFlags {
  int test = 0;
  std::vector<int> ns;
  double tol = 1e-10;
  int max_sweeps = 0;  // 0 lets the solver pick its cap
  int n_local = 5;
  std::string shift;       // "", "on", "off"
  std::string interleave;  // "", "on", "off"
  std::string out_path;
  std::string trace_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags* f, bool multi_n) {
  cmd->add_option("--test", f->test, "Manufactured test problem id")
      ->check(CLI::Range(1, 3));
  auto* n_opt = cmd->add_option("--n", f->ns, "Grid cells per direction");
  n_opt->check(CLI::PositiveNumber);
  if (!multi_n) n_opt->expected(1);
  cmd->add_option("--tol", f->tol, "Stopping tolerance on the update sizes")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-sweeps", f->max_sweeps,
                  "Sweep cap, 0 for the automatic cap")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f->out_path, "Write the error table as CSV");
  cmd->add_option("--trace", f->trace_path,
                  "Write the per-sweep iteration trace as CSV");
}

void add_shift_flag(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--n-local", f->n_local, "Sweeps between global shifts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--shift", f->shift,
                  "Global shift variant (default: on for variable eps)")
      ->check(CLI::IsMember({"on", "off"}));
}

void add_interleave_flag(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--interleave", f->interleave,
                  "Interleave displacement updates with the mass transfers")
      ->check(CLI::IsMember({"on", "off"}));
}

// The shift variant targets the mean-field condition that constant
// permittivity satisfies after a single shift, so it defaults on only when
// eps actually varies (test 2).
bool resolve_shift(const CommonFlags& f) {
  if (!f.shift.empty()) return f.shift == "on";
  return f.test == 2;
}

fdes::SolveOptions make_options(const CommonFlags& f, bool use_shift) {
  fdes::SolveOptions opts;
  opts.tol_eta = f.tol;
  opts.max_sweeps = f.max_sweeps;
  opts.n_local = f.n_local;
  opts.use_shift = use_shift;
  return opts;
}

void write_single_run_csv(const fdes::RateTable& table,
                          const std::string& path) {
  fdes::write_study_csv(table, path);
}

int run_poisson(const CommonFlags& f) {
  const int n = f.ns.empty() ? 16 : f.ns.front();
  fdes::ManufacturedProblem mp = fdes::manufactured_problem(f.test, n);
  if (mp.is_pb) {
    std::fprintf(stderr,
                 "fdes poisson: test %d is a Poisson-Boltzmann problem; "
                 "use the pb subcommand\n",
                 f.test);
    return kExitUsage;
  }
  const bool use_shift = resolve_shift(f);
  fdes::SolveOptions opts = make_options(f, use_shift);

  const auto t0 = std::chrono::steady_clock::now();
  fdes::PoissonResult res = fdes::solve_poisson(mp.poisson, opts);
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;

  fdes::ErrorRecord rec = fdes::compute_errors(res.D, nullptr, mp.c);
  rec.sweeps = res.report.sweeps_used;
  rec.wall_time = dt.count();
  rec.converged = res.report.converged;

  fdes::EquilibriumResiduals eq =
      fdes::equilibrium_residuals(res.D, mp.poisson.eps);
  std::printf("test %d  poisson  N=%d  h=%.17g  shift=%s\n", f.test, n,
              mp.poisson.grid.h, use_shift ? "on" : "off");
  std::printf("%s in %d sweeps (tol %.3g), %.3f s\n",
              res.report.converged ? "converged" : "NOT CONVERGED",
              res.report.sweeps_used, f.tol, dt.count());
  std::printf("final energy        %.17g\n", res.report.final_energy);
  std::printf("err_D_l2 %.6e  err_D_inf %.6e  err_E_inf %.6e\n", rec.err_D_l2,
              rec.err_D_inf, rec.err_E_inf);
  std::printf(
      "gauss residual %.3e  curl residual %.3e  mean field (%.3e, %.3e, "
      "%.3e)\n",
      fdes::gauss_residual_inf(res.D, mp.poisson.rho_h), eq.curl_inf,
      eq.mean_field[0], eq.mean_field[1], eq.mean_field[2]);

  if (!f.out_path.empty()) {
    fdes::RateTable table;
    table.test_id = f.test;
    table.records.push_back(rec);
    write_single_run_csv(table, f.out_path);
  }
  if (!f.trace_path.empty()) {
    fdes::write_trace_csv(res.report, false, f.trace_path);
  }
  return res.report.converged ? 0 : kExitNoConverge;
}

int run_pb(const CommonFlags& f) {
  const int n = f.ns.empty() ? 16 : f.ns.front();
  fdes::ManufacturedProblem mp = fdes::manufactured_problem(f.test, n);
  if (!mp.is_pb) {
    std::fprintf(stderr,
                 "fdes pb: test %d is a plain Poisson problem; "
                 "use the poisson subcommand\n",
                 f.test);
    return kExitUsage;
  }
  const bool interleave = f.interleave.empty() || f.interleave == "on";
  fdes::SolveOptions opts = make_options(f, false);

  const auto t0 = std::chrono::steady_clock::now();
  fdes::PBResult res = fdes::solve_pb(mp.pb, opts, interleave);
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;

  fdes::ErrorRecord rec =
      fdes::compute_errors(res.state.D, &res.state.c, mp.c);
  rec.sweeps = res.report.sweeps_used;
  rec.wall_time = dt.count();
  rec.converged = res.report.converged;

  std::printf("test %d  pb  N=%d  h=%.17g  interleave=%s\n", f.test, n,
              mp.pb.grid.h, interleave ? "on" : "off");
  std::printf("%s in %d sweeps (tol %.3g), %.3f s\n",
              res.report.converged ? "converged" : "NOT CONVERGED",
              res.report.sweeps_used, f.tol, dt.count());
  std::printf("final energy        %.17g\n", res.report.final_energy);
  std::printf("err_D_l2 %.6e  err_D_inf %.6e  err_E_inf %.6e\n", rec.err_D_l2,
              rec.err_D_inf, rec.err_E_inf);
  for (std::size_t s = 0; s < rec.err_c_l2.size(); ++s) {
    std::printf("species %zu  err_c_l2 %.6e  err_c_inf %.6e\n", s + 1,
                rec.err_c_l2[s], rec.err_c_inf[s]);
  }
  std::printf("gauss residual %.3e  boltzmann residual %.3e\n",
              res.report.sweeps.back().gauss_residual_inf,
              fdes::boltzmann_residual(res.state, mp.pb));
  if (res.report.bracket_clamped) {
    std::printf("warning: degenerate bracket clamp engaged during the run\n");
  }

  if (!f.out_path.empty()) {
    fdes::RateTable table;
    table.test_id = f.test;
    table.records.push_back(rec);
    write_single_run_csv(table, f.out_path);
  }
  if (!f.trace_path.empty()) {
    fdes::write_trace_csv(res.report, true, f.trace_path);
  }
  return res.report.converged ? 0 : kExitNoConverge;
}

void print_order_column(const std::vector<double>& orders, std::size_t pair) {
  if (pair < orders.size()) {
    std::printf("  %5.2f", orders[pair]);
  } else {
    std::printf("   --  ");
  }
}

int run_convergence(const CommonFlags& f) {
  std::vector<int> ns = f.ns;
  if (ns.empty()) {
    ns = (f.test == 3) ? std::vector<int>{8, 16, 32}
                       : std::vector<int>{8, 16, 32, 64};
  }
  const bool use_shift = resolve_shift(f);
  const bool interleave = f.interleave.empty() || f.interleave == "on";
  fdes::SolveOptions opts = make_options(f, use_shift);

  fdes::IterationReport finest;
  fdes::RateTable table = fdes::run_convergence_study(
      f.test, ns, opts, interleave, f.out_path,
      f.trace_path.empty() ? nullptr : &finest);

  std::printf("test %d convergence study, tol %.3g\n", f.test, f.tol);
  std::printf("%6s %12s %12s %7s %12s %7s %8s %10s\n", "n", "h", "err_D_inf",
              "order", "err_E_inf", "order", "sweeps", "time_s");
  for (std::size_t i = 0; i < table.records.size(); ++i) {
    const fdes::ErrorRecord& r = table.records[i];
    std::printf("%6d %12.5e %12.5e", r.n, r.h, r.err_D_inf);
    if (i == 0) {
      std::printf("   --  ");
    } else {
      print_order_column(table.order_D_inf, i - 1);
    }
    std::printf(" %12.5e", r.err_E_inf);
    if (i == 0) {
      std::printf("   --  ");
    } else {
      print_order_column(table.order_E_inf, i - 1);
    }
    std::printf(" %8d %10.3f%s\n", r.sweeps, r.wall_time,
                r.converged ? "" : "  NOT CONVERGED");
  }
  for (std::size_t s = 0; s < table.order_c_inf.size(); ++s) {
    std::printf("species %zu err_c_inf orders:", s + 1);
    for (double o : table.order_c_inf[s]) std::printf(" %5.2f", o);
    std::printf("\n");
  }

  if (!f.trace_path.empty()) {
    fdes::write_trace_csv(finest, f.test == 3, f.trace_path);
  }
  for (const fdes::ErrorRecord& r : table.records) {
    if (!r.converged) return kExitNoConverge;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite difference electrostatics on a periodic box"};
  app.require_subcommand(1);

  CommonFlags pf;
  pf.test = 1;
  CLI::App* poisson = app.add_subcommand(
      "poisson", "Solve one manufactured Poisson problem (tests 1-2)");
  add_common_flags(poisson, &pf, false);
  add_shift_flag(poisson, &pf);

  CommonFlags bf;
  bf.test = 3;
  CLI::App* pb = app.add_subcommand(
      "pb", "Solve the manufactured Poisson-Boltzmann problem (test 3)");
  add_common_flags(pb, &bf, false);
  add_interleave_flag(pb, &bf);

  CommonFlags cf;
  cf.test = 1;
  CLI::App* conv = app.add_subcommand(
      "convergence", "Run a grid refinement study on one test problem");
  add_common_flags(conv, &cf, true);
  add_shift_flag(conv, &cf);
  add_interleave_flag(conv, &cf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (poisson->parsed()) return run_poisson(pf);
    if (pb->parsed()) return run_pb(bf);
    return run_convergence(cf);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "fdes: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fdes: %s\n", e.what());
    return 1;
  }
}
