#pragma once

#include <string>
#include <vector>

#include "fdes/grid.hpp"
#include "fdes/pb.hpp"
#include "fdes/poisson.hpp"

namespace fdes {

// Closed-form manufactured solution on [0,2]^3: analytic fields as samplers,
// plus the species list and exact concentrations for the PB case. The source
// rho is always derived from phi and eps (minus the Boltzmann terms for the
// PB case), never authored separately.
struct ManufacturedCase {
  int id = 0;
  double L = 2.0;
  FieldSampler phi;
  FieldSampler eps;
  FieldSampler rho;
  FieldSampler Dx, Dy, Dz;  // exact displacement -eps grad phi
  FieldSampler gx, gy, gz;  // exact grad phi, the E-field comparator
  std::vector<Species> species;    // PB case only
  std::vector<FieldSampler> conc;  // exact concentrations, PB case only
};

// A manufactured case discretized on N cells: the case plus the ready-to-run
// problem. Exactly one of `poisson` (ids 1-2) and `pb` (id 3) is populated,
// per the is_pb flag.
struct ManufacturedProblem {
  bool is_pb = false;
  PoissonProblem poisson;
  PBProblem pb;
  ManufacturedCase c;
};

// Builds test problem 1, 2, or 3 on an N^3 grid: permittivity sampled at
// nodes and averaged onto edges, source sampled at nodes and projected onto
// the discrete compatibility class, and (id 3) species masses taken from the
// grid sums of e^{-q_s phi} so mass conservation is consistent at grid
// level. Throws std::invalid_argument on a bad id.
ManufacturedProblem manufactured_problem(int id, int N);

// Errors of one numeric solution against the analytic fields.
struct ErrorRecord {
  int n = 0;
  double h = 0.0;
  double err_D_l2 = 0.0;
  double err_D_inf = 0.0;
  double err_E_inf = 0.0;
  std::vector<double> err_c_l2;   // per species, PB case only
  std::vector<double> err_c_inf;  // per species, PB case only
  int sweeps = 0;
  double wall_time = 0.0;  // seconds; filled by the caller
  bool converged = true;
};

// Compares a computed displacement (and optionally concentrations) against
// the sampled exact fields: err_D_* on edges, err_E_inf at nodes through the
// midpoint average of -D divided by the node permittivity, err_c_* at nodes.
// Leaves sweeps, wall_time, converged untouched. Throws on grid mismatch.
ErrorRecord compute_errors(const Displacement& D,
                           const std::vector<NodeScalar>* conc,
                           const ManufacturedCase& mc);

// Error records over a family of grids, finest last, with observed orders
// log(err_i/err_{i+1}) / log(n_{i+1}/n_i) for each adjacent pair.
struct RateTable {
  int test_id = 0;
  std::vector<ErrorRecord> records;
  std::vector<double> order_D_l2;
  std::vector<double> order_D_inf;
  std::vector<double> order_E_inf;
  std::vector<std::vector<double>> order_c_l2;   // [species][pair]
  std::vector<std::vector<double>> order_c_inf;  // [species][pair]
};

// Runs the manufactured test on every grid size in Ns (each >= 4, all
// distinct; solved in ascending order): the plain or shifted local algorithm
// for ids 1-2 per opts.use_shift, the PB relaxation for id 3. A
// non-converged run is recorded with converged=false and the table is still
// produced. Writes the study CSV when csv_path is nonempty; stores the
// finest grid's iteration report when finest_trace is given.
RateTable run_convergence_study(int id, const std::vector<int>& Ns,
                                const SolveOptions& opts,
                                bool interleave_displacement = true,
                                const std::string& csv_path = "",
                                IterationReport* finest_trace = nullptr);

// CSV emission, one header row then one row per record, every real printed
// with 17 significant digits. Study columns:
//   n,h,err_D_l2,err_D_inf,err_E_inf[,err_c1_l2,err_c1_inf,...],sweeps,wall_time_s
// Trace columns:
//   sweep,energy,max_eta[,max_zeta],shift_norm,gauss_residual_inf
// where the zeta column appears when include_zeta is set (PB runs).
void write_study_csv(const RateTable& table, const std::string& path);
void write_trace_csv(const IterationReport& report, bool include_zeta,
                     const std::string& path);

}  // namespace fdes
