#pragma once

// Discrete Poisson energy minimization over the Gauss-law constraint set:
// the energy functional, the divergence-matching initializer, the local
// face relaxation, the global shift correction needed for variable
// permittivity, the sweep solver, and equilibrium diagnostics.

#include <array>
#include <vector>

#include "fdes/grid.hpp"

namespace fdes {

struct PoissonProblem {
  Grid grid;
  EdgePermittivity eps;
  NodeScalar rho_h;  // mean-zero source on nodes
};

// Throws unless the grids agree, eps is positive, and rho_h is mean-zero to
// rounding (|A_h(rho)| <= 1e-13 * ||rho||_inf).  Run sampled sources through
// project_source() first.
void validate(const PoissonProblem& problem);

struct SolveOptions {
  double tol_eta = 1e-10;  // stop threshold for max|eta| and the shift size
  int max_sweeps = 0;      // 0 picks 10*N^2
  int n_local = 5;         // sweeps between global shifts
  bool use_shift = true;   // reduced to a single setup shift when eps is constant
};

struct SweepRecord {
  int sweep = 0;
  double energy = 0.0;        // initial energy plus accumulated changes
  double energy_delta = 0.0;  // closed-form change this sweep; <= 0 always
  double max_abs_eta = 0.0;
  double max_abs_zeta = 0.0;  // PB solver only
  double shift_norm = 0.0;    // |(a,b,c)| when a shift ran this sweep, else 0
  double gauss_residual_inf = 0.0;
};

// Entry 0 records the initial state.  The energy column accumulates the
// exact nonpositive per-update changes, so it is nonincreasing by
// construction; final_energy is recomputed directly from the final state.
struct IterationReport {
  std::vector<SweepRecord> sweeps;
  bool converged = false;
  int sweeps_used = 0;
  double final_energy = 0.0;
  bool bracket_clamped = false;  // PB solver only
};

// F_h[D] = (1/2) ||D||^2_{1/eps,h}.
double poisson_energy(const Displacement& D, const EdgePermittivity& eps);

// Builds D0 with div D0 = rho_h (to rounding) and zero component means, by
// cumulative sums of the plane, line, and point parts of the source.
Displacement init_displacement(const PoissonProblem& problem);

// Relaxes the face normal to `axis` anchored at node (i,j,k) in place:
// adds +-eta to its four edges so the circulation of D/eps vanishes there.
// Returns eta; the energy change is exactly -(1/2) eps_sigma h^3 eta^2 with
// eps_sigma the sum of the four reciprocal edge permittivities.
double face_update(Displacement& D, int i, int j, int k, Axis axis,
                   const EdgePermittivity& eps);

// Adds the constant vector (a,b,c) minimizing the energy to D in place;
// afterwards A_h(D/eps) = 0 to rounding.  Returns (a,b,c).
std::array<double, 3> global_shift(Displacement& D,
                                   const EdgePermittivity& eps);

// ||div D - rho||_inf, the Gauss-law defect.
double gauss_residual_inf(const Displacement& D, const NodeScalar& rho);

// Both quantities vanish exactly at the constrained minimizer: the
// curl of D/eps and the componentwise mean of D/eps.
struct EquilibriumResiduals {
  double curl_inf = 0.0;
  std::array<double, 3> mean_field = {0.0, 0.0, 0.0};
};

EquilibriumResiduals equilibrium_residuals(const Displacement& D,
                                           const EdgePermittivity& eps);

struct PoissonResult {
  Displacement D;
  IterationReport report;
};

// Gauss-Seidel sweeps of face_update in lexicographic point order with axes
// x,y,z per point; a global shift every n_local sweeps when use_shift is on
// and eps varies.  Stops once the last sweep's max|eta| (and, when
// shifting, the shift magnitude at the block boundary) falls below tol_eta.
// D0, when given, must satisfy Gauss' law for rho_h; otherwise the solver
// starts from init_displacement.  Non-convergence within max_sweeps is
// reported, not thrown.
PoissonResult solve_poisson(const PoissonProblem& problem,
                            const SolveOptions& opts,
                            const Displacement* D0 = nullptr);

}  // namespace fdes
