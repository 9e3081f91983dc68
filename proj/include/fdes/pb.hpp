#pragma once

#include <vector>

#include "fdes/grid.hpp"
#include "fdes/poisson.hpp"

namespace fdes {

// Poisson-Boltzmann problem on the periodic staggered grid: fixed source
// rho_h plus mobile ionic species, each with valence q and total mass.
struct PBProblem {
  Grid grid;
  EdgePermittivity eps;
  NodeScalar rho_h;
  std::vector<Species> species;
};

// Throws std::invalid_argument unless grids agree, permittivity is positive,
// every species has nonzero valence and positive mass, and the system is
// electrically neutral to 1e-12 relative. Sampled sources should go through
// project_source() with the species list first.
void validate(const PBProblem& problem);

// Concentrations per species on nodes plus the displacement field.
struct PBState {
  std::vector<NodeScalar> c;
  Displacement D;
};

// Free energy: field part plus ideal-gas entropy of every species, with the
// 0 log 0 = 0 convention. Throws std::invalid_argument on a negative
// concentration.
double pb_energy(const PBState& state, const EdgePermittivity& eps);

// Uniform concentrations c_s = N_s / L^3 and a displacement satisfying
// Gauss' law for the resulting total charge.
PBState init_state(const PBProblem& problem);

// Root of f(zeta) = log(beta + zeta) - log(alpha - zeta) - b*gamma + a*zeta
// on (-beta, alpha); f is strictly increasing there so the root is unique.
// Safeguarded Newton with bisection fallback; the residual meets
// 1e-12 * (1 + |b*gamma|) within 50 iterations. alpha, beta, a must be
// positive (std::invalid_argument); hitting the iteration cap throws
// std::runtime_error.
double zeta_solve(double alpha, double beta, double gamma, double a, double b);

// One transfer move on the edge leaving node (i,j,k) along `axis` for the
// given species: moves mass zeta from the node to its positive neighbour and
// adjusts the displacement component on the connecting edge by -h q zeta, so
// mass, positivity, and Gauss' law are all preserved. Updates state in place
// and returns zeta. Throws std::out_of_range on a bad index.
double edge_update(PBState& state, int i, int j, int k, Axis axis,
                   int species_index, const PBProblem& problem);

// Exact free-energy change of one edge update, from the pre-update donor and
// receiver concentrations alpha, beta, the edge coefficient
// a = h^2 q^2 / eps_edge, the accepted zeta, and f0 = log(beta) - log(alpha)
// - b*gamma (the zeta equation's value at 0). Nonpositive by construction.
double edge_energy_delta(double h3, double alpha, double beta, double a,
                         double zeta, double f0);

// Largest violation of the discrete Boltzmann relation over all species and
// edges: |log(c_nbr/c) - h q d / eps| per edge. Throws std::invalid_argument
// on a nonpositive concentration.
double boltzmann_residual(const PBState& state, const PBProblem& problem);

// Mean-zero potential read off one species: -(1/q_s) log c_s minus its
// average. At equilibrium the result is independent of the species chosen.
// Throws std::invalid_argument on a nonpositive concentration,
// std::out_of_range on a bad species index.
NodeScalar recover_potential(const PBState& state, int species_index,
                             const PBProblem& problem);

// Relaxation solver: sweeps all nodes in lexicographic order; per node, for
// each axis x,y,z, an edge_update for every species in turn, and when
// interleave_displacement is set the three plain face updates follow.
// Stops once a full sweep's max |zeta| (and max |eta| when interleaving)
// drops below opts.tol_eta. opts.use_shift and opts.n_local are ignored
// here; the transfer moves handle the mean condition on their own. A run
// that needed the degenerate bracket guard sets report.bracket_clamped.
struct PBResult {
  PBState state;
  IterationReport report;
};
PBResult solve_pb(const PBProblem& problem, const SolveOptions& opts,
                  bool interleave_displacement = true);

}  // namespace fdes
