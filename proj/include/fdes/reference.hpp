#pragma once

#include "fdes/grid.hpp"
#include "fdes/pb.hpp"
#include "fdes/poisson.hpp"

namespace fdes {

// Settings for the oracle solvers. tol is a relative residual target;
// max_iter caps the outer iteration (conjugate-gradient steps for
// solve_potential, Newton steps for solve_ccpbe).
struct OracleOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

// Mean-zero potential with ||A_eps[phi] + rho||_h <= tol * ||rho||_h, by
// conjugate gradients on the mean-zero subspace, where the operator is
// symmetric positive definite; iterates are re-projected every step and the
// true residual is checked before accepting convergence. Throws
// std::runtime_error past max_iter.
NodeScalar solve_potential(const PoissonProblem& problem,
                           const OracleOptions& opts);

// The constrained field-energy minimizer induced by a potential: -eps grad
// phi on edges. For phi = solve_potential(...) this is the minimizer of the
// quadratic energy over the Gauss'-law class.
Displacement minimizer_displacement(const NodeScalar& phi,
                                    const EdgePermittivity& eps);

// Mean-zero root of the charge-conserving discrete Poisson-Boltzmann
// equation, by damped Newton with the exact Jacobian (diagonal plus the
// rank-one-per-species correction from the concentration normalization);
// each step is solved by the same conjugate-gradient core and a halving line
// search keeps the residual norm strictly decreasing. Stops once the
// residual max-norm drops below tol * (1 + max|rho_h|). Throws
// std::runtime_error on line-search failure or past max_iter.
NodeScalar solve_ccpbe(const PBProblem& problem, const OracleOptions& opts);

// The PB energy minimizer induced by a potential: Boltzmann concentrations
// normalized to each species' mass, plus -eps grad phi on edges.
PBState minimizer_pb_state(const NodeScalar& phi, const PBProblem& problem);

}  // namespace fdes
