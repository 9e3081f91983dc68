#include "fdes/reference.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdes/operators.hpp"

namespace fdes {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

void require_options(const OracleOptions& opts, const char* where) {
  if (!(opts.tol > 0.0)) {
    throw std::invalid_argument(std::string(where) + ": tol must be positive");
  }
  if (opts.max_iter < 1) {
    throw std::invalid_argument(std::string(where) +
                                ": max_iter must be at least 1");
  }
}

void axpy(double a, const NodeScalar& x, NodeScalar& y) {
  const double* xp = x.data();
  double* yp = y.data();
  for (std::size_t t = 0; t < y.a.size(); ++t) yp[t] += a * xp[t];
}

// p = r + beta p
void update_direction(NodeScalar& p, double beta, const NodeScalar& r) {
  double* pp = p.data();
  const double* rp = r.data();
  for (std::size_t t = 0; t < p.a.size(); ++t) pp[t] = rp[t] + beta * pp[t];
}

// Conjugate gradients for an SPD operator on the mean-zero subspace.
// Operator outputs are re-projected, and a candidate solution is accepted
// only once the true (recomputed) residual meets the target, restarting from
// it otherwise.
template <typename Op>
NodeScalar cg_mean_zero(const Op& apply_op, const NodeScalar& b, double tol,
                        int max_iter, const char* where) {
  NodeScalar x(b.grid);
  NodeScalar r = subtract_mean(b);
  NodeScalar p = r;
  const double target = tol * norm_scalar(b);
  double rr = inner_scalar(r, r);
  int iter = 0;
  while (true) {
    if (std::sqrt(rr) <= target) {
      NodeScalar ax = apply_op(x);
      NodeScalar tr(b.grid);
      const double* bp = b.data();
      const double* ap = ax.data();
      double* tp = tr.data();
      for (std::size_t t = 0; t < tr.a.size(); ++t) tp[t] = bp[t] - ap[t];
      tr = subtract_mean(tr);
      if (norm_scalar(tr) <= target) return subtract_mean(x);
      r = tr;
      p = r;
      rr = inner_scalar(r, r);
    }
    if (iter >= max_iter) {
      throw std::runtime_error(std::string(where) +
                               ": conjugate gradients did not converge");
    }
    ++iter;
    const NodeScalar ap = subtract_mean(apply_op(p));
    const double pap = inner_scalar(p, ap);
    if (!(pap > 0.0)) {
      throw std::runtime_error(std::string(where) +
                               ": curvature lost on the mean-zero subspace");
    }
    const double alpha = rr / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double rr_new = inner_scalar(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    update_direction(p, beta, r);
  }
}

// Boltzmann weights w_s = exp(-q_s phi) and their averages.
struct BoltzmannWeights {
  std::vector<NodeScalar> w;
  std::vector<double> avg;
};

BoltzmannWeights boltzmann_weights(const NodeScalar& phi,
                                   const PBProblem& problem) {
  BoltzmannWeights bw;
  bw.w.reserve(problem.species.size());
  bw.avg.resize(problem.species.size());
  const double* pp = phi.data();
  for (std::size_t s = 0; s < problem.species.size(); ++s) {
    NodeScalar ws(phi.grid);
    double* wp = ws.data();
    const double q = problem.species[s].q;
    for (std::size_t t = 0; t < ws.a.size(); ++t) wp[t] = std::exp(-q * pp[t]);
    bw.avg[s] = discrete_average(ws);
    bw.w.push_back(std::move(ws));
  }
  return bw;
}

// G(phi) = A_eps[phi] + sum_s q_s N_s w_s / (L^3 A_h(w_s)) + rho, projected.
NodeScalar ccpbe_residual(const NodeScalar& phi, const BoltzmannWeights& bw,
                          const PBProblem& problem) {
  NodeScalar G = variable_laplacian(phi, problem.eps);
  double* gp = G.data();
  const double* rp = problem.rho_h.data();
  for (std::size_t t = 0; t < G.a.size(); ++t) gp[t] += rp[t];
  const double vol = problem.grid.L * problem.grid.L * problem.grid.L;
  for (std::size_t s = 0; s < problem.species.size(); ++s) {
    const double coef = problem.species[s].q * problem.species[s].total_mass /
                        (vol * bw.avg[s]);
    const double* wp = bw.w[s].data();
    for (std::size_t t = 0; t < G.a.size(); ++t) gp[t] += coef * wp[t];
  }
  return subtract_mean(G);
}

}  // namespace

NodeScalar solve_potential(const PoissonProblem& problem,
                           const OracleOptions& opts) {
  validate(problem);
  require_options(opts, "solve_potential");
  const auto apply = [&problem](const NodeScalar& x) {
    NodeScalar ax = variable_laplacian(x, problem.eps);
    double* p = ax.data();
    for (std::size_t t = 0; t < ax.a.size(); ++t) p[t] = -p[t];
    return ax;
  };
  return cg_mean_zero(apply, problem.rho_h, opts.tol, opts.max_iter,
                      "solve_potential");
}

Displacement minimizer_displacement(const NodeScalar& phi,
                                    const EdgePermittivity& eps) {
  return displacement_from_potential(phi, eps);
}

NodeScalar solve_ccpbe(const PBProblem& problem, const OracleOptions& opts) {
  validate(problem);
  require_options(opts, "solve_ccpbe");
  const Grid& g = problem.grid;
  const double vol = g.L * g.L * g.L;
  const std::size_t ns = problem.species.size();
  const int inner_cap = 400 * g.N;

  NodeScalar phi(g);
  BoltzmannWeights bw = boltzmann_weights(phi, problem);
  NodeScalar G = ccpbe_residual(phi, bw, problem);
  double gnorm = norm_scalar(G);
  const double target = opts.tol * (1.0 + max_norm_scalar(problem.rho_h));

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (max_norm_scalar(G) <= target) return subtract_mean(phi);

    // Newton system in negated form: M d = G with
    // M[d] = -A_eps[d] + sum_s k_s (w_s d - w_s A_h(w_s d)/A_h(w_s)),
    // symmetric positive definite on the mean-zero subspace, so the CG core
    // applies and d is the Newton direction for phi + d.
    std::vector<double> ks(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      ks[s] = problem.species[s].q * problem.species[s].q *
              problem.species[s].total_mass / (vol * bw.avg[s]);
    }
    const auto apply_m = [&](const NodeScalar& x) {
      NodeScalar ax = variable_laplacian(x, problem.eps);
      double* ap = ax.data();
      for (std::size_t t = 0; t < ax.a.size(); ++t) ap[t] = -ap[t];
      const double* xp = x.data();
      const double inv_nodes = 1.0 / static_cast<double>(x.a.size());
      for (std::size_t s = 0; s < ns; ++s) {
        const double* wp = bw.w[s].data();
        double sum = 0.0;
        for (std::size_t t = 0; t < ax.a.size(); ++t) sum += wp[t] * xp[t];
        const double corr = sum * inv_nodes / bw.avg[s];
        for (std::size_t t = 0; t < ax.a.size(); ++t) {
          ap[t] += ks[s] * (wp[t] * xp[t] - wp[t] * corr);
        }
      }
      return ax;
    };
    const NodeScalar d = cg_mean_zero(apply_m, G, 1e-12, inner_cap,
                                      "solve_ccpbe");

    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      NodeScalar trial(g);
      const double* pp = phi.data();
      const double* dp = d.data();
      double* tp = trial.data();
      for (std::size_t t = 0; t < trial.a.size(); ++t) {
        tp[t] = pp[t] + step * dp[t];
      }
      trial = subtract_mean(trial);
      BoltzmannWeights bt = boltzmann_weights(trial, problem);
      NodeScalar Gt = ccpbe_residual(trial, bt, problem);
      const double gn = norm_scalar(Gt);
      if (gn < gnorm) {
        phi = std::move(trial);
        bw = std::move(bt);
        G = std::move(Gt);
        gnorm = gn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw std::runtime_error("solve_ccpbe: line search failed");
    }
  }
  if (max_norm_scalar(G) <= target) return subtract_mean(phi);
  throw std::runtime_error("solve_ccpbe: Newton did not converge");
}

PBState minimizer_pb_state(const NodeScalar& phi, const PBProblem& problem) {
  validate(problem);
  require_same_grid(phi.grid, problem.grid, "minimizer_pb_state");
  const Grid& g = problem.grid;
  const double vol = g.L * g.L * g.L;
  PBState state;
  state.c.reserve(problem.species.size());
  const double* pp = phi.data();
  for (const Species& s : problem.species) {
    NodeScalar c(g);
    double* cp = c.data();
    for (std::size_t t = 0; t < c.a.size(); ++t) {
      cp[t] = std::exp(-s.q * pp[t]);
    }
    const double scale = s.total_mass / (vol * discrete_average(c));
    for (std::size_t t = 0; t < c.a.size(); ++t) cp[t] *= scale;
    state.c.push_back(std::move(c));
  }
  state.D = displacement_from_potential(phi, problem.eps);
  return state;
}

}  // namespace fdes
