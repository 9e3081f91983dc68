#include "fdes/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdes/operators.hpp"
#include "relax_kernels.hpp"

namespace fdes {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

void require_options(const SolveOptions& opts, const char* where) {
  if (!(opts.tol_eta > 0.0)) {
    throw std::invalid_argument(std::string(where) + ": tol_eta must be positive");
  }
  if (opts.max_sweeps < 0) {
    throw std::invalid_argument(std::string(where) +
                                ": max_sweeps must be nonnegative");
  }
  if (opts.n_local < 1) {
    throw std::invalid_argument(std::string(where) +
                                ": n_local must be at least 1");
  }
}

// Closed-form energy change of a global shift (a,b,c); rsum holds the sums
// of the reciprocal edge permittivities per component.
double shift_energy_delta(double h3, const std::array<double, 3>& rsum,
                          const std::array<double, 3>& s) {
  return -0.5 * h3 *
         (rsum[0] * (s[0] * s[0]) + rsum[1] * (s[1] * s[1]) +
          rsum[2] * (s[2] * s[2]));
}

struct SweepStats {
  double max_eta = 0.0;
  double delta = 0.0;
};

// One full pass of face relaxations: lexicographic in (i,j,k), axes x,y,z
// at each point, updating in place with current values.
SweepStats sweep_faces(const std::array<double*, 3>& d,
                       const std::array<const double*, 3>& r, int n,
                       double h3) {
  SweepStats st;
  const std::size_t nn = static_cast<std::size_t>(n);
  for (int i = 0; i < n; ++i) {
    const int ip = i + 1 == n ? 0 : i + 1;
    for (int j = 0; j < n; ++j) {
      const int jp = j + 1 == n ? 0 : j + 1;
      const std::size_t rc = (static_cast<std::size_t>(i) * nn + j) * nn;
      const std::size_t rx = (static_cast<std::size_t>(ip) * nn + j) * nn;
      const std::size_t ry = (static_cast<std::size_t>(i) * nn + jp) * nn;
      for (int k = 0; k < n; ++k) {
        const std::size_t kp =
            k + 1 == n ? 0 : static_cast<std::size_t>(k) + 1;
        const std::size_t nbr[4] = {rc + k, rx + k, ry + k, rc + kp};
        const detail::FaceRelax fx = detail::relax_face<0>(d, r, nbr);
        const detail::FaceRelax fy = detail::relax_face<1>(d, r, nbr);
        const detail::FaceRelax fz = detail::relax_face<2>(d, r, nbr);
        st.max_eta = std::max({st.max_eta, std::abs(fx.eta), std::abs(fy.eta),
                               std::abs(fz.eta)});
        st.delta += detail::face_energy_delta(fx.esum, h3, fx.eta);
        st.delta += detail::face_energy_delta(fy.esum, h3, fy.eta);
        st.delta += detail::face_energy_delta(fz.esum, h3, fz.eta);
      }
    }
  }
  return st;
}

}  // namespace

void validate(const PoissonProblem& problem) {
  require_same_grid(problem.grid, problem.eps.grid, "poisson problem");
  require_same_grid(problem.grid, problem.rho_h.grid, "poisson problem");
  if (!(problem.eps.eps_min > 0.0)) {
    throw std::invalid_argument("poisson problem: permittivity must be positive");
  }
  const double mean = std::abs(discrete_average(problem.rho_h));
  if (mean > 1e-13 * max_norm_scalar(problem.rho_h)) {
    throw std::invalid_argument(
        "poisson problem: source must be mean-zero (project it first)");
  }
}

double poisson_energy(const Displacement& D, const EdgePermittivity& eps) {
  return 0.5 * inner_displacement_weighted(D, D, eps);
}

Displacement init_displacement(const PoissonProblem& problem) {
  validate(problem);
  const Grid& g = problem.grid;
  const int n = g.N;
  const double h = g.h;
  // The cumulative sums below wrap around consistently only for an exactly
  // compensated mean; the validated input may still carry a rounding-level
  // one.
  const NodeScalar rho = subtract_mean(problem.rho_h);

  // plane averages p_k and line averages q_{j,k} with the plane part removed
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s += rho(i, j, k);
    }
    p[k] = s / (static_cast<double>(n) * n);
  }
  std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rho(i, j, k);
      q[static_cast<std::size_t>(j) * n + k] = s / n - p[k];
    }
  }

  Displacement D(g);
  // w picks up the plane part: w_{k+1/2} - w_{k-1/2} = h p_k
  std::vector<double> W(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k < n; ++k) W[k] = W[k - 1] + h * p[k];
  // v picks up the line part per plane
  std::vector<double> V(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 1; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      V[static_cast<std::size_t>(j) * n + k] =
          V[static_cast<std::size_t>(j - 1) * n + k] +
          h * q[static_cast<std::size_t>(j) * n + k];
    }
  }
  // u picks up what remains of the source
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        D.u(i, j, k) =
            D.u(i - 1, j, k) +
            h * (rho(i, j, k) - p[k] - q[static_cast<std::size_t>(j) * n + k]);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        D.v(i, j, k) = V[static_cast<std::size_t>(j) * n + k];
        D.w(i, j, k) = W[k];
      }
    }
  }

  const std::array<double, 3> mc = mean_components(D);
  double* du = D.u.data();
  double* dv = D.v.data();
  double* dw = D.w.data();
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    du[t] -= mc[0];
    dv[t] -= mc[1];
    dw[t] -= mc[2];
  }
  return D;
}

double face_update(Displacement& D, int i, int j, int k, Axis axis,
                   const EdgePermittivity& eps) {
  require_same_grid(D.grid, eps.grid, "face_update");
  const int n = D.grid.N;
  if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k >= n) {
    throw std::out_of_range("face_update: face index out of range");
  }
  const int ip = i + 1 == n ? 0 : i + 1;
  const int jp = j + 1 == n ? 0 : j + 1;
  const int kp = k + 1 == n ? 0 : k + 1;
  const std::size_t nbr[4] = {D.u.flat(i, j, k), D.u.flat(ip, j, k),
                              D.u.flat(i, jp, k), D.u.flat(i, j, kp)};
  const std::array<double*, 3> d = {D.u.data(), D.v.data(), D.w.data()};
  const std::array<const double*, 3> e = {eps.ex.data(), eps.ey.data(),
                                          eps.ez.data()};
  const detail::FaceStencil& st =
      detail::face_circulation[static_cast<int>(axis)];
  double dval[4];
  double rval[4];
  for (int t = 0; t < 4; ++t) {
    dval[t] = d[st.e[t].comp][nbr[st.e[t].nbr]];
    rval[t] = 1.0 / e[st.e[t].comp][nbr[st.e[t].nbr]];
  }
  const detail::FaceRelax fr = detail::relax_gathered(st, dval, rval);
  for (int t = 0; t < 4; ++t) {
    d[st.e[t].comp][nbr[st.e[t].nbr]] += st.e[t].sign * fr.eta;
  }
  return fr.eta;
}

std::array<double, 3> global_shift(Displacement& D,
                                   const EdgePermittivity& eps) {
  require_same_grid(D.grid, eps.grid, "global_shift");
  const double* du = D.u.data();
  const double* dv = D.v.data();
  const double* dw = D.w.data();
  const double* ex = eps.ex.data();
  const double* ey = eps.ey.data();
  const double* ez = eps.ez.data();
  double su = 0.0, sv = 0.0, sw = 0.0;
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    su += du[t] / ex[t];
    sv += dv[t] / ey[t];
    sw += dw[t] / ez[t];
    sx += 1.0 / ex[t];
    sy += 1.0 / ey[t];
    sz += 1.0 / ez[t];
  }
  const std::array<double, 3> s = {-su / sx, -sv / sy, -sw / sz};
  double* mu = D.u.data();
  double* mv = D.v.data();
  double* mw = D.w.data();
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    mu[t] += s[0];
    mv[t] += s[1];
    mw[t] += s[2];
  }
  return s;
}

double gauss_residual_inf(const Displacement& D, const NodeScalar& rho) {
  require_same_grid(D.grid, rho.grid, "gauss_residual_inf");
  const int n = D.grid.N;
  const double h = D.grid.h;
  const double* du = D.u.data();
  const double* dv = D.v.data();
  const double* dw = D.w.data();
  const double* rp = rho.data();
  const std::size_t nn = static_cast<std::size_t>(n);
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const int im = i == 0 ? n - 1 : i - 1;
    for (int j = 0; j < n; ++j) {
      const int jm = j == 0 ? n - 1 : j - 1;
      const std::size_t rc = (static_cast<std::size_t>(i) * nn + j) * nn;
      const std::size_t rx = (static_cast<std::size_t>(im) * nn + j) * nn;
      const std::size_t ry = (static_cast<std::size_t>(i) * nn + jm) * nn;
      for (int k = 0; k < n; ++k) {
        const std::size_t km =
            k == 0 ? nn - 1 : static_cast<std::size_t>(k) - 1;
        const double div =
            ((du[rc + k] - du[rx + k]) + (dv[rc + k] - dv[ry + k]) +
             (dw[rc + k] - dw[rc + km])) /
            h;
        m = std::max(m, std::abs(div - rp[rc + k]));
      }
    }
  }
  return m;
}

EquilibriumResiduals equilibrium_residuals(const Displacement& D,
                                           const EdgePermittivity& eps) {
  require_same_grid(D.grid, eps.grid, "equilibrium_residuals");
  const Displacement field = scale_by_permittivity(D, eps);
  const FaceVector c = curl(field);
  EquilibriumResiduals out;
  const double* cx = c.x.data();
  const double* cy = c.y.data();
  const double* cz = c.z.data();
  for (std::size_t t = 0; t < c.x.size(); ++t) {
    out.curl_inf = std::max(
        {out.curl_inf, std::abs(cx[t]), std::abs(cy[t]), std::abs(cz[t])});
  }
  out.mean_field = mean_components(field);
  return out;
}

PoissonResult solve_poisson(const PoissonProblem& problem,
                            const SolveOptions& opts, const Displacement* D0) {
  validate(problem);
  require_options(opts, "solve_poisson");

  const Grid& g = problem.grid;
  const EdgePermittivity& eps = problem.eps;
  const int n = g.N;
  const double h = g.h;
  const double h3 = h * h * h;

  PoissonResult res;
  if (D0 != nullptr) {
    require_same_grid(D0->grid, g, "solve_poisson");
    const double defect = gauss_residual_inf(*D0, problem.rho_h);
    if (defect > 1e-10 * (1.0 + max_norm_scalar(problem.rho_h))) {
      throw std::invalid_argument(
          "solve_poisson: initial displacement violates Gauss' law");
    }
    res.D = *D0;
  } else {
    res.D = init_displacement(problem);
  }
  Displacement& D = res.D;

  const std::size_t m = D.u.size();
  std::vector<double> rx(m), ry(m), rz(m);
  {
    const double* ex = eps.ex.data();
    const double* ey = eps.ey.data();
    const double* ez = eps.ez.data();
    for (std::size_t t = 0; t < m; ++t) {
      rx[t] = 1.0 / ex[t];
      ry[t] = 1.0 / ey[t];
      rz[t] = 1.0 / ez[t];
    }
  }
  std::array<double, 3> rsum = {0.0, 0.0, 0.0};
  for (std::size_t t = 0; t < m; ++t) {
    rsum[0] += rx[t];
    rsum[1] += ry[t];
    rsum[2] += rz[t];
  }
  const std::array<double*, 3> d = {D.u.data(), D.v.data(), D.w.data()};
  const std::array<const double*, 3> r = {rx.data(), ry.data(), rz.data()};

  const bool const_eps = eps.eps_min == eps.eps_max;
  const bool shifting = opts.use_shift && !const_eps;
  if (opts.use_shift && const_eps) {
    // With constant eps the face updates keep A_h(D) fixed, so one shift up
    // front settles the mean condition for the whole run.
    global_shift(D, eps);
  }

  IterationReport& rep = res.report;
  const double f0 = poisson_energy(D, eps);
  double acc = 0.0;
  rep.sweeps.push_back(
      {0, f0, 0.0, 0.0, 0.0, 0.0, gauss_residual_inf(D, problem.rho_h)});

  const int max_sweeps = opts.max_sweeps > 0 ? opts.max_sweeps : 10 * n * n;
  int sweep = 0;
  bool converged = false;
  while (sweep < max_sweeps && !converged) {
    ++sweep;
    const SweepStats st = sweep_faces(d, r, n, h3);
    double delta = st.delta;
    double shift_norm = 0.0;
    const bool at_boundary = shifting && sweep % opts.n_local == 0;
    if (at_boundary) {
      const std::array<double, 3> s = global_shift(D, eps);
      shift_norm = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
      delta += shift_energy_delta(h3, rsum, s);
    }
    acc += delta;
    rep.sweeps.push_back({sweep, f0 + acc, delta, st.max_eta, 0.0, shift_norm,
                          gauss_residual_inf(D, problem.rho_h)});
    if (shifting) {
      converged = at_boundary && st.max_eta < opts.tol_eta &&
                  shift_norm < opts.tol_eta;
    } else {
      converged = st.max_eta < opts.tol_eta;
    }
  }
  rep.converged = converged;
  rep.sweeps_used = sweep;
  rep.final_energy = poisson_energy(D, eps);
  return res;
}

}  // namespace fdes
