#include "fdes/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace fdes {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

}  // namespace

Grid build_grid(double L, int N) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("build_grid: box length must be positive");
  }
  if (N < 2) {
    throw std::invalid_argument("build_grid: need at least 2 cells per axis");
  }
  return Grid{L, N, L / N};
}

double discrete_average(const NodeScalar& f) {
  const double* p = f.data();
  const std::size_t m = f.a.size();
  double s = 0.0;
  for (std::size_t t = 0; t < m; ++t) s += p[t];
  const double n = static_cast<double>(f.grid.N);
  return s / (n * n * n);
}

NodeScalar subtract_mean(const NodeScalar& f) {
  NodeScalar out = f;
  const double m = discrete_average(f);
  double* p = out.data();
  for (std::size_t t = 0; t < out.a.size(); ++t) p[t] -= m;
  return out;
}

double inner_scalar(const NodeScalar& f, const NodeScalar& g) {
  require_same_grid(f.grid, g.grid, "inner_scalar");
  const double* a = f.data();
  const double* b = g.data();
  double s = 0.0;
  for (std::size_t t = 0; t < f.a.size(); ++t) s += a[t] * b[t];
  const double h = f.grid.h;
  return h * h * h * s;
}

double norm_scalar(const NodeScalar& f) {
  return std::sqrt(inner_scalar(f, f));
}

double max_norm_scalar(const NodeScalar& f) {
  const double* p = f.data();
  double m = 0.0;
  for (std::size_t t = 0; t < f.a.size(); ++t) m = std::max(m, std::abs(p[t]));
  return m;
}

double inner_displacement_weighted(const Displacement& D, const Displacement& E,
                                   const EdgePermittivity& eps) {
  require_same_grid(D.grid, E.grid, "inner_displacement_weighted");
  require_same_grid(D.grid, eps.grid, "inner_displacement_weighted");
  const double* du = D.u.data();
  const double* dv = D.v.data();
  const double* dw = D.w.data();
  const double* eu = E.u.data();
  const double* ev = E.v.data();
  const double* ew = E.w.data();
  const double* ex = eps.ex.data();
  const double* ey = eps.ey.data();
  const double* ez = eps.ez.data();
  double s = 0.0;
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    s += du[t] * eu[t] / ex[t] + dv[t] * ev[t] / ey[t] + dw[t] * ew[t] / ez[t];
  }
  const double h = D.grid.h;
  return h * h * h * s;
}

double norm_displacement_weighted(const Displacement& D,
                                  const EdgePermittivity& eps) {
  return std::sqrt(inner_displacement_weighted(D, D, eps));
}

double inner_displacement(const Displacement& D, const Displacement& E) {
  require_same_grid(D.grid, E.grid, "inner_displacement");
  const double* du = D.u.data();
  const double* dv = D.v.data();
  const double* dw = D.w.data();
  const double* eu = E.u.data();
  const double* ev = E.v.data();
  const double* ew = E.w.data();
  double s = 0.0;
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    s += du[t] * eu[t] + dv[t] * ev[t] + dw[t] * ew[t];
  }
  const double h = D.grid.h;
  return h * h * h * s;
}

double norm_displacement(const Displacement& D) {
  return std::sqrt(inner_displacement(D, D));
}

double max_norm_displacement(const Displacement& D) {
  const double* du = D.u.data();
  const double* dv = D.v.data();
  const double* dw = D.w.data();
  double m = 0.0;
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    m = std::max(m, std::abs(du[t]));
    m = std::max(m, std::abs(dv[t]));
    m = std::max(m, std::abs(dw[t]));
  }
  return m;
}

std::array<double, 3> mean_components(const Displacement& D) {
  const double* du = D.u.data();
  const double* dv = D.v.data();
  const double* dw = D.w.data();
  double su = 0.0, sv = 0.0, sw = 0.0;
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    su += du[t];
    sv += dv[t];
    sw += dw[t];
  }
  const double n = static_cast<double>(D.grid.N);
  const double n3 = n * n * n;
  return {su / n3, sv / n3, sw / n3};
}

NodeScalar project_source(const NodeScalar& rho_samples, SourceMode mode,
                          const std::vector<Species>& species) {
  NodeScalar out = rho_samples;
  double offset = discrete_average(rho_samples);
  if (mode == SourceMode::pb) {
    if (species.empty()) {
      throw std::invalid_argument(
          "project_source: pb mode needs at least one species");
    }
    double net = 0.0;
    for (const Species& s : species) net += s.q * s.total_mass;
    const double L = rho_samples.grid.L;
    offset += net / (L * L * L);
  }
  double* p = out.data();
  for (std::size_t t = 0; t < out.a.size(); ++t) p[t] -= offset;
  return out;
}

NodeScalar sample_node_scalar(const FieldSampler& f, const Grid& grid) {
  NodeScalar out(grid);
  const double h = grid.h;
  for (int i = 0; i < grid.N; ++i) {
    for (int j = 0; j < grid.N; ++j) {
      for (int k = 0; k < grid.N; ++k) {
        out(i, j, k) = f(i * h, j * h, k * h);
      }
    }
  }
  return out;
}

Displacement sample_displacement(const FieldSampler& Dx, const FieldSampler& Dy,
                                 const FieldSampler& Dz, const Grid& grid) {
  Displacement out(grid);
  const double h = grid.h;
  for (int i = 0; i < grid.N; ++i) {
    for (int j = 0; j < grid.N; ++j) {
      for (int k = 0; k < grid.N; ++k) {
        out.u(i, j, k) = Dx((i + 0.5) * h, j * h, k * h);
        out.v(i, j, k) = Dy(i * h, (j + 0.5) * h, k * h);
        out.w(i, j, k) = Dz(i * h, j * h, (k + 0.5) * h);
      }
    }
  }
  return out;
}

NodeVector midpoint_average(const Displacement& D) {
  NodeVector out(D.grid);
  const int n = D.grid.N;
  for (int i = 0; i < n; ++i) {
    const int im = i == 0 ? n - 1 : i - 1;
    for (int j = 0; j < n; ++j) {
      const int jm = j == 0 ? n - 1 : j - 1;
      for (int k = 0; k < n; ++k) {
        const int km = k == 0 ? n - 1 : k - 1;
        out.x(i, j, k) = 0.5 * (D.u(i, j, k) + D.u(im, j, k));
        out.y(i, j, k) = 0.5 * (D.v(i, j, k) + D.v(i, jm, k));
        out.z(i, j, k) = 0.5 * (D.w(i, j, k) + D.w(i, j, km));
      }
    }
  }
  return out;
}

}  // namespace fdes
