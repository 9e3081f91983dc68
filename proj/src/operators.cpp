#include "fdes/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "relax_kernels.hpp"

namespace fdes {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

}  // namespace

EdgePermittivity half_edge_permittivity(const NodeScalar& eps_nodes) {
  const double* p = eps_nodes.data();
  for (std::size_t t = 0; t < eps_nodes.a.size(); ++t) {
    if (!(p[t] > 0.0) || !std::isfinite(p[t])) {
      throw std::invalid_argument(
          "half_edge_permittivity: permittivity must be positive");
    }
  }
  EdgePermittivity out(eps_nodes.grid);
  const int n = eps_nodes.grid.N;
  double lo = p[0];
  double hi = p[0];
  for (int i = 0; i < n; ++i) {
    const int ip = i + 1 == n ? 0 : i + 1;
    for (int j = 0; j < n; ++j) {
      const int jp = j + 1 == n ? 0 : j + 1;
      for (int k = 0; k < n; ++k) {
        const int kp = k + 1 == n ? 0 : k + 1;
        const double ex = 0.5 * (eps_nodes(i, j, k) + eps_nodes(ip, j, k));
        const double ey = 0.5 * (eps_nodes(i, j, k) + eps_nodes(i, jp, k));
        const double ez = 0.5 * (eps_nodes(i, j, k) + eps_nodes(i, j, kp));
        out.ex(i, j, k) = ex;
        out.ey(i, j, k) = ey;
        out.ez(i, j, k) = ez;
        lo = std::min({lo, ex, ey, ez});
        hi = std::max({hi, ex, ey, ez});
      }
    }
  }
  out.eps_min = lo;
  out.eps_max = hi;
  return out;
}

EdgePermittivity uniform_permittivity(const Grid& grid, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(
        "uniform_permittivity: permittivity must be positive");
  }
  return EdgePermittivity(grid, value);
}

NodeVector gradient(const NodeScalar& phi, GradientDirection direction) {
  NodeVector out(phi.grid);
  const int n = phi.grid.N;
  const double h = phi.grid.h;
  if (direction == GradientDirection::forward) {
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      for (int j = 0; j < n; ++j) {
        const int jp = j + 1 == n ? 0 : j + 1;
        for (int k = 0; k < n; ++k) {
          const int kp = k + 1 == n ? 0 : k + 1;
          out.x(i, j, k) = (phi(ip, j, k) - phi(i, j, k)) / h;
          out.y(i, j, k) = (phi(i, jp, k) - phi(i, j, k)) / h;
          out.z(i, j, k) = (phi(i, j, kp) - phi(i, j, k)) / h;
        }
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const int im = i == 0 ? n - 1 : i - 1;
      for (int j = 0; j < n; ++j) {
        const int jm = j == 0 ? n - 1 : j - 1;
        for (int k = 0; k < n; ++k) {
          const int km = k == 0 ? n - 1 : k - 1;
          out.x(i, j, k) = (phi(i, j, k) - phi(im, j, k)) / h;
          out.y(i, j, k) = (phi(i, j, k) - phi(i, jm, k)) / h;
          out.z(i, j, k) = (phi(i, j, k) - phi(i, j, km)) / h;
        }
      }
    }
  }
  return out;
}

NodeScalar divergence(const Displacement& D) {
  NodeScalar out(D.grid);
  const int n = D.grid.N;
  const double h = D.grid.h;
  for (int i = 0; i < n; ++i) {
    const int im = i == 0 ? n - 1 : i - 1;
    for (int j = 0; j < n; ++j) {
      const int jm = j == 0 ? n - 1 : j - 1;
      for (int k = 0; k < n; ++k) {
        const int km = k == 0 ? n - 1 : k - 1;
        out(i, j, k) = ((D.u(i, j, k) - D.u(im, j, k)) +
                        (D.v(i, j, k) - D.v(i, jm, k)) +
                        (D.w(i, j, k) - D.w(i, j, km))) /
                       h;
      }
    }
  }
  return out;
}

FaceVector curl(const Displacement& D) {
  FaceVector out(D.grid);
  const int n = D.grid.N;
  const double h = D.grid.h;
  const std::array<const double*, 3> d = {D.u.data(), D.v.data(), D.w.data()};
  for (int i = 0; i < n; ++i) {
    const int ip = i + 1 == n ? 0 : i + 1;
    for (int j = 0; j < n; ++j) {
      const int jp = j + 1 == n ? 0 : j + 1;
      for (int k = 0; k < n; ++k) {
        const int kp = k + 1 == n ? 0 : k + 1;
        const std::size_t nbr[4] = {
            D.u.flat(i, j, k), D.u.flat(ip, j, k), D.u.flat(i, jp, k),
            D.u.flat(i, j, kp)};
        out.x(i, j, k) = detail::face_circulation_sum<0>(d, nbr) / h;
        out.y(i, j, k) = detail::face_circulation_sum<1>(d, nbr) / h;
        out.z(i, j, k) = detail::face_circulation_sum<2>(d, nbr) / h;
      }
    }
  }
  return out;
}

NodeScalar variable_laplacian(const NodeScalar& phi,
                              const EdgePermittivity& eps) {
  require_same_grid(phi.grid, eps.grid, "variable_laplacian");
  NodeScalar out = divergence(displacement_from_potential(phi, eps));
  double* p = out.data();
  for (std::size_t t = 0; t < out.a.size(); ++t) p[t] = -p[t];
  return out;
}

Displacement displacement_from_potential(const NodeScalar& phi,
                                         const EdgePermittivity& eps) {
  require_same_grid(phi.grid, eps.grid, "displacement_from_potential");
  Displacement out(phi.grid);
  const int n = phi.grid.N;
  const double h = phi.grid.h;
  for (int i = 0; i < n; ++i) {
    const int ip = i + 1 == n ? 0 : i + 1;
    for (int j = 0; j < n; ++j) {
      const int jp = j + 1 == n ? 0 : j + 1;
      for (int k = 0; k < n; ++k) {
        const int kp = k + 1 == n ? 0 : k + 1;
        out.u(i, j, k) = -eps.ex(i, j, k) * ((phi(ip, j, k) - phi(i, j, k)) / h);
        out.v(i, j, k) = -eps.ey(i, j, k) * ((phi(i, jp, k) - phi(i, j, k)) / h);
        out.w(i, j, k) = -eps.ez(i, j, k) * ((phi(i, j, kp) - phi(i, j, k)) / h);
      }
    }
  }
  return out;
}

Displacement scale_by_permittivity(const Displacement& D,
                                   const EdgePermittivity& eps) {
  require_same_grid(D.grid, eps.grid, "scale_by_permittivity");
  Displacement out(D.grid);
  const double* du = D.u.data();
  const double* dv = D.v.data();
  const double* dw = D.w.data();
  const double* ex = eps.ex.data();
  const double* ey = eps.ey.data();
  const double* ez = eps.ez.data();
  double* ou = out.u.data();
  double* ov = out.v.data();
  double* ow = out.w.data();
  for (std::size_t t = 0; t < D.u.size(); ++t) {
    ou[t] = du[t] / ex[t];
    ov[t] = dv[t] / ey[t];
    ow[t] = dw[t] / ez[t];
  }
  return out;
}

}  // namespace fdes
