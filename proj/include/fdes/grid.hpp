#pragma once

// Periodic staggered-grid containers for the cube [0,L]^3 with N cells per
// axis and spacing h = L/N.  Scalars (potential, charge, concentrations)
// live on nodes: entry (i,j,k) is the value at (ih, jh, kh).  Displacement
// components live on edge midpoints with the storage convention
//     u[i,j,k] ~ ((i+1/2)h, jh, kh),
//     v[i,j,k] ~ (ih, (j+1/2)h, kh),
//     w[i,j,k] ~ (ih, jh, (k+1/2)h),
// and curl-type quantities on face centers ((i+1/2)h, (j+1/2)h, (k+1/2)h).
// Index access wraps modulo N on every axis, so fields are periodic by
// construction and no ghost layers are needed.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace fdes {

struct Grid {
  double L = 0.0;  // box side length
  int N = 0;       // cells per axis
  double h = 0.0;  // spacing, L/N
};

// Validates L > 0 and N >= 2.
Grid build_grid(double L, int N);

inline bool same_grid(const Grid& a, const Grid& b) {
  return a.N == b.N && a.L == b.L;
}

inline int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

enum class Axis { x = 0, y = 1, z = 2 };

// Cube of N^3 doubles with periodic index access.  Storage is row-major in
// (i,j,k) with k fastest, so iterating the flat array visits grid points in
// lexicographic order.
class Lattice3 {
 public:
  Lattice3() = default;
  explicit Lattice3(int n, double fill = 0.0)
      : n_(n), a_(static_cast<std::size_t>(n) * n * n, fill) {}

  int n() const { return n_; }
  std::size_t size() const { return a_.size(); }

  double& operator()(int i, int j, int k) { return a_[flat(i, j, k)]; }
  double operator()(int i, int j, int k) const { return a_[flat(i, j, k)]; }

  std::size_t flat(int i, int j, int k) const {
    const int n = n_;
    return (static_cast<std::size_t>(wrap(i, n)) * n + wrap(j, n)) * n +
           wrap(k, n);
  }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

// Omega-periodic grid function on nodes (member of V_h).
struct NodeScalar {
  Grid grid;
  Lattice3 a;

  NodeScalar() = default;
  explicit NodeScalar(const Grid& g, double fill = 0.0) : grid(g), a(g.N, fill) {}

  double& operator()(int i, int j, int k) { return a(i, j, k); }
  double operator()(int i, int j, int k) const { return a(i, j, k); }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
};

// Vector field sampled on nodes (gradients, averaged displacements).
struct NodeVector {
  Grid grid;
  Lattice3 x, y, z;

  NodeVector() = default;
  explicit NodeVector(const Grid& g, double fill = 0.0)
      : grid(g), x(g.N, fill), y(g.N, fill), z(g.N, fill) {}
};

// Staggered edge-midpoint vector field (member of Y_h).
struct Displacement {
  Grid grid;
  Lattice3 u, v, w;

  Displacement() = default;
  explicit Displacement(const Grid& g, double fill = 0.0)
      : grid(g), u(g.N, fill), v(g.N, fill), w(g.N, fill) {}
};

// Face-centered vector field; component a of entry (i,j,k) sits at the
// center of the face normal to axis a anchored at node (i,j,k).
struct FaceVector {
  Grid grid;
  Lattice3 x, y, z;

  FaceVector() = default;
  explicit FaceVector(const Grid& g, double fill = 0.0)
      : grid(g), x(g.N, fill), y(g.N, fill), z(g.N, fill) {}
};

// Half-edge permittivity: ex[i,j,k] = eps_{i+1/2,j,k} and cyclically.
// Built from node values by half_edge_permittivity() (arithmetic means), or
// by uniform_permittivity() for constant coefficients.
struct EdgePermittivity {
  Grid grid;
  Lattice3 ex, ey, ez;
  double eps_min = 0.0;
  double eps_max = 0.0;

  EdgePermittivity() = default;
  explicit EdgePermittivity(const Grid& g, double fill = 0.0)
      : grid(g), ex(g.N, fill), ey(g.N, fill), ez(g.N, fill),
        eps_min(fill), eps_max(fill) {}
};

// One ionic species: signed valence q != 0 and total mass N_s > 0.
struct Species {
  double q = 0.0;
  double total_mass = 0.0;
};

// Discrete average A_h(f) = N^-3 sum f, and its mean-zero companion.
double discrete_average(const NodeScalar& f);
NodeScalar subtract_mean(const NodeScalar& f);

// <f,g>_h = h^3 sum f g over one period, plus the induced norms.
double inner_scalar(const NodeScalar& f, const NodeScalar& g);
double norm_scalar(const NodeScalar& f);
double max_norm_scalar(const NodeScalar& f);

// <D,E>_{1/eps,h} = h^3 sum over edges of (component product)/eps_edge.
// With eps identically 1 this is the unweighted inner product on Y_h.
double inner_displacement_weighted(const Displacement& D, const Displacement& E,
                                   const EdgePermittivity& eps);
double norm_displacement_weighted(const Displacement& D,
                                  const EdgePermittivity& eps);
double inner_displacement(const Displacement& D, const Displacement& E);
double norm_displacement(const Displacement& D);
double max_norm_displacement(const Displacement& D);

// Component-wise average (A_h(u), A_h(v), A_h(w)).
std::array<double, 3> mean_components(const Displacement& D);

// Restriction of a source density to the discrete compatibility class.
// In poisson mode the continuous field is assumed to have zero mean over the
// box, so the output is f - A_h(f).  In pb mode charge neutrality fixes the
// continuous mean to -(sum_s q_s N_s)/L^3, and the output satisfies the
// discrete neutrality condition sum_s q_s N_s + h^3 sum rho = 0.
enum class SourceMode { poisson, pb };
NodeScalar project_source(const NodeScalar& rho_samples, SourceMode mode,
                          const std::vector<Species>& species = {});

using FieldSampler = std::function<double(double, double, double)>;

// Point sampling of analytic fields at their staggered locations.
NodeScalar sample_node_scalar(const FieldSampler& f, const Grid& grid);
Displacement sample_displacement(const FieldSampler& Dx, const FieldSampler& Dy,
                                 const FieldSampler& Dz, const Grid& grid);

// Post-processing average m_h[D]: at each node, the mean of the two edge
// values flanking it per component, e.g. (u_{i+1/2,j,k} + u_{i-1/2,j,k})/2.
NodeVector midpoint_average(const Displacement& D);

}  // namespace fdes
