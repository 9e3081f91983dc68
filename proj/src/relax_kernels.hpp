#pragma once

// Shared face-circulation stencil.  Each grid face is bounded by four edges;
// walking them counterclockwise about the face normal (right-hand rule)
// gives the circulation used by both the curl operator and the local face
// relaxation.  Keeping the table in one place means the solver relaxes
// exactly the quantity the curl diagnostic reports.
//
// Entry layout: comp selects the displacement component (0 = u, 1 = v,
// 2 = w) and nbr indexes a caller-supplied offset table {self, +x, +y, +z}.
// For the face normal to axis a anchored at node (i,j,k):
//
//   x-face:  +v(i,j,k)  +w(i,j+1,k)  -v(i,j,k+1)  -w(i,j,k)
//   y-face:  +w(i,j,k)  +u(i,j,k+1)  -w(i+1,j,k)  -u(i,j,k)
//   z-face:  +u(i,j,k)  +v(i+1,j,k)  -u(i,j+1,k)  -v(i,j,k)

#include <array>
#include <cstddef>

namespace fdes::detail {

struct FaceEdge {
  int comp;
  int nbr;
  double sign;
};

struct FaceStencil {
  FaceEdge e[4];
};

inline constexpr FaceStencil face_circulation[3] = {
    {{{1, 0, 1.0}, {2, 2, 1.0}, {1, 3, -1.0}, {2, 0, -1.0}}},
    {{{2, 0, 1.0}, {0, 3, 1.0}, {2, 1, -1.0}, {0, 0, -1.0}}},
    {{{0, 0, 1.0}, {1, 1, 1.0}, {0, 2, -1.0}, {1, 0, -1.0}}},
};

// Signed sum of the four edge values (no 1/h factor).
template <int A>
inline double face_circulation_sum(const std::array<const double*, 3>& d,
                                   const std::size_t nbr[4]) {
  const FaceStencil& st = face_circulation[A];
  double s = 0.0;
  for (int t = 0; t < 4; ++t) {
    s += st.e[t].sign * d[st.e[t].comp][nbr[st.e[t].nbr]];
  }
  return s;
}

struct FaceRelax {
  double eta;   // applied rotation increment
  double esum;  // sum of the four reciprocal edge permittivities
};

// Core face-relaxation arithmetic on gathered edge values.  dval/rval hold
// the four D values and reciprocal permittivities in table order, signs not
// applied.  Every caller must go through this function so that the public
// single-face update and the sweep kernels produce bitwise-identical eta.
inline FaceRelax relax_gathered(const FaceStencil& st, const double dval[4],
                                const double rval[4]) {
  double esum = 0.0;
  for (int t = 0; t < 4; ++t) {
    esum += rval[t];
  }
  double circ = 0.0;
  for (int t = 0; t < 4; ++t) {
    circ += st.e[t].sign * (dval[t] * rval[t]);
  }
  return {-circ / esum, esum};
}

// One Gauss-Seidel relaxation of the face normal to axis A: makes the
// circulation of D/eps around the face vanish by adding +-eta to its four
// edges.  r holds reciprocal edge permittivities in the same layout as d.
template <int A>
inline FaceRelax relax_face(const std::array<double*, 3>& d,
                            const std::array<const double*, 3>& r,
                            const std::size_t nbr[4]) {
  const FaceStencil& st = face_circulation[A];
  double dval[4];
  double rval[4];
  for (int t = 0; t < 4; ++t) {
    const FaceEdge& e = st.e[t];
    dval[t] = d[e.comp][nbr[e.nbr]];
    rval[t] = r[e.comp][nbr[e.nbr]];
  }
  const FaceRelax fr = relax_gathered(st, dval, rval);
  for (int t = 0; t < 4; ++t) {
    const FaceEdge& e = st.e[t];
    d[e.comp][nbr[e.nbr]] += e.sign * fr.eta;
  }
  return fr;
}

// Exact energy change of one face relaxation, nonpositive by construction.
inline double face_energy_delta(double esum, double h3, double eta) {
  return -0.5 * esum * h3 * (eta * eta);
}

}  // namespace fdes::detail
