#pragma once

// Discrete differential operators on the periodic staggered grid: forward
// and backward gradients, divergence, curl, the variable-coefficient
// Laplacian A_h^eps, the potential-to-displacement map D_h^eps, and the
// half-edge permittivity construction.

#include "fdes/grid.hpp"

namespace fdes {

// Arithmetic means of adjacent node values on each edge, e.g.
// eps_{i+1/2,j,k} = (eps_{i,j,k} + eps_{i+1,j,k})/2.  All node values must
// be positive.
EdgePermittivity half_edge_permittivity(const NodeScalar& eps_nodes);

// Constant permittivity without the sampling round trip.
EdgePermittivity uniform_permittivity(const Grid& grid, double value);

enum class GradientDirection { forward, backward };

// Forward difference (phi_{i+1,j,k} - phi_{i,j,k})/h per axis; the backward
// variant shifts the stencil down by one index per axis.
NodeVector gradient(const NodeScalar& phi, GradientDirection direction);

// (div D)_{i,j,k} = (u_{i+1/2} - u_{i-1/2} + v_{j+1/2} - v_{j-1/2}
//                    + w_{k+1/2} - w_{k-1/2})/h.
NodeScalar divergence(const Displacement& D);

// Circulation of D around each grid face divided by h, following the
// right-hand rule about the face normal.  Component a of entry (i,j,k) is
// the curl on the face normal to axis a anchored at node (i,j,k).
FaceVector curl(const Displacement& D);

// A_h^eps[phi] = -div(D_h^eps[phi]), the 7-point variable-coefficient
// Laplacian.  Implemented literally as flux differences so the identity
// with displacement_from_potential holds to the last bit.
NodeScalar variable_laplacian(const NodeScalar& phi, const EdgePermittivity& eps);

// D_h^eps[phi]: u_{i+1/2,j,k} = -eps_{i+1/2,j,k} (phi_{i+1,j,k}-phi_{i,j,k})/h
// and cyclically.
Displacement displacement_from_potential(const NodeScalar& phi,
                                         const EdgePermittivity& eps);

// Component-wise division by the matching half-edge permittivity (D/eps).
Displacement scale_by_permittivity(const Displacement& D,
                                   const EdgePermittivity& eps);

}  // namespace fdes
