#pragma once

#include "sdri/anisotropy.hpp"
#include "sdri/geometry.hpp"

namespace sdri {

/// The labelled energy terms of one configuration. cracks and filaments
/// already include the doubled anisotropy.
struct EnergyBreakdown {
    double free_boundary = 0.0;
    double cracks = 0.0;
    double filaments = 0.0;
    double wetting = 0.0;
    double contact = 0.0;
    double delamination = 0.0;
    double elastic = 0.0;
    double penalty = 0.0;

    int wall_arcs = 0;          // free-boundary arcs lying on the container wall off Sigma
    int corner_incidences = 0;  // wetting arcs touching a corner of Sigma

    double surface() const { return free_boundary + cracks + filaments + wetting + contact + delamination; }
    /// F = S + W.
    double energy() const { return surface() + elastic; }
    /// F + lambda ||A| - v|.
    double total() const { return energy() + penalty; }
};

/// Integrand of each arc class at a point; exposed for the doubling and (H2) tests.
double arc_integrand(const ClassifiedArc& arc, Vec2 x, const AnisotropyField& phi, const AdhesionField& beta);

/// Surface parts of the energy; elastic and penalty are left at zero.
EnergyBreakdown surface_energy(const FreeCrystal& a, const Domain& dom, const AnisotropyField& phi,
                               const AdhesionField& beta);
EnergyBreakdown surface_energy(const std::vector<ClassifiedArc>& arcs, const AnisotropyField& phi,
                               const AdhesionField& beta);

/// Anisotropic perimeter of a closed ring (outward normals, any orientation).
double ring_energy(const Ring& r, const AnisotropyField& phi);

/// Wulff set {x : x . nu <= phi(nu) for all nu} as the intersection of n
/// half-planes, rescaled to area v. phi must be spatially constant.
Ring wulff_shape(const AnisotropyField& phi, double v, int n = 720);

}  // namespace sdri
