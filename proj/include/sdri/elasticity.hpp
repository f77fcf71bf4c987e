#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "sdri/mesh.hpp"

namespace sdri {

/// Symmetric material matrix in Voigt form (e11, e22, 2 e12), stored as
/// (D11, D12, D13, D22, D23, D33), so that C M:M = eps^T D eps.
using Voigt = std::array<double, 6>;

struct Lame {
    double lambda = 0.0;
    double mu = 0.0;
};

Voigt isotropic_voigt(Lame l);
/// From full tensor entries C1111, C1122, C1112, C2222, C2212, C1212.
Voigt voigt_from_tensor(double c1111, double c1122, double c1112, double c2222, double c2212, double c1212);
/// Coercivity constant of one material: C M:M >= 2 c3 M:M.
double coercivity(const Voigt& d);

struct ElasticTensor {
    Voigt film{};
    Voigt substrate{};
    std::map<int, Voigt> component_override;
    /// Antiplane-type restriction u = (u1, 0).
    bool scalar_mode = false;

    static ElasticTensor zero() { return {}; }
    static ElasticTensor isotropic(Lame film, Lame substrate);
    /// D = I with u = (u1, 0).
    static ElasticTensor scalar_identity();

    bool is_zero() const;
    const Voigt& at(Region r, int component) const;
    /// Smallest coercivity over the materials in use; 0 for the zero tensor.
    double c3() const;
    /// Throws HypothesisError when a nonzero tensor is not coercive or not symmetric positive.
    void require_coercive() const;
};

/// Mismatch strain in the film as Voigt (e11, e22, 2 e12); zero on the substrate.
struct MismatchSpec {
    std::function<std::array<double, 3>(Vec2)> field;
    std::optional<std::array<double, 4>> affine_gradient;  // row-major grad u0 when affine

    static MismatchSpec zero() { return {}; }
    /// u0(x) = G x, E0 = sym G.
    static MismatchSpec affine(double g11, double g12, double g21, double g22);
    /// u0 = (e0 x1, 0).
    static MismatchSpec lattice(double e0) { return affine(e0, 0.0, 0.0, 0.0); }
    static MismatchSpec from_field(std::function<std::array<double, 3>(Vec2)> f);

    bool is_zero() const { return !field; }
    std::array<double, 3> at(Vec2 x) const;
};

enum class Gauge { MeanRigid, ClampSubstrateBottom };

struct ElasticState {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> u;  // (ux, uy) per node
    double energy = 0.0;
    double energy_film = 0.0;
    double energy_substrate = 0.0;
    double residual = 0.0;
    int pieces = 0;         // connected pieces of the node graph
    int pinned_dofs = 0;
    int clamped_nodes = 0;
    bool iterative = false;  // fallback solver used
};

/// Minimises the quadratic elastic energy over P1 displacements that may jump
/// across the mesh's doubled edges.
ElasticState solve_elastic(std::shared_ptr<const Mesh> mesh, const ElasticTensor& c, const MismatchSpec& e0,
                           Gauge gauge = Gauge::MeanRigid);

/// Energy of an arbitrary displacement (same quadrature as the solve).
double elastic_energy(const Mesh& mesh, const ElasticTensor& c, const MismatchSpec& e0,
                      const std::vector<double>& u, double* film = nullptr, double* substrate = nullptr);

/// Elastic part of an energy evaluation: skips meshing when C = 0, and meshes
/// the substrate only when the crystal is bonded to it somewhere.
struct ElasticSetup {
    ElasticTensor tensor;
    MismatchSpec mismatch;
    Gauge gauge = Gauge::MeanRigid;
    double h = 0.1;
};
ElasticState elastic_for(const FreeCrystal& a, const Domain& dom, const ElasticSetup& setup);

}  // namespace sdri
