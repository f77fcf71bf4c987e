#include <cmath>
#include <memory>

#include "doctest.h"
#include "sdri/elasticity.hpp"
#include "sdri/error.hpp"

using namespace sdri;

namespace {

Domain open_box(double r) { return build_domain({make_rectangle({-r, -r}, {r, r}), {}}, {}); }

FreeCrystal rect(Vec2 lo, Vec2 hi) {
    FreeCrystal a;
    a.components.push_back({make_rectangle(lo, hi), {}});
    a.normalize();
    return a;
}

std::shared_ptr<const Mesh> mesh_of(const FreeCrystal& a, const Domain& d, double h) {
    return std::make_shared<const Mesh>(triangulate(a, d, h));
}

const ElasticTensor kSteelish = ElasticTensor::isotropic({1.0, 1.0}, {1.0, 1.0});

// Thin film [0,4]x[0,1] on substrate [-0.5,4.5]x[-1,0] inside (-0.5,4.5)x(0,2).
struct FilmScene {
    Domain dom = build_domain({make_rectangle({-0.5, 0}, {4.5, 2}), {}},
                              {{make_rectangle({-0.5, -1}, {4.5, 0}), {}}});
    FreeCrystal film = rect({0, 0}, {4, 1});
    ElasticTensor c = ElasticTensor::isotropic({1.0, 1.0}, {10.0, 10.0});
};

}  // namespace

TEST_CASE("coercivity constant of isotropic and Voigt forms") {
    CHECK(coercivity(isotropic_voigt({1.0, 1.0})) == doctest::Approx(1.0));
    CHECK(coercivity(isotropic_voigt({-0.5, 1.0})) == doctest::Approx(0.5));
    CHECK(ElasticTensor::scalar_identity().c3() == doctest::Approx(0.5));
    CHECK(ElasticTensor::zero().c3() == 0.0);
    ElasticTensor bad = ElasticTensor::isotropic({-2.0, 1.0}, {1.0, 1.0});
    CHECK_THROWS_AS(bad.require_coercive(), HypothesisError);
    // Full tensor entries map onto the same Voigt matrix as the Lame pair.
    const Voigt v = voigt_from_tensor(3.0, 1.0, 0.0, 3.0, 0.0, 1.0);
    CHECK(v == isotropic_voigt({1.0, 1.0}));
}

TEST_CASE("zero mismatch gives zero displacement and energy") {
    const auto m = mesh_of(rect({0, 0}, {1, 1}), open_box(2), 0.2);
    const ElasticState s = solve_elastic(m, kSteelish, MismatchSpec::zero());
    CHECK(s.energy <= 1e-12);
    for (double x : s.u) CHECK(x == 0.0);
}

TEST_CASE("compatible affine mismatch is attained exactly without substrate") {
    const auto m = mesh_of(rect({0, 0}, {1, 1}), open_box(2), 0.2);
    const MismatchSpec e0 = MismatchSpec::affine(0.02, 0.01, -0.03, 0.015);
    const ElasticState s = solve_elastic(m, kSteelish, e0);
    // Scale: energy of u = 0 under the same mismatch.
    const double ref = elastic_energy(*m, kSteelish, e0, std::vector<double>(s.u.size(), 0.0));
    CHECK(ref > 0.0);
    CHECK(s.energy <= 1e-10 * ref);
    CHECK(s.residual <= 1e-8);
    CHECK(s.pieces == 1);
    CHECK(s.pinned_dofs == 3);
}

TEST_CASE("adding a rigid motion leaves the energy unchanged") {
    const auto m = mesh_of(rect({0, 0}, {1, 1}), open_box(2), 0.2);
    const MismatchSpec e0 = MismatchSpec::from_field([](Vec2 x) { return std::array{0.1 * x.x, -0.05 * x.y, 0.02}; });
    const ElasticState s = solve_elastic(m, kSteelish, e0);
    auto u = s.u;
    for (int n = 0; n < m->num_nodes(); ++n) {
        const Vec2 x = m->node(n);
        u[2 * n] += 0.3 - 0.7 * x.y;
        u[2 * n + 1] += -0.2 + 0.7 * x.x;
    }
    CHECK(elastic_energy(*m, kSteelish, e0, u) == doctest::Approx(s.energy).epsilon(1e-10));
}

TEST_CASE("manufactured strain converges at second order") {
    // u* = (x1^2, x1 x2): e11 = 2 x1, e22 = x1, 2 e12 = x2.
    const MismatchSpec e0 = MismatchSpec::from_field([](Vec2 x) { return std::array{2.0 * x.x, x.x, x.y}; });
    Mesh m = triangulate(rect({0, 0}, {1, 1}), open_box(2), 0.25);
    double e[3];
    for (int k = 0; k < 3; ++k) {
        if (k) m = refine_uniform(m);
        e[k] = solve_elastic(std::make_shared<const Mesh>(m), kSteelish, e0).energy;
    }
    const double r1 = std::log2(e[0] / e[1]);
    const double r2 = std::log2(e[1] / e[2]);
    MESSAGE("energies " << e[0] << " " << e[1] << " " << e[2] << " rates " << r1 << " " << r2);
    CHECK(e[1] < e[0]);
    CHECK(e[2] < e[1]);
    CHECK(r1 >= 1.8);
    CHECK(r2 >= 1.8);
}

TEST_CASE("mismatched film: delamination relieves energy") {
    FilmScene sc;
    const auto bonded = mesh_of(sc.film, sc.dom, 0.25);
    FreeCrystal d = sc.film;
    d.delamination.push_back({{0, 0}, {4, 0}});
    const auto debonded = mesh_of(d, sc.dom, 0.25);
    const MismatchSpec e0 = MismatchSpec::lattice(0.01);
    const ElasticState sb = solve_elastic(bonded, sc.c, e0);
    const ElasticState sd = solve_elastic(debonded, sc.c, e0);
    // Upper bound for the bonded case: u = 0 leaves the full mismatch in the film.
    const double laminate = 4.0 * (1.0 + 2.0) * 0.01 * 0.01;
    MESSAGE("bonded " << sb.energy << " delaminated " << sd.energy << " bound " << laminate);
    CHECK(sb.energy > 0.0);
    CHECK(sb.energy <= laminate);
    CHECK(sd.energy < sb.energy);
    CHECK(sd.energy >= 0.0);
    CHECK(sb.energy_film + sb.energy_substrate == doctest::Approx(sb.energy));

    // Partial delamination sits in between.
    FreeCrystal p = sc.film;
    p.delamination.push_back({{1, 0}, {3, 0}});
    const ElasticState sp = solve_elastic(mesh_of(p, sc.dom, 0.25), sc.c, e0);
    CHECK(sp.energy <= sb.energy * (1 + 1e-9));
    CHECK(sp.energy >= sd.energy);
}

TEST_CASE("refinement never raises the minimised energy") {
    FilmScene sc;
    Mesh m = triangulate(sc.film, sc.dom, 0.5);
    const MismatchSpec e0 = MismatchSpec::lattice(0.01);
    double prev = solve_elastic(std::make_shared<const Mesh>(m), sc.c, e0).energy;
    for (int k = 0; k < 2; ++k) {
        m = refine_uniform(m);
        const double e = solve_elastic(std::make_shared<const Mesh>(m), sc.c, e0).energy;
        CHECK(e <= prev * (1 + 1e-9));
        prev = e;
    }
}

TEST_CASE("clamped substrate gauge") {
    FilmScene sc;
    const auto m = mesh_of(sc.film, sc.dom, 0.5);
    const ElasticState s = solve_elastic(m, sc.c, MismatchSpec::lattice(0.01), Gauge::ClampSubstrateBottom);
    CHECK(s.clamped_nodes > 0);
    CHECK(s.pinned_dofs == 0);
    CHECK(s.energy > 0.0);
}

TEST_CASE("scalar mode keeps the second component at zero") {
    const auto m = mesh_of(rect({0, 0}, {1, 1}), open_box(2), 0.25);
    const MismatchSpec e0 = MismatchSpec::from_field([](Vec2 x) { return std::array{x.y, 0.0, 0.3}; });
    const ElasticState s = solve_elastic(m, ElasticTensor::scalar_identity(), e0);
    for (int n = 0; n < m->num_nodes(); ++n) CHECK(s.u[2 * n + 1] == 0.0);
    CHECK(s.pinned_dofs == 1);
    CHECK(s.energy > 0.0);
}

TEST_CASE("elastic_for short-circuits trivial cases") {
    FilmScene sc;
    CHECK(elastic_for(sc.film, sc.dom, {ElasticTensor::zero(), MismatchSpec::lattice(0.01)}).mesh == nullptr);
    CHECK(elastic_for(sc.film, sc.dom, {sc.c, MismatchSpec::zero()}).energy == 0.0);
    const ElasticState s = elastic_for(sc.film, sc.dom, {sc.c, MismatchSpec::lattice(0.01), Gauge::MeanRigid, 0.5});
    CHECK(s.energy > 0.0);
    CHECK(s.mesh->region_area(Region::Substrate) > 0.0);
}
