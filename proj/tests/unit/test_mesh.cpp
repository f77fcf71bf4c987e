#include <cmath>
#include <memory>

#include "doctest.h"
#include "sdri/elasticity.hpp"
#include "sdri/error.hpp"
#include "sdri/mesh.hpp"

using namespace sdri;

namespace {

Domain open_box(double r) { return build_domain({make_rectangle({-r, -r}, {r, r}), {}}, {}); }

FreeCrystal square(Vec2 lo, Vec2 hi) {
    FreeCrystal a;
    a.components.push_back({make_rectangle(lo, hi), {}});
    a.normalize();
    return a;
}

bool has_edge(const Mesh& m, int p, int q) {
    for (const auto& t : m.tris)
        for (int k = 0; k < 3; ++k)
            if ((t[k] == p && t[(k + 1) % 3] == q) || (t[k] == q && t[(k + 1) % 3] == p)) return true;
    return false;
}

}  // namespace

TEST_CASE("unit square at h = 0.1 meshes without doubling") {
    const Domain dom = open_box(2.0);
    const Mesh m = triangulate(square({0, 0}, {1, 1}), dom, 0.1);
    MESSAGE("triangles: " << m.tris.size() << ", min angle " << m.min_angle_deg());
    // Golden count from this mesher.
    CHECK(m.tris.size() == 218);
    CHECK(m.doubled.empty());
    CHECK(m.region_area(Region::Film) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.min_angle_deg() >= 20.0);
    for (const auto& [a, b] : m.constraint_edges) CHECK(has_edge(m, a, b));
}

TEST_CASE("crack slit doubles its interior vertices only") {
    const Domain dom = open_box(2.0);
    FreeCrystal a = square({0, 0}, {1, 1});
    a.slits.push_back({{{0.25, 0.5}, {0.75, 0.5}}, SlitTag::Crack});
    const Mesh m = triangulate(a, dom, 0.1);
    std::size_t interior = 0;
    for (std::size_t p = 0; p < m.points.size(); ++p) {
        const Vec2 x = m.points[p];
        if (std::abs(x.y - 0.5) < 1e-12 && x.x > 0.25 + 1e-9 && x.x < 0.75 - 1e-9) ++interior;
    }
    CHECK(interior > 0);
    CHECK(m.doubled.size() == interior);
    CHECK(m.num_nodes() == static_cast<int>(m.points.size() + interior));
    CHECK(m.min_angle_deg() >= 20.0);
}

TEST_CASE("bonded film shares every contact node") {
    const Domain dom = build_domain({make_rectangle({0, 0}, {4, 2}), {}}, {{make_rectangle({0, -1}, {4, 0}), {}}});
    const FreeCrystal a = square({0, 0}, {4, 1});
    const Mesh m = triangulate(a, dom, 0.25);
    CHECK(m.doubled.empty());
    CHECK(m.region_area(Region::Film) == doctest::Approx(4.0));
    CHECK(m.region_area(Region::Substrate) == doctest::Approx(4.0));

    FreeCrystal d = a;
    d.delamination.push_back({{1, 0}, {3, 0}});
    const Mesh md = triangulate(d, dom, 0.25);
    // Vertices strictly inside the delaminated piece: x = 1.25 .. 2.75.
    CHECK(md.doubled.size() == 7);
}

TEST_CASE("uniform refinement keeps area and cut structure") {
    const Domain dom = open_box(2.0);
    FreeCrystal a = square({0, 0}, {1, 1});
    a.slits.push_back({{{0.25, 0.5}, {0.75, 0.5}}, SlitTag::Crack});
    const Mesh m = triangulate(a, dom, 0.2);
    const Mesh r = refine_uniform(m);
    CHECK(r.tris.size() == 4 * m.tris.size());
    CHECK(r.region_area(Region::Film) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.doubled.size() == 2 * m.doubled.size() + 1);
}

TEST_CASE("crossing crack and edge is a mesh failure") {
    const Domain dom = open_box(2.0);
    FreeCrystal a = square({0, 0}, {1, 1});
    a.slits.push_back({{{0.5, 0.5}, {1.5, 0.5}}, SlitTag::Crack});
    CHECK_THROWS_AS(triangulate(a, dom, 0.1), MeshError);
}
