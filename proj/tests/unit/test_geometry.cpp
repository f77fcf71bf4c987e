#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "sdri/error.hpp"
#include "sdri/geometry.hpp"
#include "sdri/random.hpp"

using namespace sdri;

namespace {

PolygonWithHoles poly(Ring r, std::vector<Ring> holes = {}) {
    PolygonWithHoles p{std::move(r), std::move(holes)};
    p.normalize();
    return p;
}

FreeCrystal crystal(std::vector<PolygonWithHoles> comps, std::vector<Slit> slits = {}) {
    FreeCrystal a;
    a.components = std::move(comps);
    a.slits = std::move(slits);
    a.normalize();
    return a;
}

Domain box(double r) { return build_domain(poly(make_rectangle({-r, -r}, {r, r})), {}); }

// Film/substrate pair sharing the x axis.
Domain film_domain() {
    return build_domain(poly(make_rectangle({0, 0}, {1, 1})), {poly(make_rectangle({0, -1}, {1, 0}))});
}

double class_length(const std::vector<ClassifiedArc>& arcs, ArcClass c) {
    double s = 0.0;
    for (const auto& a : arcs)
        if (a.cls == c) s += a.segment.length();
    return s;
}

Vec2 rigid(Vec2 p, double th, Vec2 t) {
    return {std::cos(th) * p.x - std::sin(th) * p.y + t.x, std::sin(th) * p.x + std::cos(th) * p.y + t.y};
}

PolygonWithHoles moved(const PolygonWithHoles& p, double th, Vec2 t) {
    PolygonWithHoles q = p;
    for (auto& v : q.outer) v = rigid(v, th, t);
    for (auto& h : q.holes)
        for (auto& v : h) v = rigid(v, th, t);
    return q;
}

}  // namespace

TEST_CASE("contact surface is the shared boundary") {
    const Domain none = build_domain(poly(make_rectangle({0, 0}, {1, 1})), {});
    CHECK(none.contact.empty());
    CHECK(none.contact_length() == 0.0);

    const Domain d = film_domain();
    REQUIRE(d.contact.size() == 1);
    CHECK(d.contact_length() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.contact[0].seg.a.y == 0.0);
    CHECK(d.contact[0].seg.b.y == 0.0);
    // Substrate normal points up into the container.
    CHECK(d.contact[0].normal.y == doctest::Approx(1.0));

    // Thin-film container truncated at height H.
    const Domain tf = build_domain(poly(make_rectangle({-1, 0}, {3, 2})), {poly(make_rectangle({-1, -2}, {3, 0}))});
    CHECK(tf.contact_length() == doctest::Approx(4.0));
    for (const auto& c : tf.contact) CHECK(c.seg.a.y == 0.0);
}

TEST_CASE("build_domain rejects overlap and degenerate polygons") {
    try {
        build_domain(poly(make_rectangle({0, 0}, {1, 1})), {poly(make_rectangle({0, -0.5}, {1, 0.5}))});
        FAIL("expected OverlappingInteriors");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::OverlappingInteriors);
    }
    try {
        build_domain(poly({{0, 0}, {1, 0}}), {});
        FAIL("expected DegenerateGeometry");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::DegenerateGeometry);
    }
}

TEST_CASE("classification of the basic cases") {
    const Domain dom = box(3.0);
    SUBCASE("square inside the container") {
        const auto arcs = classify_boundary(crystal({poly(make_rectangle({0, 0}, {1.5, 1.5}))}), dom);
        CHECK(arcs.size() == 4);
        for (const auto& a : arcs) CHECK(a.cls == ArcClass::FreeBoundary);
        CHECK(class_length(arcs, ArcClass::FreeBoundary) == doctest::Approx(6.0));
    }
    SUBCASE("interior slit is a doubled crack") {
        const auto a = crystal({poly(make_rectangle({0, 0}, {1, 1}))}, {{{{0.25, 0.5}, {0.75, 0.5}}, SlitTag::Crack}});
        const auto arcs = classify_boundary(a, dom);
        int cracks = 0;
        for (const auto& arc : arcs)
            if (arc.cls == ArcClass::Crack) {
                ++cracks;
                CHECK(arc.multiplicity == 2);
            }
        CHECK(cracks == 1);
        CHECK(class_length(arcs, ArcClass::Crack) == doctest::Approx(0.5));
    }
    SUBCASE("exterior slit is a filament") {
        const auto a = crystal({poly(make_rectangle({0, 0}, {1, 1}))}, {{{{-2, -2}, {-1, -2}}, SlitTag::Filament}});
        const auto arcs = classify_boundary(a, dom);
        CHECK(class_length(arcs, ArcClass::Filament) == doctest::Approx(1.0));
        CHECK(component_count(a, dom.snap_tol) == 2);
    }
}

TEST_CASE("edges on Sigma: contact, delamination, wetting") {
    const Domain dom = film_domain();
    FreeCrystal a = crystal({poly(make_rectangle({0.1, 0}, {0.9, 0.5}))});
    auto arcs = classify_boundary(a, dom);
    CHECK(class_length(arcs, ArcClass::Contact) == doctest::Approx(0.8));
    CHECK(class_length(arcs, ArcClass::Delamination) == 0.0);

    a.delamination.push_back({{0.1, 0}, {0.9, 0}});
    arcs = classify_boundary(a, dom);
    CHECK(class_length(arcs, ArcClass::Contact) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(class_length(arcs, ArcClass::Delamination) == doctest::Approx(0.8));

    FreeCrystal w = crystal({}, {{{{0.2, 0}, {0.6, 0}}, SlitTag::Filament}});
    arcs = classify_boundary(w, dom);
    CHECK(class_length(arcs, ArcClass::WettingLayer) == doctest::Approx(0.4));
    for (const auto& arc : arcs) CHECK(arc.multiplicity == 1);
}

TEST_CASE("area, lengths and component counts") {
    const Domain dom = box(3.0);
    const auto sq = crystal({poly(make_rectangle({0, 0}, {1, 1}))});
    CHECK(area(sq) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(component_count(sq, dom.snap_tol) == 1);

    const auto holed = crystal({poly(make_rectangle({0, 0}, {1, 1}), {make_rectangle({0.25, 0.25}, {0.75, 0.75})})});
    CHECK(area(holed) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(component_count(holed, dom.snap_tol) == 2);

    const auto slit_only = crystal({}, {{{{0, 0}, {0.3, 0.4}, {0.3, 1.4}}, SlitTag::Filament}});
    CHECK(area(slit_only) == 0.0);
    CHECK(boundary_length(slit_only, dom, ArcClass::Filament) == doctest::Approx(1.5));

    const auto plus_slit = crystal({poly(make_rectangle({0, 0}, {1, 1}))}, {{{{2, 2}, {2.5, 2}}, SlitTag::Filament}});
    CHECK(component_count(plus_slit, dom.snap_tol) == 2);
    // A slit touching the square merges with its loop.
    const auto touching = crystal({poly(make_rectangle({0, 0}, {1, 1}))}, {{{{1, 0.5}, {1.5, 0.5}}, SlitTag::Filament}});
    CHECK(component_count(touching, dom.snap_tol) == 1);
}

TEST_CASE("filling a hole drops one boundary component and adds its area") {
    const Domain dom = box(3.0);
    const Ring hole = make_regular_polygon({0.5, 0.5}, 0.2, 12);
    const auto holed = crystal({poly(make_rectangle({0, 0}, {1, 1}), {hole})});
    const auto filled = crystal({poly(make_rectangle({0, 0}, {1, 1}))});
    CHECK(component_count(holed, dom.snap_tol) - component_count(filled, dom.snap_tol) == 1);
    CHECK(area(filled) - area(holed) == doctest::Approx(std::abs(ring_signed_area(hole))).epsilon(1e-12));
}

TEST_CASE("classification is a partition of the weighted boundary") {
    const Domain dom = film_domain();
    FreeCrystal a = crystal({poly(make_rectangle({0.1, 0}, {0.9, 0.6}))},
                            {{{{0.3, 0.3}, {0.6, 0.3}}, SlitTag::Crack},
                             {{{0.92, 0.2}, {0.98, 0.5}}, SlitTag::Filament},
                             {{{0.93, 0}, {0.99, 0}}, SlitTag::Filament}});
    a.delamination.push_back({{0.5, 0}, {0.9, 0}});
    const auto arcs = classify_boundary(a, dom);
    const ClassTotals t = class_totals(arcs);
    // Perimeter 2.8, crack 0.3 and filament sqrt(0.0936) doubled, wetting layer 0.06 single.
    const double weighted = 2.8 + 2.0 * 0.3 + 2.0 * std::sqrt(0.0036 + 0.09) + 0.06;
    CHECK(t.total_weighted() == doctest::Approx(weighted).epsilon(1e-9));
    double sum = 0.0;
    for (double w : t.weighted) sum += w;
    CHECK(sum == doctest::Approx(t.total_weighted()).epsilon(1e-12));
}

TEST_CASE("rigid motions leave measures and class totals unchanged") {
    const Domain d0 = film_domain();
    FreeCrystal a0 = crystal({poly(make_rectangle({0.1, 0}, {0.9, 0.6}), {make_rectangle({0.2, 0.1}, {0.3, 0.2})})},
                             {{{{0.4, 0.3}, {0.7, 0.4}}, SlitTag::Crack}});
    a0.delamination.push_back({{0.1, 0}, {0.4, 0}});
    const auto t0 = class_totals(classify_boundary(a0, d0));

    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const Vec2 t{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const Domain d = build_domain(moved(d0.container, th, t), {moved(d0.substrates[0], th, t)});
        FreeCrystal a;
        a.components.push_back(moved(a0.components[0], th, t));
        Slit s = a0.slits[0];
        for (auto& v : s.vertices) v = rigid(v, th, t);
        a.slits.push_back(s);
        a.delamination.push_back({rigid(a0.delamination[0].a, th, t), rigid(a0.delamination[0].b, th, t)});
        a.normalize();
        CHECK(area(a) == doctest::Approx(area(a0)).epsilon(1e-9));
        const auto t1 = class_totals(classify_boundary(a, d));
        for (std::size_t c = 0; c < kArcClassCount; ++c) CHECK(t1.weighted[c] == doctest::Approx(t0.weighted[c]).epsilon(1e-9));
    }
}

TEST_CASE("sdist conventions and the Lipschitz bound") {
    const auto disk = crystal({poly(make_regular_polygon({0, 0}, 1.0, 256))});
    CHECK(sdist({0, 0}, disk) == doctest::Approx(-1.0).epsilon(1e-3));
    const auto sq = crystal({poly(make_rectangle({0, 0}, {1, 1}))});
    CHECK(sdist({3, 0.5}, sq) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sdist({1, 0.5}, sq) == doctest::Approx(0.0));
    CHECK(sdist({0, 0}, FreeCrystal{}) == std::numeric_limits<double>::infinity());

    const auto holed = crystal({poly(make_rectangle({0, 0}, {2, 2}), {make_rectangle({0.5, 0.5}, {1.5, 1.5})})},
                               {{{{0.1, 0.1}, {0.4, 0.2}}, SlitTag::Crack}});
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 x{rng.uniform(-1, 3), rng.uniform(-1, 3)}, y{rng.uniform(-1, 3), rng.uniform(-1, 3)};
        CHECK(std::abs(sdist(x, holed) - sdist(y, holed)) <= distance(x, y) + 1e-12);
    }
}

TEST_CASE("hausdorff gap shrinks along a converging family") {
    const Domain dom = box(2.0);
    const auto limit = crystal({poly(make_rectangle({0, 0}, {1, 1}))});
    auto shrunk = [](int k) {
        const double e = 1.0 / k;
        return crystal({poly(make_rectangle({e / 2, e / 2}, {1 - e / 2, 1 - e / 2}))});
    };
    const double g10 = hausdorff_gap(shrunk(10), limit, dom, 128);
    const double g100 = hausdorff_gap(shrunk(100), limit, dom, 128);
    CHECK(g100 < g10);
    // Worst case is diagonal from a corner.
    CHECK(g10 == doctest::Approx(0.05 * std::numbers::sqrt2).epsilon(1e-9));
    CHECK(hausdorff_gap(limit, limit, dom, 64) == 0.0);
}

TEST_CASE("validation catches invariant violations") {
    const Domain dom = box(1.0);
    CHECK_FALSE(check_crystal(crystal({poly(make_rectangle({0, 0}, {0.5, 0.5}))}), dom, 1));
    // Outside the container.
    CHECK(check_crystal(crystal({poly(make_rectangle({0.5, 0.5}, {1.5, 1.5}))}), dom, 1));
    // Too many boundary components.
    const auto two = crystal({poly(make_rectangle({-0.9, -0.9}, {-0.5, -0.5})), poly(make_rectangle({0, 0}, {0.5, 0.5}))});
    CHECK(check_crystal(two, dom, 1));
    CHECK_FALSE(check_crystal(two, dom, 2));
    // Crack tag outside the solid.
    const auto bad = crystal({poly(make_rectangle({0, 0}, {0.5, 0.5}))}, {{{{-0.8, 0}, {-0.6, 0}}, SlitTag::Crack}});
    CHECK(check_crystal(bad, dom, 2));
    try {
        validate_crystal(two, dom, 1);
        FAIL("expected InvariantViolation");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::InvariantViolation);
    }
}
