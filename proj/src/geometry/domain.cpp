#include <algorithm>
#include <cmath>

#include "sdri/error.hpp"
#include "sdri/geometry.hpp"

namespace sdri {

namespace {

void check_polygon(const PolygonWithHoles& p, double diam, const char* what) {
    auto check_ring = [&](const Ring& r) {
        if (r.size() < 3) throw GeometryError(ErrorKind::DegenerateGeometry, std::string(what) + " ring has fewer than 3 vertices");
        if (std::abs(ring_signed_area(r)) <= 1e-12 * diam * diam)
            throw GeometryError(ErrorKind::DegenerateGeometry, std::string(what) + " ring has near-zero area");
        if (!ring_is_simple(r, 1e-12 * diam))
            throw GeometryError(ErrorKind::DegenerateGeometry, std::string(what) + " ring is not simple");
    };
    check_ring(p.outer);
    for (const auto& h : p.holes) check_ring(h);
}

/// Sample points strictly inside the material of p: edge midpoints pushed a
/// little to the material side.
std::vector<Vec2> interior_samples(const PolygonWithHoles& p, double diam) {
    std::vector<Vec2> out;
    for (const auto& e : p.edges()) {
        const double delta = std::min(1e-6 * diam, 1e-3 * e.length());
        out.push_back(e.midpoint() - e.right_normal() * delta);
    }
    return out;
}

bool interiors_overlap(const PolygonWithHoles& p, const PolygonWithHoles& q, double tol, double diam) {
    const auto pe = p.edges();
    const auto qe = q.edges();
    for (const auto& a : pe)
        for (const auto& b : qe)
            if (segments_cross(a, b, tol)) return true;
    auto any_inside = [&](const PolygonWithHoles& from, const PolygonWithHoles& into) {
        for (const auto& v : from.outer)
            if (locate(v, into, tol) == Location::Inside) return true;
        for (const auto& s : interior_samples(from, diam))
            if (locate(s, into, tol) == Location::Inside) return true;
        return false;
    };
    return any_inside(p, q) || any_inside(q, p);
}

}  // namespace

BoundingBox Domain::bbox() const {
    BoundingBox b = BoundingBox::of(container.outer);
    for (const auto& s : substrates)
        for (const auto& v : s.outer) b.expand(v);
    return b;
}

double Domain::contact_length() const {
    double l = 0.0;
    for (const auto& c : contact) l += c.seg.length();
    return l;
}

std::vector<Polyline> Domain::contact_polylines() const {
    std::vector<Polyline> out;
    std::vector<bool> used(contact.size(), false);
    for (std::size_t start = 0; start < contact.size(); ++start) {
        if (used[start]) continue;
        used[start] = true;
        Polyline line{contact[start].seg.a, contact[start].seg.b};
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t k = 0; k < contact.size(); ++k) {
                if (used[k]) continue;
                const Segment& s = contact[k].seg;
                if (distance(s.a, line.back()) <= snap_tol) {
                    line.push_back(s.b);
                } else if (distance(s.b, line.front()) <= snap_tol) {
                    line.insert(line.begin(), s.a);
                } else {
                    continue;
                }
                used[k] = true;
                grew = true;
            }
        }
        out.push_back(std::move(line));
    }
    return out;
}

std::optional<std::size_t> Domain::contact_index_at(Vec2 p) const {
    for (std::size_t k = 0; k < contact.size(); ++k)
        if (point_segment_distance(p, contact[k].seg) <= snap_tol) return k;
    return std::nullopt;
}

Domain build_domain(PolygonWithHoles container, std::vector<PolygonWithHoles> substrates,
                    std::optional<double> snap_tol) {
    Domain dom;
    dom.container = std::move(container);
    dom.substrates = std::move(substrates);
    dom.container.normalize();
    for (auto& s : dom.substrates) s.normalize();

    if (dom.container.outer.size() < 3)
        throw GeometryError(ErrorKind::DegenerateGeometry, "container has fewer than 3 vertices");
    const double diam = std::max(dom.bbox().diameter(), 1e-300);
    dom.snap_tol = snap_tol.value_or(1e-9 * diam);

    check_polygon(dom.container, diam, "container");
    for (const auto& s : dom.substrates) check_polygon(s, diam, "substrate");

    for (std::size_t i = 0; i < dom.substrates.size(); ++i)
        if (interiors_overlap(dom.container, dom.substrates[i], dom.snap_tol, diam))
            throw GeometryError(ErrorKind::OverlappingInteriors,
                                "substrate " + std::to_string(i) + " overlaps the container interior");

    const auto container_edges = dom.container.edges();
    for (const auto& s : dom.substrates) {
        for (const auto& e : s.edges()) {
            for (const auto& f : container_edges) {
                double t0 = 0.0, t1 = 0.0;
                if (collinear_overlap(e, f, dom.snap_tol, &t0, &t1))
                    dom.contact.push_back({{e.at(t0), e.at(t1)}, e.right_normal()});
            }
        }
    }
    return dom;
}

}  // namespace sdri
