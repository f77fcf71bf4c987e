#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdri/error.hpp"
#include "sdri/geometry.hpp"
#include "sdri/kernels.hpp"

namespace sdri {

namespace {

struct Element {
    std::vector<Segment> segs;
    BoundingBox box;
};

void ring_segments(const Ring& r, std::vector<Segment>& out) {
    for (std::size_t i = 0; i < r.size(); ++i) out.push_back({r[i], r[(i + 1) % r.size()]});
}

std::vector<Element> collect_elements(const FreeCrystal& a) {
    std::vector<Element> els;
    auto finish = [&](Element e) {
        if (!e.segs.empty()) {
            e.box.lo = e.box.hi = e.segs.front().a;
            for (const auto& s : e.segs) {
                e.box.expand(s.a);
                e.box.expand(s.b);
            }
        }
        els.push_back(std::move(e));
    };
    for (const auto& c : a.components) {
        Element outer;
        ring_segments(c.outer, outer.segs);
        finish(std::move(outer));
        for (const auto& h : c.holes) {
            Element hole;
            ring_segments(h, hole.segs);
            finish(std::move(hole));
        }
    }
    for (const auto& s : a.slits) {
        Element e;
        e.segs = s.segments();
        finish(std::move(e));
    }
    return els;
}

bool elements_touch(const Element& p, const Element& q, double tol) {
    if (p.box.hi.x + tol < q.box.lo.x || q.box.hi.x + tol < p.box.lo.x || p.box.hi.y + tol < q.box.lo.y ||
        q.box.hi.y + tol < p.box.lo.y)
        return false;
    for (const auto& s : p.segs)
        for (const auto& t : q.segs)
            if (segment_distance(s, t) <= tol) return true;
    return false;
}

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

}  // namespace

std::vector<BoundaryElement> boundary_elements(const FreeCrystal& a) {
    std::vector<BoundaryElement> out;
    for (std::size_t c = 0; c < a.components.size(); ++c) {
        out.push_back({BoundaryElement::Kind::Outer, static_cast<int>(c), -1});
        for (std::size_t h = 0; h < a.components[c].holes.size(); ++h)
            out.push_back({BoundaryElement::Kind::Hole, static_cast<int>(c), static_cast<int>(h)});
    }
    for (std::size_t s = 0; s < a.slits.size(); ++s) out.push_back({BoundaryElement::Kind::Slit, -1, static_cast<int>(s)});
    return out;
}

std::vector<int> boundary_groups(const FreeCrystal& a, double snap_tol) {
    const auto els = collect_elements(a);
    const int n = static_cast<int>(els.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (find_root(parent, i) != find_root(parent, j) && elements_touch(els[i], els[j], snap_tol))
                parent[find_root(parent, j)] = find_root(parent, i);
    std::vector<int> label(n, -1), group(n);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const int r = find_root(parent, i);
        if (label[r] < 0) label[r] = next++;
        group[i] = label[r];
    }
    return group;
}

int component_count(const FreeCrystal& a, double snap_tol) {
    const auto g = boundary_groups(a, snap_tol);
    return g.empty() ? 0 : *std::max_element(g.begin(), g.end()) + 1;
}

double sdist(Vec2 x, const FreeCrystal& a) {
    kernels::SegmentSoA soa;
    for (const auto& s : a.boundary_segments()) soa.push(s);
    if (soa.empty()) return std::numeric_limits<double>::infinity();
    const double d = std::sqrt(kernels::min_distance_sq(soa, x));
    return locate(x, a, 0.0) == Location::Inside ? -d : d;
}

double hausdorff_gap(const FreeCrystal& a1, const FreeCrystal& a2, const Domain& dom, int grid) {
    kernels::SegmentSoA s1, s2;
    for (const auto& s : a1.boundary_segments()) s1.push(s);
    for (const auto& s : a2.boundary_segments()) s2.push(s);
    if (s1.empty() && s2.empty()) return 0.0;
    if (s1.empty() || s2.empty()) return std::numeric_limits<double>::infinity();

    const BoundingBox box = BoundingBox::of(dom.container.outer);
    const int n = std::max(grid, 2);
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            pts.push_back({box.lo.x + (box.hi.x - box.lo.x) * i / (n - 1),
                           box.lo.y + (box.hi.y - box.lo.y) * j / (n - 1)});
    std::vector<double> d1(pts.size()), d2(pts.size());
    kernels::min_distance_sq_batch(s1, pts, d1);
    kernels::min_distance_sq_batch(s2, pts, d2);
    double gap = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        double v1 = std::sqrt(d1[k]);
        double v2 = std::sqrt(d2[k]);
        if (locate(pts[k], a1, 0.0) == Location::Inside) v1 = -v1;
        if (locate(pts[k], a2, 0.0) == Location::Inside) v2 = -v2;
        gap = std::max(gap, std::abs(v1 - v2));
    }
    return gap;
}

namespace {

bool boxes_apart(const BoundingBox& p, const BoundingBox& q, double tol) {
    return p.hi.x + tol < q.lo.x || q.hi.x + tol < p.lo.x || p.hi.y + tol < q.lo.y || q.hi.y + tol < p.lo.y;
}

bool rings_cross(const Ring& r, const Ring& s, double tol) {
    if (boxes_apart(BoundingBox::of(r), BoundingBox::of(s), tol)) return false;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Segment a{r[i], r[(i + 1) % r.size()]};
        for (std::size_t j = 0; j < s.size(); ++j)
            if (segments_cross(a, {s[j], s[(j + 1) % s.size()]}, tol)) return true;
    }
    return false;
}

bool segment_crosses_ring(const Segment& seg, const Ring& r, double tol) {
    for (std::size_t i = 0; i < r.size(); ++i)
        if (segments_cross(seg, Segment{r[i], r[(i + 1) % r.size()]}, tol)) return true;
    return false;
}

bool segment_crosses_rings(const Segment& seg, const PolygonWithHoles& p, double tol) {
    if (segment_crosses_ring(seg, p.outer, tol)) return true;
    for (const auto& h : p.holes)
        if (segment_crosses_ring(seg, h, tol)) return true;
    return false;
}

}  // namespace

std::optional<std::string> check_crystal(const FreeCrystal& a_in, const Domain& dom, int m) {
    FreeCrystal a = a_in;
    a.normalize();
    const double tol = dom.snap_tol;
    const double diam = dom.bbox().diameter();

    for (std::size_t ci = 0; ci < a.components.size(); ++ci) {
        const auto& c = a.components[ci];
        if (!ring_is_simple(c.outer, tol)) return "component " + std::to_string(ci) + " outer ring is not simple";
        if (area(c) <= 1e-14 * diam * diam) return "component " + std::to_string(ci) + " has near-zero area";
        for (const auto& h : c.holes) {
            if (!ring_is_simple(h, tol)) return "hole ring is not simple";
            if (rings_cross(h, c.outer, tol)) return "hole crosses its outer ring";
            for (const auto& v : h)
                if (locate(v, PolygonWithHoles{c.outer, {}}, tol) == Location::Outside) return "hole leaves its component";
        }
        for (std::size_t h1 = 0; h1 < c.holes.size(); ++h1)
            for (std::size_t h2 = h1 + 1; h2 < c.holes.size(); ++h2) {
                if (rings_cross(c.holes[h1], c.holes[h2], tol)) return "holes cross";
                if (point_in_ring(c.holes[h1][0], c.holes[h2]) || point_in_ring(c.holes[h2][0], c.holes[h1]))
                    return "nested holes";
            }
        // Containment in the closed container and outside every open substrate.
        for (const auto& e : c.edges()) {
            if (locate(e.a, dom.container, tol) == Location::Outside ||
                locate(e.midpoint(), dom.container, tol) == Location::Outside)
                return "component leaves the container";
            if (segment_crosses_rings(e, dom.container, tol)) return "component crosses the container wall";
            for (const auto& s : dom.substrates) {
                if (locate(e.midpoint(), s, tol) == Location::Inside || locate(e.a, s, tol) == Location::Inside)
                    return "component enters the substrate";
                if (segment_crosses_rings(e, s, tol)) return "component crosses the substrate boundary";
            }
        }
    }

    for (std::size_t i = 0; i < a.components.size(); ++i) {
        for (std::size_t j = i + 1; j < a.components.size(); ++j) {
            const auto& p = a.components[i];
            const auto& q = a.components[j];
            if (boxes_apart(BoundingBox::of(p.outer), BoundingBox::of(q.outer), tol)) continue;
            for (const auto& e : p.edges())
                if (segment_crosses_rings(e, q, tol)) return "components cross";
            for (const auto& e : p.edges())
                if (locate(e.midpoint(), q, tol) == Location::Inside) return "components overlap";
            for (const auto& e : q.edges())
                if (locate(e.midpoint(), p, tol) == Location::Inside) return "components overlap";
        }
    }

    for (std::size_t si = 0; si < a.slits.size(); ++si) {
        const auto& s = a.slits[si];
        if (s.vertices.size() < 2) return "slit with fewer than 2 vertices";
        for (const auto& seg : s.segments()) {
            if (seg.length() <= tol) return "degenerate slit segment";
            for (const auto& c : a.components)
                if (segment_crosses_rings(seg, c, tol)) return "slit crosses a polygon edge";
            if (segment_crosses_rings(seg, dom.container, tol)) return "slit crosses the container wall";
            for (const auto& v : {seg.a, seg.midpoint()}) {
                const Location in_a = locate(v, a, tol);
                if (s.tag == SlitTag::Crack && in_a == Location::Outside) return "crack slit outside the crystal";
                if (s.tag == SlitTag::Filament && in_a == Location::Inside) return "filament slit inside the crystal";
                if (locate(v, dom.container, tol) == Location::Outside) return "slit leaves the container";
            }
        }
        for (std::size_t sj = si + 1; sj < a.slits.size(); ++sj)
            for (const auto& p : s.segments())
                for (const auto& q : a.slits[sj].segments())
                    if (segments_cross(p, q, tol)) return "slits cross";
    }

    if (!a.delamination.empty()) {
        std::vector<Segment> contact_edges;
        for (const auto& c : a.components)
            for (const auto& e : c.edges())
                for (const auto& cs : dom.contact) {
                    double t0 = 0.0, t1 = 0.0;
                    if (collinear_overlap(e, cs.seg, tol, &t0, &t1)) contact_edges.push_back({e.at(t0), e.at(t1)});
                }
        for (const auto& d : a.delamination) {
            // Every point of d must lie on some contact edge of A.
            double covered = 0.0;
            for (const auto& ce : contact_edges) {
                double t0 = 0.0, t1 = 0.0;
                if (collinear_overlap(d, ce, tol, &t0, &t1)) covered += (t1 - t0) * d.length();
            }
            if (covered < d.length() - 10.0 * tol) return "delamination segment not contained in Sigma and the crystal boundary";
        }
    }

    if (component_count(a, tol) > m) return "boundary has more than m components";
    return std::nullopt;
}

void validate_crystal(const FreeCrystal& a, const Domain& dom, int m) {
    if (auto why = check_crystal(a, dom, m)) throw GeometryError(ErrorKind::InvariantViolation, *why);
}

}  // namespace sdri
