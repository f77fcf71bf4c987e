#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdri/error.hpp"
#include "sdri/geometry.hpp"
#include "sdri/kernels.hpp"

namespace sdri {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::OverlappingInteriors: return "OverlappingInteriors";
        case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorKind::UnclassifiableArc: return "UnclassifiableArc";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::HypothesisViolated: return "HypothesisViolated";
        case ErrorKind::MeshFailure: return "MeshFailure";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::UnknownPreset: return "UnknownPreset";
        case ErrorKind::NoTriplePoint: return "NoTriplePoint";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
    }
    return "Error";
}

double ring_signed_area(const Ring& r) {
    const std::size_t n = r.size();
    if (n < 3) return 0.0;
    // Shift to the first vertex to limit cancellation for rings far from the origin.
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = r[i].x - r[0].x;
        ys[i] = r[i].y - r[0].y;
    }
    return 0.5 * kernels::shoelace(xs, ys);
}

void PolygonWithHoles::normalize() {
    if (ring_signed_area(outer) < 0.0) std::reverse(outer.begin(), outer.end());
    for (auto& h : holes)
        if (ring_signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
}

namespace {
void append_ring_edges(const Ring& r, std::vector<Segment>& out) {
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back({r[i], r[(i + 1) % n]});
}
}  // namespace

std::vector<Segment> PolygonWithHoles::edges() const {
    std::vector<Segment> out;
    append_ring_edges(outer, out);
    for (const auto& h : holes) append_ring_edges(h, out);
    return out;
}

void BoundingBox::expand(Vec2 p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
}

BoundingBox BoundingBox::of(const Ring& r) {
    BoundingBox b;
    if (r.empty()) return b;
    b.lo = b.hi = r.front();
    for (const auto& p : r) b.expand(p);
    return b;
}

double area(const PolygonWithHoles& p) {
    double a = std::abs(ring_signed_area(p.outer));
    for (const auto& h : p.holes) a -= std::abs(ring_signed_area(h));
    return a;
}

double area(const FreeCrystal& a) {
    double s = 0.0;
    for (const auto& c : a.components) s += area(c);
    return s;
}

std::vector<Segment> Slit::segments() const {
    std::vector<Segment> out;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) out.push_back({vertices[i], vertices[i + 1]});
    return out;
}

double Slit::length() const {
    double l = 0.0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) l += distance(vertices[i], vertices[i + 1]);
    return l;
}

void FreeCrystal::normalize() {
    for (auto& c : components) c.normalize();
}

std::vector<Segment> FreeCrystal::boundary_segments() const {
    std::vector<Segment> out;
    for (const auto& c : components) {
        auto e = c.edges();
        out.insert(out.end(), e.begin(), e.end());
    }
    for (const auto& s : slits) {
        auto e = s.segments();
        out.insert(out.end(), e.begin(), e.end());
    }
    return out;
}

double point_segment_distance(Vec2 p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double l2 = norm2(d);
    double t = l2 > 0.0 ? dot(p - s.a, d) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, s.a + d * t);
}

bool segments_cross(const Segment& s, const Segment& t, double tol) {
    if (std::max(s.a.x, s.b.x) < std::min(t.a.x, t.b.x) || std::max(t.a.x, t.b.x) < std::min(s.a.x, s.b.x) ||
        std::max(s.a.y, s.b.y) < std::min(t.a.y, t.b.y) || std::max(t.a.y, t.b.y) < std::min(s.a.y, s.b.y))
        return false;
    const double ls = s.length();
    const double lt = t.length();
    if (ls <= tol || lt <= tol) return false;
    // Signed distances of each endpoint to the other segment's line.
    const double d1 = orient(s.a, s.b, t.a) / ls;
    const double d2 = orient(s.a, s.b, t.b) / ls;
    const double d3 = orient(t.a, t.b, s.a) / lt;
    const double d4 = orient(t.a, t.b, s.b) / lt;
    return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
           ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

double segment_distance(const Segment& s, const Segment& t) {
    if (segments_cross(s, t, 0.0)) return 0.0;
    return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                     point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

bool point_in_ring(Vec2 p, const Ring& r) {
    bool inside = false;
    const std::size_t n = r.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = r[i];
        const Vec2 b = r[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

double ring_boundary_distance(Vec2 p, const Ring& r) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) d = std::min(d, point_segment_distance(p, {r[i], r[(i + 1) % n]}));
    return d;
}

namespace {

// True when p is within tol of the ring; squared distances with a box reject.
bool ring_near(Vec2 p, const Ring& r, double tol) {
    const double tol2 = tol * tol;
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = r[i];
        const Vec2 b = r[(i + 1) % n];
        if (p.x < std::min(a.x, b.x) - tol || p.x > std::max(a.x, b.x) + tol || p.y < std::min(a.y, b.y) - tol ||
            p.y > std::max(a.y, b.y) + tol)
            continue;
        const Vec2 d = b - a;
        const double l2 = norm2(d);
        const double t = l2 > 0.0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
        if (norm2(p - (a + d * t)) <= tol2) return true;
    }
    return false;
}

}  // namespace

Location locate(Vec2 p, const PolygonWithHoles& poly, double tol) {
    if (ring_near(p, poly.outer, tol)) return Location::Boundary;
    for (const auto& h : poly.holes)
        if (ring_near(p, h, tol)) return Location::Boundary;
    if (!point_in_ring(p, poly.outer)) return Location::Outside;
    for (const auto& h : poly.holes)
        if (point_in_ring(p, h)) return Location::Outside;
    return Location::Inside;
}

Location locate(Vec2 p, const FreeCrystal& a, double tol) {
    Location best = Location::Outside;
    for (const auto& c : a.components) {
        const Location l = locate(p, c, tol);
        if (l == Location::Inside) return l;
        if (l == Location::Boundary) best = l;
    }
    return best;
}

bool ring_is_simple(const Ring& r, double tol) {
    const std::size_t n = r.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (distance(r[i], r[(i + 1) % n]) <= tol) return false;
    if (n == 3) return std::abs(orient(r[0], r[1], r[2])) > tol * tol;
    std::vector<BoundingBox> boxes(n);
    for (std::size_t i = 0; i < n; ++i) {
        boxes[i].lo = boxes[i].hi = r[i];
        boxes[i].expand(r[(i + 1) % n]);
        // Adjacent edge folding back onto this one.
        if (point_segment_distance(r[(i + 2) % n], Segment{r[i], r[(i + 1) % n]}) <= tol) return false;
    }
    // Sweep over edges sorted by their left end.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return boxes[a].lo.x < boxes[b].lo.x; });
    for (std::size_t oi = 0; oi < n; ++oi) {
        const std::size_t i = order[oi];
        const BoundingBox& bi = boxes[i];
        const Segment si{r[i], r[(i + 1) % n]};
        for (std::size_t oj = oi + 1; oj < n; ++oj) {
            const std::size_t j = order[oj];
            const BoundingBox& bj = boxes[j];
            if (bj.lo.x > bi.hi.x + tol) break;
            const std::size_t d = i > j ? i - j : j - i;
            if (d == 1 || d == n - 1) continue;
            if (bi.hi.y + tol < bj.lo.y || bj.hi.y + tol < bi.lo.y) continue;
            if (segment_distance(si, Segment{r[j], r[(j + 1) % n]}) <= tol) return false;
        }
    }
    return true;
}

bool collinear_overlap(const Segment& s, const Segment& t, double tol, double* t0, double* t1) {
    const double ls = s.length();
    if (ls <= tol) return false;
    const Vec2 dir = (s.b - s.a) / ls;
    const Vec2 nrm = perp(dir);
    if (std::abs(dot(t.a - s.a, nrm)) > tol || std::abs(dot(t.b - s.a, nrm)) > tol) return false;
    double p0 = dot(t.a - s.a, dir);
    double p1 = dot(t.b - s.a, dir);
    if (p0 > p1) std::swap(p0, p1);
    const double lo = std::max(p0, 0.0);
    const double hi = std::min(p1, ls);
    if (hi - lo <= tol) return false;
    if (t0) *t0 = lo / ls;
    if (t1) *t1 = hi / ls;
    return true;
}

Ring make_rectangle(Vec2 lo, Vec2 hi) { return {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}; }

Ring make_subdivided_rectangle(Vec2 lo, Vec2 hi, int per_side) {
    const Ring corners = make_rectangle(lo, hi);
    Ring out;
    for (int c = 0; c < 4; ++c) {
        const Vec2 a = corners[c];
        const Vec2 b = corners[(c + 1) % 4];
        for (int k = 0; k < per_side; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / per_side));
    }
    return out;
}

Ring make_regular_polygon(Vec2 center, double radius, int n, double phase) {
    Ring out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double t = phase + 2.0 * std::numbers::pi * k / n;
        out.push_back(center + Vec2{std::cos(t), std::sin(t)} * radius);
    }
    return out;
}

}  // namespace sdri
