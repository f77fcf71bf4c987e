#include <algorithm>

#include "sdri/error.hpp"
#include "sdri/geometry.hpp"

namespace sdri {

std::string_view to_string(ArcClass c) {
    switch (c) {
        case ArcClass::FreeBoundary: return "free_boundary";
        case ArcClass::Crack: return "crack";
        case ArcClass::Filament: return "filament";
        case ArcClass::WettingLayer: return "wetting";
        case ArcClass::Contact: return "contact";
        case ArcClass::Delamination: return "delamination";
    }
    return "unknown";
}

double ClassTotals::total_weighted() const {
    double s = 0.0;
    for (double w : weighted) s += w;
    return s;
}

ClassTotals class_totals(const std::vector<ClassifiedArc>& arcs) {
    ClassTotals t;
    for (const auto& a : arcs) {
        const auto k = static_cast<std::size_t>(a.cls);
        const double l = a.segment.length();
        t.length[k] += l;
        t.weighted[k] += a.multiplicity * l;
    }
    return t;
}

namespace {

/// Splits s at the endpoints of every collinear overlap with the given segments.
std::vector<Segment> split_at_overlaps(const Segment& s, const std::vector<Segment>& cutters, double tol) {
    std::vector<double> ts{0.0, 1.0};
    for (const auto& c : cutters) {
        double t0 = 0.0, t1 = 0.0;
        if (collinear_overlap(s, c, tol, &t0, &t1)) {
            ts.push_back(t0);
            ts.push_back(t1);
        }
    }
    std::sort(ts.begin(), ts.end());
    const double len = s.length();
    std::vector<Segment> out;
    double prev = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if ((ts[i] - prev) * len <= tol) continue;
        out.push_back({s.at(prev), s.at(ts[i])});
        prev = ts[i];
    }
    if (out.empty()) out.push_back(s);
    else out.back().b = s.b;
    return out;
}

std::optional<std::size_t> contact_for_piece(const Segment& piece, const Domain& dom) {
    for (std::size_t k = 0; k < dom.contact.size(); ++k) {
        double t0 = 0.0, t1 = 0.0;
        if (collinear_overlap(piece, dom.contact[k].seg, dom.snap_tol, &t0, &t1) && t1 - t0 > 0.5) return k;
    }
    return std::nullopt;
}

bool overlaps_any(const Segment& piece, const std::vector<Segment>& set, double tol) {
    for (const auto& s : set) {
        double t0 = 0.0, t1 = 0.0;
        if (collinear_overlap(piece, s, tol, &t0, &t1) && t1 - t0 > 0.5) return true;
    }
    return false;
}

bool on_sigma_corner(Vec2 p, std::size_t own, const Domain& dom) {
    const Vec2 n = dom.contact[own].normal;
    for (std::size_t k = 0; k < dom.contact.size(); ++k) {
        if (k == own) continue;
        const Segment& s = dom.contact[k].seg;
        if ((distance(p, s.a) <= dom.snap_tol || distance(p, s.b) <= dom.snap_tol) &&
            dot(n, dom.contact[k].normal) < 1.0 - 1e-9)
            return true;
    }
    return false;
}

}  // namespace

std::vector<ClassifiedArc> classify_boundary(const FreeCrystal& a_in, const Domain& dom) {
    FreeCrystal a = a_in;
    a.normalize();
    const double tol = dom.snap_tol;

    std::vector<Segment> sigma;
    sigma.reserve(dom.contact.size());
    for (const auto& c : dom.contact) sigma.push_back(c.seg);
    std::vector<Segment> cutters = sigma;
    cutters.insert(cutters.end(), a.delamination.begin(), a.delamination.end());
    const auto walls = dom.container.edges();

    std::vector<ClassifiedArc> out;
    for (std::size_t ci = 0; ci < a.components.size(); ++ci) {
        for (const auto& edge : a.components[ci].edges()) {
            const Vec2 outward = edge.right_normal();
            for (const auto& piece : split_at_overlaps(edge, cutters, tol)) {
                ClassifiedArc arc;
                arc.segment = piece;
                arc.normal = outward;
                arc.component = static_cast<int>(ci);
                if (auto k = contact_for_piece(piece, dom)) {
                    if (dot(outward, dom.contact[*k].normal) > 0.0)
                        throw GeometryError(ErrorKind::InvariantViolation, "crystal lies on the substrate side of Sigma");
                    arc.contact_index = static_cast<int>(*k);
                    arc.cls = overlaps_any(piece, a.delamination, tol) ? ArcClass::Delamination : ArcClass::Contact;
                } else {
                    arc.cls = ArcClass::FreeBoundary;
                    if (overlaps_any(piece, walls, tol)) {
                        arc.on_wall = true;
                    } else if (locate(piece.midpoint(), dom.container, tol) == Location::Outside) {
                        throw GeometryError(ErrorKind::UnclassifiableArc, "crystal edge lies outside the container");
                    }
                }
                out.push_back(arc);
            }
        }
    }

    for (const auto& slit : a.slits) {
        for (const auto& seg : slit.segments()) {
            for (const auto& piece : split_at_overlaps(seg, sigma, tol)) {
                ClassifiedArc arc;
                arc.segment = piece;
                arc.normal = piece.right_normal();
                const Vec2 mid = piece.midpoint();
                if (slit.tag == SlitTag::Crack) {
                    if (locate(mid, a, tol) == Location::Outside)
                        throw GeometryError(ErrorKind::InvariantViolation, "crack slit leaves the crystal");
                    arc.cls = ArcClass::Crack;
                    arc.multiplicity = 2;
                } else if (auto k = contact_for_piece(piece, dom)) {
                    arc.cls = ArcClass::WettingLayer;
                    arc.normal = dom.contact[*k].normal;
                    arc.contact_index = static_cast<int>(*k);
                    arc.corner_incidence = on_sigma_corner(piece.a, *k, dom) || on_sigma_corner(piece.b, *k, dom);
                } else {
                    if (locate(mid, a, tol) == Location::Inside)
                        throw GeometryError(ErrorKind::InvariantViolation, "filament slit enters the crystal");
                    if (locate(mid, dom.container, tol) == Location::Outside)
                        throw GeometryError(ErrorKind::UnclassifiableArc, "filament lies outside the container");
                    arc.cls = ArcClass::Filament;
                    arc.multiplicity = 2;
                }
                out.push_back(arc);
            }
        }
    }
    return out;
}

double boundary_length(const FreeCrystal& a, const Domain& dom, std::optional<ArcClass> filter) {
    double l = 0.0;
    for (const auto& arc : classify_boundary(a, dom))
        if (!filter || arc.cls == *filter) l += arc.segment.length();
    return l;
}

}  // namespace sdri
