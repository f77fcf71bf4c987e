#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdri/error.hpp"
#include "sdri/surface_energy.hpp"

namespace sdri {

double arc_integrand(const ClassifiedArc& arc, Vec2 x, const AnisotropyField& phi, const AdhesionField& beta) {
    switch (arc.cls) {
        case ArcClass::FreeBoundary: return phi(x, arc.normal);
        case ArcClass::Crack:
        case ArcClass::Filament: return phi(x, arc.normal) + phi(x, -arc.normal);
        case ArcClass::WettingLayer: return phi(x, arc.normal) + beta.at(x);
        case ArcClass::Contact: return beta.at(x);
        // Classified normals on Sigma are outward from A, i.e. -nu_Sigma.
        case ArcClass::Delamination: return phi(x, arc.normal);
    }
    return 0.0;
}

namespace {

bool on_sigma(ArcClass c) {
    return c == ArcClass::WettingLayer || c == ArcClass::Contact || c == ArcClass::Delamination;
}

/// Integral of the arc integrand: split where a field jumps or changes its
/// bilinear cell, then midpoint per piece for constant fields and Simpson for
/// modulated ones (both exact for the supported families).
double integrate_arc(const ClassifiedArc& arc, const AnisotropyField& phi, const AdhesionField& beta) {
    std::vector<double> ts{0.0, 1.0};
    if (on_sigma(arc.cls)) {
        auto b = beta.breakpoints(arc.segment);
        ts.insert(ts.end(), b.begin(), b.end());
    }
    if (phi.modulation()) {
        auto c = phi.modulation()->crossings(arc.segment);
        ts.insert(ts.end(), c.begin(), c.end());
    }
    std::sort(ts.begin(), ts.end());
    const double len = arc.segment.length();
    double sum = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double dt = ts[i] - ts[i - 1];
        if (dt <= 0.0) continue;
        const double piece = dt * len;
        const Vec2 mid = arc.segment.at(0.5 * (ts[i] + ts[i - 1]));
        if (phi.spatially_constant()) {
            sum += piece * arc_integrand(arc, mid, phi, beta);
        } else {
            // beta is constant on the piece; sample it at the midpoint so the
            // endpoint lookups cannot pick the neighbouring piece.
            const double bmid = beta.at(mid);
            auto f = [&](Vec2 x) {
                const double v = arc_integrand(arc, x, phi, beta);
                return on_sigma(arc.cls) ? v - beta.at(x) + bmid : v;
            };
            const Vec2 a = arc.segment.at(ts[i - 1]);
            const Vec2 b = arc.segment.at(ts[i]);
            sum += piece * (f(a) + 4.0 * f(mid) + f(b)) / 6.0;
        }
    }
    return sum;
}

}  // namespace

EnergyBreakdown surface_energy(const std::vector<ClassifiedArc>& arcs, const AnisotropyField& phi,
                               const AdhesionField& beta) {
    EnergyBreakdown e;
    for (const auto& arc : arcs) {
        const double v = integrate_arc(arc, phi, beta);
        switch (arc.cls) {
            case ArcClass::FreeBoundary:
                e.free_boundary += v;
                if (arc.on_wall) ++e.wall_arcs;
                break;
            case ArcClass::Crack: e.cracks += v; break;
            case ArcClass::Filament: e.filaments += v; break;
            case ArcClass::WettingLayer:
                e.wetting += v;
                if (arc.corner_incidence) ++e.corner_incidences;
                break;
            case ArcClass::Contact: e.contact += v; break;
            case ArcClass::Delamination: e.delamination += v; break;
        }
    }
    return e;
}

EnergyBreakdown surface_energy(const FreeCrystal& a, const Domain& dom, const AnisotropyField& phi,
                               const AdhesionField& beta) {
    return surface_energy(classify_boundary(a, dom), phi, beta);
}

double ring_energy(const Ring& r, const AnisotropyField& phi) {
    const double orientation = ring_signed_area(r) >= 0.0 ? 1.0 : -1.0;
    double e = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Segment s{r[i], r[(i + 1) % r.size()]};
        e += s.length() * phi(s.midpoint(), s.right_normal() * orientation);
    }
    return e;
}

Ring wulff_shape(const AnisotropyField& phi, double v, int n) {
    if (!phi.spatially_constant()) throw HypothesisError("wulff_shape needs a spatially constant anisotropy");
    if (!(v > 0.0)) throw GeometryError(ErrorKind::DegenerateGeometry, "wulff_shape needs positive area");
    const double r = 2.0 * phi.c2();
    Ring poly = make_rectangle({-r, -r}, {r, r});
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        const Vec2 nu{std::cos(t), std::sin(t)};
        const double h = phi.base(nu);
        // Sutherland-Hodgman clip against x . nu <= h.
        Ring out;
        const std::size_t m = poly.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Vec2 p = poly[i];
            const Vec2 q = poly[(i + 1) % m];
            const double fp = dot(p, nu) - h;
            const double fq = dot(q, nu) - h;
            if (fp <= 0.0) out.push_back(p);
            if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) out.push_back(p + (q - p) * (fp / (fp - fq)));
        }
        poly = std::move(out);
    }
    // Clipping at an active corner leaves near-duplicate vertices.
    Ring clean;
    const double eps = 1e-12 * r;
    for (const auto& p : poly)
        if (clean.empty() || distance(p, clean.back()) > eps) clean.push_back(p);
    while (clean.size() > 1 && distance(clean.front(), clean.back()) <= eps) clean.pop_back();
    const double a = std::abs(ring_signed_area(clean));
    const double s = std::sqrt(v / a);
    for (auto& p : clean) p *= s;
    return clean;
}

}  // namespace sdri
