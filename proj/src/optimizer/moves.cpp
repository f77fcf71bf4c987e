#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdri/optimizer.hpp"

namespace sdri {

std::string_view to_string(MoveKind k) {
    switch (k) {
        case MoveKind::VertexShift: return "vertex_shift";
        case MoveKind::EdgeSplit: return "edge_split";
        case MoveKind::EdgeCollapse: return "edge_collapse";
        case MoveKind::SlitGrow: return "slit_grow";
        case MoveKind::SlitRetract: return "slit_retract";
        case MoveKind::DelaminationToggle: return "delamination_toggle";
        case MoveKind::HoleFill: return "hole_fill";
        case MoveKind::ComponentDrop: return "component_drop";
        case MoveKind::ComponentSeed: return "component_seed";
    }
    return "?";
}

MoveKind draw_move_kind(const MoveWeights& w, Rng& rng) {
    const double total = w.vertex_shift + w.split_collapse + w.slit + w.delamination + w.topology;
    double u = rng.uniform() * total;
    const double v = rng.uniform();
    if ((u -= w.vertex_shift) < 0.0) return MoveKind::VertexShift;
    if ((u -= w.split_collapse) < 0.0) return v < 0.5 ? MoveKind::EdgeSplit : MoveKind::EdgeCollapse;
    if ((u -= w.slit) < 0.0) return v < 0.5 ? MoveKind::SlitGrow : MoveKind::SlitRetract;
    if ((u -= w.delamination) < 0.0) return MoveKind::DelaminationToggle;
    if (v < 1.0 / 3.0) return MoveKind::HoleFill;
    if (v < 2.0 / 3.0) return MoveKind::ComponentDrop;
    return MoveKind::ComponentSeed;
}

namespace {

Vec2 closest_on(const Segment& s, Vec2 p) {
    const Vec2 d = s.b - s.a;
    const double l2 = norm2(d);
    if (l2 <= 0.0) return s.a;
    return s.at(std::clamp(dot(p - s.a, d) / l2, 0.0, 1.0));
}

int vertex_count(const FreeCrystal& a) {
    int n = 0;
    for (const auto& c : a.components) {
        n += static_cast<int>(c.outer.size());
        for (const auto& h : c.holes) n += static_cast<int>(h.size());
    }
    for (const auto& s : a.slits) n += static_cast<int>(s.vertices.size());
    return n;
}

std::vector<Ring*> rings_of(FreeCrystal& a) {
    std::vector<Ring*> r;
    for (auto& c : a.components) {
        r.push_back(&c.outer);
        for (auto& h : c.holes) r.push_back(&h);
    }
    return r;
}

// Picks a ring with probability proportional to its size, then a vertex.
std::pair<Ring*, std::size_t> pick_vertex(FreeCrystal& a, Rng& rng) {
    auto rings = rings_of(a);
    std::size_t total = 0;
    for (auto* r : rings) total += r->size();
    std::size_t k = rng.index(total);
    for (auto* r : rings) {
        if (k < r->size()) return {r, k};
        k -= r->size();
    }
    return {nullptr, 0};
}

struct Walls {
    std::vector<Segment> edges;
    double tol;
    // Off-wall points closer than this are pulled onto the wall; keeps the
    // elastic mesh from grading down to hairline gaps.
    double snap = 0.0;

    // Tangent of the single wall containing p; zero at corners; nullopt off the walls.
    std::optional<Vec2> tangent(Vec2 p) const {
        std::optional<Vec2> t;
        int hits = 0;
        for (const auto& e : edges) {
            if (point_segment_distance(p, e) > tol) continue;
            const Vec2 d = e.direction();
            if (hits == 0 || std::abs(cross(*t, d)) > 1e-12) ++hits;
            t = d;
        }
        if (hits == 0) return std::nullopt;
        if (hits > 1) return Vec2{0.0, 0.0};
        return t;
    }

    Vec2 project(Vec2 p) const {
        Vec2 best = p;
        double bd = std::numeric_limits<double>::infinity();
        for (const auto& e : edges) {
            const Vec2 q = closest_on(e, p);
            const double d = distance(p, q);
            if (d < bd) {
                bd = d;
                best = q;
            }
        }
        return best;
    }
};

Walls walls_of(const Domain& dom) { return {dom.container.edges(), dom.snap_tol}; }

// Moves p by d, sliding along a wall it sits on; points pushed out of the
// container land on its boundary.
Vec2 displace(Vec2 p, Vec2 d, const Walls& w, const Domain& dom, bool slide) {
    if (slide) {
        if (auto t = w.tangent(p)) d = *t * dot(d, *t);
    }
    Vec2 q = p + d;
    if (locate(q, dom.container, dom.snap_tol) == Location::Outside) return w.project(q);
    if (w.snap > 0.0) {
        const Vec2 r = w.project(q);
        if (distance(r, q) < w.snap) q = r;
    }
    return q;
}

Vec2 ring_centroid(const Ring& r) {
    double a = 0.0;
    Vec2 c{};
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Vec2 p = r[i], q = r[(i + 1) % r.size()];
        const double w = cross(p, q);
        a += w;
        c += (p + q) * w;
    }
    if (std::abs(a) < 1e-300) return r.empty() ? Vec2{} : r.front();
    return c / (3.0 * a);
}

void scale_about(FreeCrystal& a, Vec2 c, double s) {
    for (auto* r : rings_of(a))
        for (auto& p : *r) p = c + (p - c) * s;
    for (auto& sl : a.slits)
        for (auto& p : sl.vertices) p = c + (p - c) * s;
}

// Drops delamination pieces that no longer lie on an edge of A.
void prune_delamination(FreeCrystal& a, double tol) {
    if (a.delamination.empty()) return;
    const auto edges = a.boundary_segments();
    std::erase_if(a.delamination, [&](const Segment& j) {
        for (const auto& e : edges)
            if (point_segment_distance(j.a, e) <= tol && point_segment_distance(j.b, e) <= tol) return false;
        return true;
    });
}

std::optional<Vec2> sample_in(const PolygonWithHoles& poly, const Domain& dom, Rng& rng, bool want_inside) {
    BoundingBox b = BoundingBox::of(poly.outer);
    for (int k = 0; k < 32; ++k) {
        const Vec2 p{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
        if ((locate(p, poly, dom.snap_tol) == Location::Inside) == want_inside) return p;
    }
    return std::nullopt;
}

// Outward unit normal at vertex i (material on the left of the ring).
Vec2 vertex_normal(const Ring& r, std::size_t i) {
    const std::size_t n = r.size();
    const Vec2 d = r[(i + 1) % n] - r[(i + n - 1) % n];
    const double l = norm(d);
    return l > 0.0 ? Vec2{d.y, -d.x} / l : Vec2{0.0, 0.0};
}

std::size_t wrap(std::size_t i, long long k, std::size_t n) {
    const long long nn = static_cast<long long>(n);
    return static_cast<std::size_t>(((static_cast<long long>(i) + k) % nn + nn) % nn);
}

std::optional<FreeCrystal> vertex_shift(FreeCrystal a, const Problem& p, double sigma, Rng& rng) {
    if (a.components.empty()) return std::nullopt;
    Walls w = walls_of(p.domain);
    if (!p.elastic.tensor.is_zero()) w.snap = 0.1 * p.elastic.h;
    const double variant = rng.uniform();
    if (variant < 0.1) {
        // Dilation of one component about its centroid.
        auto& c = a.components[rng.index(a.components.size())];
        const Vec2 ctr = ring_centroid(c.outer);
        const double scale = std::sqrt(std::max(area(c), 1e-300));
        const double s = 1.0 + rng.normal() * sigma / std::max(scale, 1e-12);
        if (!(s > 0.0)) return std::nullopt;
        for (auto& q : c.outer) q = displace(q, (q - ctr) * (s - 1.0), w, p.domain, false);
        for (auto& h : c.holes)
            for (auto& q : h) q = ctr + (q - ctr) * s;
        prune_delamination(a, p.domain.snap_tol);
        return a;
    }
    auto [ring, i] = pick_vertex(a, rng);
    if (!ring) return std::nullopt;
    const std::size_t n = ring->size();
    std::vector<std::size_t> widths{0};
    for (std::size_t k = 1; k <= n / 4; k *= 2) widths.push_back(k);
    const long long h = static_cast<long long>(widths[rng.index(widths.size())]);
    const Ring old = *ring;

    if (variant < 0.35) {
        // Laplacian smoothing of a window, then the ring area is restored by
        // moving the window along its normals.
        const double omega = rng.uniform(0.1, 1.0);
        const double a0 = ring_signed_area(old);
        for (long long k = -h; k <= h; ++k) {
            const std::size_t j = wrap(i, k, n);
            if (w.tangent(old[j])) continue;
            const Vec2 target = (old[wrap(j, -1, n)] + old[wrap(j, 1, n)]) * 0.5;
            (*ring)[j] = old[j] + (target - old[j]) * omega;
        }
        double len = 0.0;
        for (long long k = -h - 1; k <= h; ++k) len += distance((*ring)[wrap(i, k, n)], (*ring)[wrap(i, k + 1, n)]);
        const double t = len > 0.0 ? (a0 - ring_signed_area(*ring)) / len : 0.0;
        const Ring smoothed = *ring;
        for (long long k = -h; k <= h; ++k) {
            const std::size_t j = wrap(i, k, n);
            if (w.tangent(old[j])) continue;
            (*ring)[j] = displace(smoothed[j], vertex_normal(smoothed, j) * t, w, p.domain, false);
        }
        prune_delamination(a, p.domain.snap_tol);
        return a;
    }

    std::vector<char> off_wall(n, 1);
    for (std::size_t j = 0; j < n; ++j) off_wall[j] = !w.tangent(old[j]).has_value();
    // Restores the ring area by offsetting the free vertices outside the moved set along their normals.
    auto restore_area = [&](const std::vector<char>& moved) {
        double len = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (!moved[j] && off_wall[j]) len += 0.5 * (distance(old[j], old[wrap(j, -1, n)]) + distance(old[j], old[wrap(j, 1, n)]));
        if (len <= 0.0) return;
        const double t = (ring_signed_area(old) - ring_signed_area(*ring)) / len;
        const Ring bumped = *ring;
        for (std::size_t j = 0; j < n; ++j)
            if (!moved[j] && off_wall[j]) (*ring)[j] = displace(bumped[j], vertex_normal(bumped, j) * t, w, p.domain, false);
    };

    if (variant < 0.45) {
        // Contact-line slide: a wall vertex next to a free one moves along the
        // wall and drags the free side with it.
        std::vector<std::size_t> triple;
        for (std::size_t j = 0; j < n; ++j)
            if (!off_wall[j] && (off_wall[wrap(j, -1, n)] || off_wall[wrap(j, 1, n)])) triple.push_back(j);
        if (!triple.empty()) {
            const std::size_t j0 = triple[rng.index(triple.size())];
            const auto t = w.tangent(old[j0]);
            if (!t || norm2(*t) == 0.0) return std::nullopt;
            long long side = off_wall[wrap(j0, 1, n)] ? 1 : -1;
            if (off_wall[wrap(j0, 1, n)] && off_wall[wrap(j0, -1, n)] && rng.uniform() < 0.5) side = -side;
            const Vec2 d = *t * (rng.normal() * sigma);
            std::vector<char> moved(n, 0);
            moved[j0] = 1;
            (*ring)[j0] = displace(old[j0], d, w, p.domain, true);
            for (long long k = 1; k <= h; ++k) {
                const std::size_t j = wrap(j0, side * k, n);
                if (!off_wall[j]) break;
                const double wgt = 1.0 - static_cast<double>(k) / static_cast<double>(h + 1);
                (*ring)[j] = displace(old[j], d * wgt, w, p.domain, false);
                moved[j] = 1;
            }
            if (rng.uniform() < 0.5) restore_area(moved);
            prune_delamination(a, p.domain.snap_tol);
            return a;
        }
    }

    // Hat-weighted bump: along the local normals, or a free vector.
    const bool along_normal = rng.uniform() < 0.7;
    const bool keep_area = rng.uniform() < 0.5;
    const double amp = rng.normal() * sigma;
    const Vec2 d{rng.normal() * sigma, rng.normal() * sigma};
    for (long long k = -h; k <= h; ++k) {
        const std::size_t j = wrap(i, k, n);
        const double wgt = 1.0 - static_cast<double>(std::llabs(k)) / static_cast<double>(h + 1);
        const Vec2 dj = (along_normal && off_wall[j]) ? vertex_normal(old, j) * (amp * wgt) : d * wgt;
        (*ring)[j] = displace(old[j], dj, w, p.domain, !off_wall[j] && rng.uniform() < 0.75);
    }
    if (keep_area) {
        std::vector<char> in_window(n, 0);
        for (long long k = -h; k <= h; ++k) in_window[wrap(i, k, n)] = 1;
        restore_area(in_window);
    }
    prune_delamination(a, p.domain.snap_tol);
    return a;
}

std::optional<FreeCrystal> edge_split(FreeCrystal a, const Problem& p, Rng& rng) {
    if (vertex_count(a) >= p.vertex_budget) return std::nullopt;
    auto [ring, i] = pick_vertex(a, rng);
    if (!ring) return std::nullopt;
    const Vec2 m = ((*ring)[i] + (*ring)[(i + 1) % ring->size()]) * 0.5;
    ring->insert(ring->begin() + static_cast<std::ptrdiff_t>(i + 1), m);
    return a;
}

std::optional<FreeCrystal> edge_collapse(FreeCrystal a, const Problem& p, Rng& rng) {
    auto [ring, i] = pick_vertex(a, rng);
    if (!ring || ring->size() <= 3) return std::nullopt;
    ring->erase(ring->begin() + static_cast<std::ptrdiff_t>(i));
    prune_delamination(a, p.domain.snap_tol);
    return a;
}

std::optional<FreeCrystal> slit_grow(FreeCrystal a, const Problem& p, double sigma, Rng& rng) {
    const double len = sigma * (1.0 + std::abs(rng.normal()));
    if (!a.slits.empty() && rng.uniform() < 0.5) {
        if (vertex_count(a) >= p.vertex_budget) return std::nullopt;
        auto& s = a.slits[rng.index(a.slits.size())];
        auto& v = s.vertices;
        const bool front = rng.uniform() < 0.5;
        const Vec2 tip = front ? v.front() : v.back();
        const Vec2 prev = front ? v[1] : v[v.size() - 2];
        const double ang = std::atan2((tip - prev).y, (tip - prev).x) + 0.3 * rng.normal();
        const Vec2 q = tip + Vec2{std::cos(ang), std::sin(ang)} * len;
        if (front) v.insert(v.begin(), q);
        else v.push_back(q);
        return a;
    }
    if (vertex_count(a) + 2 > p.vertex_budget) return std::nullopt;
    const double ang = rng.uniform(0.0, std::numbers::pi);
    const Vec2 dir{std::cos(ang), std::sin(ang)};
    const double u = rng.uniform();
    if (u < 0.4 && !a.components.empty()) {
        const auto at = sample_in(a.components[rng.index(a.components.size())], p.domain, rng, true);
        if (!at) return std::nullopt;
        a.slits.push_back({{*at - dir * (0.5 * len), *at + dir * (0.5 * len)}, SlitTag::Crack});
    } else if (u < 0.8 || p.domain.contact.empty()) {
        const auto at = sample_in(p.domain.container, p.domain, rng, true);
        if (!at || locate(*at, a, p.domain.snap_tol) != Location::Outside) return std::nullopt;
        a.slits.push_back({{*at - dir * (0.5 * len), *at + dir * (0.5 * len)}, SlitTag::Filament});
    } else {
        // Wetting-layer seed lying on Sigma.
        const auto& cs = p.domain.contact[rng.index(p.domain.contact.size())].seg;
        const double L = cs.length();
        if (L <= 0.0) return std::nullopt;
        const double t = rng.uniform();
        const double dt = std::min(0.5 * len / L, 0.5);
        a.slits.push_back({{cs.at(std::max(0.0, t - dt)), cs.at(std::min(1.0, t + dt))}, SlitTag::Filament});
    }
    return a;
}

std::optional<FreeCrystal> slit_retract(FreeCrystal a, Rng& rng) {
    if (a.slits.empty()) return std::nullopt;
    const std::size_t k = rng.index(a.slits.size());
    auto& v = a.slits[k].vertices;
    const double u = rng.uniform();
    if (u < 0.3) {
        a.slits.erase(a.slits.begin() + static_cast<std::ptrdiff_t>(k));
        return a;
    }
    const bool front = rng.uniform() < 0.5;
    if (v.size() > 2 && u < 0.65) {
        if (front) v.erase(v.begin());
        else v.pop_back();
        return a;
    }
    const double f = rng.uniform(0.2, 0.8);
    if (front) v.front() = v[1] + (v.front() - v[1]) * f;
    else v.back() = v[v.size() - 2] + (v.back() - v[v.size() - 2]) * f;
    return a;
}

std::optional<FreeCrystal> delamination_toggle(FreeCrystal a, const Problem& p, Rng& rng) {
    std::vector<ClassifiedArc> cand;
    for (const auto& arc : classify_boundary(a, p.domain))
        if (arc.cls == ArcClass::Contact || arc.cls == ArcClass::Delamination) cand.push_back(arc);
    if (cand.empty()) return std::nullopt;
    const auto& arc = cand[rng.index(cand.size())];
    const double tol = p.domain.snap_tol;
    if (arc.cls == ArcClass::Contact) {
        a.delamination.push_back(arc.segment);
        return a;
    }
    std::vector<Segment> kept;
    for (const auto& j : a.delamination) {
        double t0 = 0.0, t1 = 0.0;
        if (!collinear_overlap(j, arc.segment, tol, &t0, &t1)) {
            kept.push_back(j);
            continue;
        }
        const double lo = std::min(t0, t1), hi = std::max(t0, t1);
        const double L = j.length();
        if (lo * L > tol) kept.push_back({j.a, j.at(lo)});
        if ((1.0 - hi) * L > tol) kept.push_back({j.at(hi), j.b});
    }
    a.delamination = std::move(kept);
    return a;
}

std::optional<FreeCrystal> hole_fill(FreeCrystal a, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> holes;
    for (std::size_t c = 0; c < a.components.size(); ++c)
        for (std::size_t h = 0; h < a.components[c].holes.size(); ++h) holes.emplace_back(c, h);
    if (holes.empty()) return std::nullopt;
    const auto [c, h] = holes[rng.index(holes.size())];
    auto& hs = a.components[c].holes;
    hs.erase(hs.begin() + static_cast<std::ptrdiff_t>(h));
    return a;
}

std::optional<FreeCrystal> component_drop(FreeCrystal a, const Problem& p, Rng& rng) {
    if (a.components.empty()) return std::nullopt;
    a.components.erase(a.components.begin() + static_cast<std::ptrdiff_t>(rng.index(a.components.size())));
    prune_delamination(a, p.domain.snap_tol);
    return a;
}

std::optional<FreeCrystal> component_seed(FreeCrystal a, const Problem& p, Rng& rng) {
    constexpr int kSides = 12;
    if (vertex_count(a) + kSides > p.vertex_budget) return std::nullopt;
    const auto at = sample_in(p.domain.container, p.domain, rng, true);
    if (!at) return std::nullopt;
    const double r = std::sqrt(p.v / std::numbers::pi) * rng.uniform(0.1, 0.4);
    PolygonWithHoles c{make_regular_polygon(*at, r, kSides, rng.uniform(0.0, 1.0)), {}};
    c.normalize();
    a.components.push_back(std::move(c));
    return a;
}

}  // namespace

Proposal propose_move(const FreeCrystal& a, const Problem& p, MoveKind kind, double sigma, Rng& rng) {
    Proposal out{kind, std::nullopt};
    switch (kind) {
        case MoveKind::VertexShift: out.crystal = vertex_shift(a, p, sigma, rng); break;
        case MoveKind::EdgeSplit: out.crystal = edge_split(a, p, rng); break;
        case MoveKind::EdgeCollapse: out.crystal = edge_collapse(a, p, rng); break;
        case MoveKind::SlitGrow: out.crystal = slit_grow(a, p, sigma, rng); break;
        case MoveKind::SlitRetract: out.crystal = slit_retract(a, rng); break;
        case MoveKind::DelaminationToggle: out.crystal = delamination_toggle(a, p, rng); break;
        case MoveKind::HoleFill: out.crystal = hole_fill(a, rng); break;
        case MoveKind::ComponentDrop: out.crystal = component_drop(a, p, rng); break;
        case MoveKind::ComponentSeed: out.crystal = component_seed(a, p, rng); break;
    }
    if (!out.crystal) return out;
    FreeCrystal& c = *out.crystal;
    // Slit tags follow their location.
    for (auto& s : c.slits) {
        if (s.vertices.size() < 2) continue;
        const Vec2 mid = Segment{s.vertices[0], s.vertices[1]}.midpoint();
        FreeCrystal solid;
        solid.components = c.components;
        s.tag = locate(mid, solid, p.domain.snap_tol) == Location::Inside ? SlitTag::Crack : SlitTag::Filament;
    }
    if (p.volume == VolumeMode::Constrained && !c.components.empty()) {
        const double ar = area(c);
        if (ar > 0.0) {
            Vec2 ctr{};
            double wsum = 0.0;
            for (const auto& comp : c.components) {
                const double w = area(comp);
                ctr += ring_centroid(comp.outer) * w;
                wsum += w;
            }
            scale_about(c, ctr / wsum, std::sqrt(p.v / ar));
            prune_delamination(c, p.domain.snap_tol);
        }
    }
    return out;
}

}  // namespace sdri
