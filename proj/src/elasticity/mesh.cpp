#include "sdri/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "delaunay.hpp"
#include "sdri/error.hpp"
#include "sdri/kernels.hpp"

namespace sdri {

double Mesh::tri_area(std::size_t t) const {
    const auto& v = tris[t];
    return 0.5 * cross(points[v[1]] - points[v[0]], points[v[2]] - points[v[0]]);
}

double Mesh::min_angle_deg() const {
    double m = 180.0;
    for (const auto& v : tris) m = std::min(m, detail::min_angle_deg(points[v[0]], points[v[1]], points[v[2]]));
    return m;
}

double Mesh::region_area(Region r) const {
    double s = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t)
        if (region[t] == r) s += tri_area(t);
    return s;
}

namespace {

using EdgeKey = std::uint64_t;

EdgeKey edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<EdgeKey>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct Material {
    std::vector<const PolygonWithHoles*> film;
    std::vector<const PolygonWithHoles*> substrate;
    double tol;

    // (region, component) of the material containing p strictly.
    std::optional<std::pair<Region, int>> at(Vec2 p) const {
        for (std::size_t i = 0; i < film.size(); ++i)
            if (locate(p, *film[i], tol) == Location::Inside) return std::pair{Region::Film, static_cast<int>(i)};
        for (const auto* s : substrate)
            if (locate(p, *s, tol) == Location::Inside) return std::pair{Region::Substrate, -1};
        return std::nullopt;
    }
};

struct Pslg {
    std::vector<Vec2> pts;
    struct Seg {
        int a, b;
        bool cut;
    };
    std::vector<Seg> segs;
};

Pslg build_pslg(const FreeCrystal& a, const Material& mat, double tol) {
    struct Raw {
        Segment s;
        bool cut;
    };
    std::vector<Raw> raw;
    auto add_poly = [&](const PolygonWithHoles& p) {
        for (const auto& e : p.edges()) raw.push_back({e, false});
    };
    for (const auto* p : mat.film) add_poly(*p);
    for (const auto* p : mat.substrate) add_poly(*p);
    for (const auto& s : a.slits)
        if (s.tag == SlitTag::Crack)
            for (const auto& e : s.segments()) raw.push_back({e, true});

    Pslg g;
    auto add_point = [&](Vec2 p) {
        for (std::size_t i = 0; i < g.pts.size(); ++i)
            if (distance(g.pts[i], p) <= tol) return static_cast<int>(i);
        g.pts.push_back(p);
        return static_cast<int>(g.pts.size()) - 1;
    };
    std::vector<std::pair<int, int>> ends;
    for (const auto& r : raw) ends.emplace_back(add_point(r.s.a), add_point(r.s.b));
    for (const auto& j : a.delamination) {
        add_point(j.a);
        add_point(j.b);
    }

    std::map<std::pair<int, int>, bool> unique;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto [ia, ib] = ends[i];
        if (ia == ib) continue;
        const Segment s{g.pts[ia], g.pts[ib]};
        const Vec2 d = s.b - s.a;
        const double l2 = norm2(d);
        std::vector<std::pair<double, int>> on;
        on.emplace_back(0.0, ia);
        on.emplace_back(1.0, ib);
        for (std::size_t k = 0; k < g.pts.size(); ++k) {
            const int ki = static_cast<int>(k);
            if (ki == ia || ki == ib) continue;
            if (point_segment_distance(g.pts[k], s) > tol) continue;
            on.emplace_back(dot(g.pts[k] - s.a, d) / l2, ki);
        }
        std::sort(on.begin(), on.end());
        for (std::size_t k = 1; k < on.size(); ++k) {
            int p = on[k - 1].second, q = on[k].second;
            if (p == q) continue;
            auto key = std::minmax(p, q);
            unique[{key.first, key.second}] |= raw[i].cut;
        }
    }
    for (const auto& [key, cut] : unique) {
        bool c = cut;
        if (!c) {
            const Segment s{g.pts[key.first], g.pts[key.second]};
            const Vec2 mid = s.midpoint();
            for (const auto& j : a.delamination)
                if (collinear_overlap(j, s, tol) && point_segment_distance(mid, j) <= tol) c = true;
        }
        g.segs.push_back({key.first, key.second, c});
    }

    for (std::size_t i = 0; i < g.segs.size(); ++i) {
        const Segment si{g.pts[g.segs[i].a], g.pts[g.segs[i].b]};
        for (std::size_t j = i + 1; j < g.segs.size(); ++j) {
            const Segment sj{g.pts[g.segs[j].a], g.pts[g.segs[j].b]};
            if (segments_cross(si, sj, tol)) throw MeshError("constraint segments cross");
        }
    }
    return g;
}

struct Sub {
    int a, b;
    bool cut;
};

// Splits sub i at its midpoint; returns false if the midpoint collided with
// an existing vertex.
bool split_sub(detail::Delaunay& dt, std::vector<Sub>& subs, std::size_t i) {
    const Sub s = subs[i];
    const int before = dt.num_points();
    const int m = dt.insert((dt.point(s.a) + dt.point(s.b)) * 0.5);
    if (m < before) return false;
    subs[i] = {s.a, m, s.cut};
    subs.push_back({m, s.b, s.cut});
    return true;
}

std::unordered_set<EdgeKey> edge_set(const std::vector<std::array<int, 3>>& tris) {
    std::unordered_set<EdgeKey> e;
    e.reserve(tris.size() * 3);
    for (const auto& t : tris)
        for (int k = 0; k < 3; ++k) e.insert(edge_key(t[k], t[(k + 1) % 3]));
    return e;
}

void conform(detail::Delaunay& dt, std::vector<Sub>& subs, int max_points) {
    for (int pass = 0; pass < 64; ++pass) {
        if (dt.num_points() > max_points) throw MeshError("segment recovery exceeded its point budget");
        const auto edges = edge_set(dt.triangles());
        bool changed = false;
        const std::size_t n = subs.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (edges.count(edge_key(subs[i].a, subs[i].b))) continue;
            if (!split_sub(dt, subs, i)) throw MeshError("segment recovery collided with a vertex");
            changed = true;
        }
        if (!changed) return;
    }
    throw MeshError("segment recovery did not converge");
}

}  // namespace

Mesh triangulate(const FreeCrystal& a, const Domain& dom, double h, const MeshOptions& opt) {
    if (!(h > 0.0)) throw MeshError("mesh size must be positive");
    Material mat;
    mat.tol = dom.snap_tol;
    for (const auto& c : a.components) mat.film.push_back(&c);
    if (opt.include_substrate)
        for (const auto& s : dom.substrates) mat.substrate.push_back(&s);
    if (mat.film.empty() && mat.substrate.empty()) {
        Mesh empty;
        empty.h = h;
        return empty;
    }

    const Pslg g = build_pslg(a, mat, dom.snap_tol);

    BoundingBox box{g.pts.front(), g.pts.front()};
    for (const auto& p : g.pts) box.expand(p);
    const double merge_tol = std::min(dom.snap_tol, 1e-12 * box.diameter());
    detail::Delaunay dt(box, merge_tol);

    std::vector<int> id(g.pts.size());
    for (std::size_t i = 0; i < g.pts.size(); ++i) id[i] = dt.insert(g.pts[i]);

    std::vector<Sub> subs;
    kernels::SegmentSoA soa;
    for (const auto& s : g.segs) {
        const Vec2 pa = g.pts[s.a], pb = g.pts[s.b];
        soa.push({pa, pb});
        const int n = std::max(1, static_cast<int>(std::ceil(distance(pa, pb) / h - 1e-9)));
        int prev = id[s.a];
        for (int k = 1; k < n; ++k) {
            const int q = dt.insert(pa + (pb - pa) * (static_cast<double>(k) / n));
            subs.push_back({prev, q, s.cut});
            prev = q;
        }
        subs.push_back({prev, id[s.b], s.cut});
    }

    // Equilateral lattice fill, kept clear of the constraints.
    {
        std::vector<Vec2> cand;
        const double dy = h * std::sqrt(3.0) / 2.0;
        int row = 0;
        for (double y = box.lo.y + 0.5 * dy; y < box.hi.y; y += dy, ++row) {
            for (double x = box.lo.x + (row % 2 ? 0.5 * h : 0.0) + 0.25 * h; x < box.hi.x; x += h) {
                const Vec2 p{x, y};
                if (mat.at(p)) cand.push_back(p);
            }
        }
        std::vector<double> d2(cand.size());
        kernels::min_distance_sq_batch(soa, cand, d2);
        const double clear2 = 0.25 * h * h;
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (d2[i] >= clear2) dt.insert(cand[i]);
    }

    // Near-tangent constraints need splits down to their gap; such
    // configurations are rejected instead of meshed.
    conform(dt, subs, dt.num_points() + dt.num_points() / 8 + 20);

    // Quality refinement: circumcentres of skinny or oversized triangles,
    // diverted to segment midpoints when they encroach.
    const double target = opt.min_angle_deg + 0.5;
    const int budget = static_cast<int>(opt.refine_budget * dt.num_points()) + 1000;
    int added = 0;
    for (int round = 0; round < 200 && added < budget; ++round) {
        const auto tris = dt.triangles();
        std::unordered_set<EdgeKey> constrained;
        for (const auto& s : subs) constrained.insert(edge_key(s.a, s.b));
        std::vector<std::pair<Vec2, double>> centres;  // circumcentre, circumradius
        for (const auto& t : tris) {
            const Vec2 p0 = dt.point(t[0]), p1 = dt.point(t[1]), p2 = dt.point(t[2]);
            if (!mat.at((p0 + p1 + p2) / 3.0)) continue;
            const double ang = detail::min_angle_deg(p0, p1, p2);
            const Vec2 cc = detail::circumcenter(p0, p1, p2);
            const double r = distance(cc, p0);
            if (ang >= target && r <= h) continue;
            // Hairline features are left alone rather than graded down to.
            if (r <= h && r < opt.min_size_ratio * h) continue;
            // A small input angle between two constraints cannot be fixed; the
            // smallest angle lies between the two longest edges.
            std::array<std::pair<double, EdgeKey>, 3> e{{{distance(p0, p1), edge_key(t[0], t[1])},
                                                          {distance(p1, p2), edge_key(t[1], t[2])},
                                                          {distance(p2, p0), edge_key(t[2], t[0])}}};
            std::sort(e.begin(), e.end());
            if (ang < target && r <= h && constrained.count(e[1].second) && constrained.count(e[2].second)) continue;
            centres.emplace_back(cc, r);
        }
        if (centres.empty()) break;
        int inserted = 0;
        std::vector<char> split(subs.size(), 0);
        // Neighbouring skinny triangles often share a circumcircle; one insertion per cluster.
        std::vector<Vec2> placed;
        for (const auto& [cc, rad] : centres) {
            if (std::any_of(placed.begin(), placed.end(), [&](Vec2 q) { return distance(q, cc) < 0.5 * rad; })) continue;
            placed.push_back(cc);
            std::optional<std::size_t> enc;
            for (std::size_t i = 0; i < split.size(); ++i) {
                const Vec2 sa = dt.point(subs[i].a), sb = dt.point(subs[i].b);
                if (distance(cc, (sa + sb) * 0.5) < 0.5 * distance(sa, sb)) {
                    enc = i;
                    break;
                }
            }
            if (enc) {
                if (split[*enc]) continue;
                if (distance(dt.point(subs[*enc].a), dt.point(subs[*enc].b)) < 2.0 * opt.min_size_ratio * h) continue;
                split[*enc] = 1;
                if (split_sub(dt, subs, *enc)) ++inserted;
            } else if (mat.at(cc)) {
                const int before = dt.num_points();
                if (dt.insert(cc) >= before) ++inserted;
            }
        }
        added += inserted;
        conform(dt, subs, std::numeric_limits<int>::max());
        if (inserted == 0) break;
    }

    // Collect material triangles and compact the point set.
    Mesh m;
    m.h = h;
    const auto tris = dt.triangles();
    std::vector<int> remap(dt.num_points(), -1);
    for (const auto& t : tris) {
        const Vec2 c = (dt.point(t[0]) + dt.point(t[1]) + dt.point(t[2])) / 3.0;
        const auto where = mat.at(c);
        if (!where) continue;
        std::array<int, 3> v{};
        for (int k = 0; k < 3; ++k) {
            if (remap[t[k]] < 0) {
                remap[t[k]] = static_cast<int>(m.points.size());
                m.points.push_back(dt.point(t[k]));
            }
            v[k] = remap[t[k]];
        }
        m.tris.push_back(v);
        m.region.push_back(where->first);
        m.component.push_back(where->second);
    }
    for (const auto& s : subs) {
        if (remap[s.a] < 0 || remap[s.b] < 0) continue;
        auto e = std::minmax(remap[s.a], remap[s.b]);
        m.constraint_edges.emplace_back(e.first, e.second);
        if (s.cut) m.cut_edges.emplace_back(e.first, e.second);
    }
    std::sort(m.constraint_edges.begin(), m.constraint_edges.end());
    std::sort(m.cut_edges.begin(), m.cut_edges.end());

    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        const auto& v = m.tris[t];
        if (m.tri_area(t) <= 0.0 ||
            detail::min_angle_deg(m.points[v[0]], m.points[v[1]], m.points[v[2]]) < 0.5) {
            const Vec2 c = (m.points[v[0]] + m.points[v[1]] + m.points[v[2]]) / 3.0;
            char buf[96];
            std::snprintf(buf, sizeof buf, "sliver %s triangle near (%.6g, %.6g)",
                          m.region[t] == Region::Film ? "film" : "substrate", c.x, c.y);
            throw MeshError(buf);
        }
    }
    assign_nodes(m);
    return m;
}

void assign_nodes(Mesh& m) {
    const int np = static_cast<int>(m.points.size());
    std::unordered_set<EdgeKey> cut;
    for (const auto& [a, b] : m.cut_edges) cut.insert(edge_key(a, b));

    std::vector<std::vector<int>> incident(np);
    for (std::size_t t = 0; t < m.tris.size(); ++t)
        for (int v : m.tris[t]) incident[v].push_back(static_cast<int>(t));

    m.node_point.resize(np);
    std::iota(m.node_point.begin(), m.node_point.end(), 0);
    m.tri_nodes = m.tris;
    m.doubled.clear();

    std::vector<int> parent;
    for (int p = 0; p < np; ++p) {
        const auto& inc = incident[p];
        if (inc.size() < 2) continue;
        parent.assign(inc.size(), 0);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        // Triangles around p that share an uncut edge (p, q) stay together.
        std::unordered_map<int, int> seen;
        for (std::size_t i = 0; i < inc.size(); ++i) {
            for (int q : m.tris[inc[i]]) {
                if (q == p || cut.count(edge_key(p, q))) continue;
                auto [it, fresh] = seen.try_emplace(q, static_cast<int>(i));
                if (!fresh) parent[find(static_cast<int>(i))] = find(it->second);
            }
        }
        std::unordered_map<int, int> node_of_root;
        for (std::size_t i = 0; i < inc.size(); ++i) {
            const int r = find(static_cast<int>(i));
            auto it = node_of_root.find(r);
            int node;
            if (it != node_of_root.end()) {
                node = it->second;
            } else if (node_of_root.empty()) {
                node = p;
                node_of_root[r] = node;
            } else {
                node = static_cast<int>(m.node_point.size());
                m.node_point.push_back(p);
                m.doubled.emplace_back(p, node);
                node_of_root[r] = node;
            }
            auto& tn = m.tri_nodes[inc[i]];
            for (int k = 0; k < 3; ++k)
                if (m.tris[inc[i]][k] == p) tn[k] = node;
        }
    }
}

Mesh refine_uniform(const Mesh& in) {
    Mesh m;
    m.h = 0.5 * in.h;
    m.points = in.points;
    std::unordered_map<EdgeKey, int> mid;
    auto midpoint = [&](int a, int b) {
        auto [it, fresh] = mid.try_emplace(edge_key(a, b), 0);
        if (fresh) {
            it->second = static_cast<int>(m.points.size());
            m.points.push_back((in.points[a] + in.points[b]) * 0.5);
        }
        return it->second;
    };
    for (std::size_t t = 0; t < in.tris.size(); ++t) {
        const auto [a, b, c] = in.tris[t];
        const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        for (const auto& v : {std::array{a, ab, ca}, std::array{ab, b, bc}, std::array{ca, bc, c}, std::array{ab, bc, ca}}) {
            m.tris.push_back(v);
            m.region.push_back(in.region[t]);
            m.component.push_back(in.component[t]);
        }
    }
    auto split_edges = [&](const std::vector<std::pair<int, int>>& src, std::vector<std::pair<int, int>>& dst) {
        for (const auto& [a, b] : src) {
            const int c = midpoint(a, b);
            dst.emplace_back(std::min(a, c), std::max(a, c));
            dst.emplace_back(std::min(c, b), std::max(c, b));
        }
        std::sort(dst.begin(), dst.end());
    };
    split_edges(in.constraint_edges, m.constraint_edges);
    split_edges(in.cut_edges, m.cut_edges);
    assign_nodes(m);
    return m;
}

}  // namespace sdri
