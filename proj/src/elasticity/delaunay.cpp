#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace sdri::detail {

double in_circle_det(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    const double adx = a.x - p.x, ady = a.y - p.y;
    const double bdx = b.x - p.x, bdy = b.y - p.y;
    const double cdx = c.x - p.x, cdy = c.y - p.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = norm2(ab);
    const double ac2 = norm2(ac);
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

double min_angle_deg(Vec2 a, Vec2 b, Vec2 c) {
    auto ang = [](Vec2 p, Vec2 q, Vec2 r) {
        const Vec2 u = q - p;
        const Vec2 v = r - p;
        return std::atan2(std::abs(cross(u, v)), dot(u, v));
    };
    const double m = std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
    return m * 180.0 / std::numbers::pi;
}

Delaunay::Delaunay(const BoundingBox& box, double merge_tol) : merge_tol_(merge_tol) {
    const Vec2 c = (box.lo + box.hi) * 0.5;
    const double r = std::max(box.diameter(), 1e-12) * 20.0;
    pts_.push_back(c + Vec2{-r, -r});
    pts_.push_back(c + Vec2{r, -r});
    pts_.push_back(c + Vec2{0.0, r});
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
}

int Delaunay::new_tri(std::array<int, 3> v) {
    if (!free_.empty()) {
        const int i = free_.back();
        free_.pop_back();
        tris_[i] = {v, {-1, -1, -1}, true};
        return i;
    }
    tris_.push_back({v, {-1, -1, -1}, true});
    return static_cast<int>(tris_.size()) - 1;
}

bool Delaunay::in_circle(const Tri& t, Vec2 p) const {
    return in_circle_det(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p) > 0.0;
}

int Delaunay::locate(Vec2 p) const {
    int t = last_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
        t = 0;
        while (!tris_[t].alive) ++t;
    }
    // Walk; bail out to a linear scan if the walk cycles.
    const std::size_t limit = tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
        const Tri& tr = tris_[t];
        int next = -1;
        for (int i = 0; i < 3; ++i) {
            const Vec2 a = pts_[tr.v[(i + 1) % 3]];
            const Vec2 b = pts_[tr.v[(i + 2) % 3]];
            if (orient(a, b, p) < 0.0 && tr.n[i] >= 0) {
                next = tr.n[i];
                break;
            }
        }
        if (next < 0) return t;
        t = next;
    }
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
        const Tri& tr = tris_[i];
        if (!tr.alive) continue;
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k)
            inside = orient(pts_[tr.v[(k + 1) % 3]], pts_[tr.v[(k + 2) % 3]], p) >= 0.0;
        if (inside) return i;
    }
    return t;
}

int Delaunay::insert(Vec2 p) {
    const int t0 = locate(p);
    for (int k = 0; k < 3; ++k) {
        const int v = tris_[t0].v[k];
        if (v >= 3 && distance(pts_[v], p) <= merge_tol_) return v - 3;
    }

    const int pid = static_cast<int>(pts_.size());
    pts_.push_back(p);

    // Cavity by flood fill over in-circle neighbours.
    std::vector<int> cavity{t0};
    std::vector<char> in_cav(tris_.size(), 0);
    in_cav[t0] = 1;
    // A point on an edge of t0 must take the neighbour across that edge too.
    for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t0].n[i];
        if (nb < 0) continue;
        const Vec2 a = pts_[tris_[t0].v[(i + 1) % 3]];
        const Vec2 b = pts_[tris_[t0].v[(i + 2) % 3]];
        if (std::abs(orient(a, b, p)) <= 1e-14 * norm2(b - a) && !in_cav[nb]) {
            in_cav[nb] = 1;
            cavity.push_back(nb);
        }
    }
    for (std::size_t q = 0; q < cavity.size(); ++q) {
        const Tri& tr = tris_[cavity[q]];
        for (int i = 0; i < 3; ++i) {
            const int nb = tr.n[i];
            if (nb < 0 || in_cav[nb]) continue;
            if (in_circle(tris_[nb], p)) {
                in_cav[nb] = 1;
                cavity.push_back(nb);
            }
        }
    }

    struct Edge {
        int a, b, outside;
    };
    std::vector<Edge> boundary;
    // Shrink the cavity until it is star-shaped from p (guards round-off).
    for (;;) {
        boundary.clear();
        int bad = -1;
        for (int t : cavity) {
            if (!in_cav[t]) continue;
            const Tri& tr = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int nb = tr.n[i];
                if (nb >= 0 && in_cav[nb]) continue;
                const int a = tr.v[(i + 1) % 3];
                const int b = tr.v[(i + 2) % 3];
                if (orient(pts_[a], pts_[b], p) <= 0.0 && bad < 0 && t != t0) bad = t;
                boundary.push_back({a, b, nb});
            }
        }
        if (bad < 0) break;
        in_cav[bad] = 0;
    }

    std::vector<int> removed;
    for (int t : cavity)
        if (in_cav[t]) removed.push_back(t);
    for (int t : removed) {
        tris_[t].alive = false;
        free_.push_back(t);
    }

    std::unordered_map<int, int> by_start;
    std::unordered_map<int, int> by_end;
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
        const int t = new_tri({e.a, e.b, pid});
        if (static_cast<std::size_t>(t) >= in_cav.size()) in_cav.resize(t + 1, 0);
        in_cav[t] = 0;
        tris_[t].n[2] = e.outside;
        if (e.outside >= 0) {
            Tri& o = tris_[e.outside];
            for (int i = 0; i < 3; ++i) {
                const int oa = o.v[(i + 1) % 3];
                const int ob = o.v[(i + 2) % 3];
                if (oa == e.b && ob == e.a) o.n[i] = t;
            }
        }
        by_start[e.a] = t;
        by_end[e.b] = t;
        created.push_back(t);
    }
    for (int t : created) {
        Tri& tr = tris_[t];
        // Edge opposite a is (b, p), shared with the triangle starting at b.
        auto it = by_start.find(tr.v[1]);
        tr.n[0] = it == by_start.end() ? -1 : it->second;
        // Edge opposite b is (p, a), shared with the triangle ending at a.
        auto jt = by_end.find(tr.v[0]);
        tr.n[1] = jt == by_end.end() ? -1 : jt->second;
    }
    last_ = created.empty() ? 0 : created.front();
    return pid - 3;
}

std::vector<std::array<int, 3>> Delaunay::triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
        if (!t.alive) continue;
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
        out.push_back({t.v[0] - 3, t.v[1] - 3, t.v[2] - 3});
    }
    return out;
}

}  // namespace sdri::detail
