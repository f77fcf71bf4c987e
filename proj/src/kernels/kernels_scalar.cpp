#include <algorithm>
#include <limits>

#include "sdri/kernels.hpp"

namespace sdri::kernels {

void SegmentSoA::push(const Segment& s) {
    const double dxv = s.b.x - s.a.x;
    const double dyv = s.b.y - s.a.y;
    const double l2 = dxv * dxv + dyv * dyv;
    ax.push_back(s.a.x);
    ay.push_back(s.a.y);
    dx.push_back(dxv);
    dy.push_back(dyv);
    inv_len2.push_back(l2 > 0.0 ? 1.0 / l2 : 0.0);
}

void SegmentSoA::clear() {
    ax.clear();
    ay.clear();
    dx.clear();
    dy.clear();
    inv_len2.clear();
}

namespace scalar {

double min_distance_sq(const SegmentSoA& segs, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = segs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double px = p.x - segs.ax[i];
        const double py = p.y - segs.ay[i];
        double t = (px * segs.dx[i] + py * segs.dy[i]) * segs.inv_len2[i];
        t = std::clamp(t, 0.0, 1.0);
        const double ex = px - t * segs.dx[i];
        const double ey = py - t * segs.dy[i];
        best = std::min(best, ex * ex + ey * ey);
    }
    return best;
}

void min_distance_sq_batch(const SegmentSoA& segs, std::span<const Vec2> pts, std::span<double> out) {
    for (std::size_t k = 0; k < pts.size(); ++k) out[k] = scalar::min_distance_sq(segs, pts[k]);
}

double shoelace(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1 == n) ? 0 : i + 1;
        s += xs[i] * ys[j] - xs[j] * ys[i];
    }
    return s;
}

void triangle_energies(const TriangleEnergyInput& in, std::span<double> out) {
    for (std::size_t t = 0; t < in.count; ++t) {
        double e11 = 0.0, e22 = 0.0, g12 = 0.0;
        for (int k = 0; k < 3; ++k) {
            e11 += in.gx[k][t] * in.ux[k][t];
            e22 += in.gy[k][t] * in.uy[k][t];
            g12 += in.gy[k][t] * in.ux[k][t] + in.gx[k][t] * in.uy[k][t];
        }
        const double d11 = in.d[0][t], d12 = in.d[1][t], d13 = in.d[2][t];
        const double d22 = in.d[3][t], d23 = in.d[4][t], d33 = in.d[5][t];
        double acc = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double a = e11 - in.e0[q][0][t];
            const double b = e22 - in.e0[q][1][t];
            const double c = g12 - in.e0[q][2][t];
            acc += d11 * a * a + d22 * b * b + d33 * c * c
                 + 2.0 * (d12 * a * b + d13 * a * c + d23 * b * c);
        }
        out[t] = in.area[t] * acc / 3.0;
    }
}

}  // namespace scalar
}  // namespace sdri::kernels
