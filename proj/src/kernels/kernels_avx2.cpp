// Compiled with -mavx2; only reached through dispatch when the CPU reports AVX2.

#include <algorithm>
#include <limits>

#include "sdri/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace sdri::kernels::avx2 {

#if defined(__AVX2__)

namespace {

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    hi = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_min_sd(lo, hi));
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    hi = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, hi));
}

}  // namespace

double min_distance_sq(const SegmentSoA& segs, Vec2 p) {
    const std::size_t n = segs.size();
    const __m256d pxv = _mm256_set1_pd(p.x);
    const __m256d pyv = _mm256_set1_pd(p.y);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ax = _mm256_loadu_pd(&segs.ax[i]);
        const __m256d ay = _mm256_loadu_pd(&segs.ay[i]);
        const __m256d dx = _mm256_loadu_pd(&segs.dx[i]);
        const __m256d dy = _mm256_loadu_pd(&segs.dy[i]);
        const __m256d il = _mm256_loadu_pd(&segs.inv_len2[i]);
        const __m256d px = _mm256_sub_pd(pxv, ax);
        const __m256d py = _mm256_sub_pd(pyv, ay);
        __m256d t = _mm256_add_pd(_mm256_mul_pd(px, dx), _mm256_mul_pd(py, dy));
        t = _mm256_mul_pd(t, il);
        t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
        const __m256d ex = _mm256_sub_pd(px, _mm256_mul_pd(t, dx));
        const __m256d ey = _mm256_sub_pd(py, _mm256_mul_pd(t, dy));
        const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
        best = _mm256_min_pd(best, d2);
    }
    double b = hmin(best);
    for (; i < n; ++i) {
        const double px = p.x - segs.ax[i];
        const double py = p.y - segs.ay[i];
        double t = (px * segs.dx[i] + py * segs.dy[i]) * segs.inv_len2[i];
        t = std::clamp(t, 0.0, 1.0);
        const double ex = px - t * segs.dx[i];
        const double ey = py - t * segs.dy[i];
        b = std::min(b, ex * ex + ey * ey);
    }
    return b;
}

void min_distance_sq_batch(const SegmentSoA& segs, std::span<const Vec2> pts, std::span<double> out) {
    for (std::size_t k = 0; k < pts.size(); ++k) out[k] = avx2::min_distance_sq(segs, pts[k]);
}

double shoelace(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 3) return 0.0;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    // Vector body covers pairs (i, i+1) with i+1 < n.
    for (; i + 5 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(&xs[i]);
        const __m256d y0 = _mm256_loadu_pd(&ys[i]);
        const __m256d x1 = _mm256_loadu_pd(&xs[i + 1]);
        const __m256d y1 = _mm256_loadu_pd(&ys[i + 1]);
        acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_mul_pd(x0, y1), _mm256_mul_pd(x1, y0)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const std::size_t j = (i + 1 == n) ? 0 : i + 1;
        s += xs[i] * ys[j] - xs[j] * ys[i];
    }
    return s;
}

void triangle_energies(const TriangleEnergyInput& in, std::span<double> out) {
    const std::size_t n = in.count;
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d third = _mm256_set1_pd(1.0 / 3.0);
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        __m256d e11 = _mm256_setzero_pd();
        __m256d e22 = _mm256_setzero_pd();
        __m256d g12 = _mm256_setzero_pd();
        for (int k = 0; k < 3; ++k) {
            const __m256d gx = _mm256_loadu_pd(in.gx[k] + t);
            const __m256d gy = _mm256_loadu_pd(in.gy[k] + t);
            const __m256d ux = _mm256_loadu_pd(in.ux[k] + t);
            const __m256d uy = _mm256_loadu_pd(in.uy[k] + t);
            e11 = _mm256_add_pd(e11, _mm256_mul_pd(gx, ux));
            e22 = _mm256_add_pd(e22, _mm256_mul_pd(gy, uy));
            g12 = _mm256_add_pd(g12, _mm256_add_pd(_mm256_mul_pd(gy, ux), _mm256_mul_pd(gx, uy)));
        }
        const __m256d d11 = _mm256_loadu_pd(in.d[0] + t);
        const __m256d d12 = _mm256_loadu_pd(in.d[1] + t);
        const __m256d d13 = _mm256_loadu_pd(in.d[2] + t);
        const __m256d d22 = _mm256_loadu_pd(in.d[3] + t);
        const __m256d d23 = _mm256_loadu_pd(in.d[4] + t);
        const __m256d d33 = _mm256_loadu_pd(in.d[5] + t);
        __m256d acc = _mm256_setzero_pd();
        for (int q = 0; q < 3; ++q) {
            const __m256d a = _mm256_sub_pd(e11, _mm256_loadu_pd(in.e0[q][0] + t));
            const __m256d b = _mm256_sub_pd(e22, _mm256_loadu_pd(in.e0[q][1] + t));
            const __m256d c = _mm256_sub_pd(g12, _mm256_loadu_pd(in.e0[q][2] + t));
            __m256d diag = _mm256_add_pd(_mm256_mul_pd(d11, _mm256_mul_pd(a, a)),
                                         _mm256_mul_pd(d22, _mm256_mul_pd(b, b)));
            diag = _mm256_add_pd(diag, _mm256_mul_pd(d33, _mm256_mul_pd(c, c)));
            __m256d off = _mm256_add_pd(_mm256_mul_pd(d12, _mm256_mul_pd(a, b)),
                                        _mm256_mul_pd(d13, _mm256_mul_pd(a, c)));
            off = _mm256_add_pd(off, _mm256_mul_pd(d23, _mm256_mul_pd(b, c)));
            acc = _mm256_add_pd(acc, _mm256_add_pd(diag, _mm256_mul_pd(two, off)));
        }
        const __m256d area = _mm256_loadu_pd(in.area + t);
        _mm256_storeu_pd(out.data() + t, _mm256_mul_pd(_mm256_mul_pd(area, acc), third));
    }
    if (t < n) {
        TriangleEnergyInput tail = in;
        tail.count = n - t;
        tail.area += t;
        for (int k = 0; k < 3; ++k) {
            tail.gx[k] += t;
            tail.gy[k] += t;
            tail.ux[k] += t;
            tail.uy[k] += t;
            for (int c = 0; c < 3; ++c) tail.e0[k][c] += t;
        }
        for (auto& dk : tail.d) dk += t;
        scalar::triangle_energies(tail, out.subspan(t));
    }
}

#else  // !__AVX2__

double min_distance_sq(const SegmentSoA& segs, Vec2 p) { return scalar::min_distance_sq(segs, p); }
void min_distance_sq_batch(const SegmentSoA& segs, std::span<const Vec2> pts, std::span<double> out) {
    scalar::min_distance_sq_batch(segs, pts, out);
}
double shoelace(std::span<const double> xs, std::span<const double> ys) { return scalar::shoelace(xs, ys); }
void triangle_energies(const TriangleEnergyInput& in, std::span<double> out) { scalar::triangle_energies(in, out); }

#endif

}  // namespace sdri::kernels::avx2
