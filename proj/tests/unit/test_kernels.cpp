#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "sdri/kernels.hpp"
#include "sdri/random.hpp"

using namespace sdri;
namespace k = sdri::kernels;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

k::SegmentSoA random_segments(Rng& rng, std::size_t n) {
    k::SegmentSoA s;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        // Every seventh segment is degenerate.
        const Vec2 b = i % 7 == 3 ? a : Vec2{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        s.push({a, b});
    }
    return s;
}

}  // namespace

TEST_CASE("distance kernels agree") {
    if (!k::avx2_supported()) {
        MESSAGE("AVX2 not available; scalar path only");
        return;
    }
    Rng rng(17);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 257u}) {
        const auto segs = random_segments(rng, n);
        std::vector<Vec2> pts(37);
        for (auto& p : pts) p = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
        for (const auto& p : pts) {
            const double s = k::scalar::min_distance_sq(segs, p), v = k::avx2::min_distance_sq(segs, p);
            if (n == 0) {
                CHECK(s == std::numeric_limits<double>::infinity());
                CHECK(v == std::numeric_limits<double>::infinity());
            } else {
                CHECK(rel(s, v) <= 1e-12);
            }
        }
        std::vector<double> bs(pts.size()), bv(pts.size());
        k::scalar::min_distance_sq_batch(segs, pts, bs);
        k::avx2::min_distance_sq_batch(segs, pts, bv);
        for (std::size_t i = 0; i < pts.size() && n > 0; ++i) CHECK(rel(bs[i], bv[i]) <= 1e-12);
    }
}

TEST_CASE("shoelace kernels agree and match the unit square") {
    const std::vector<double> xs{0, 1, 1, 0}, ys{0, 0, 1, 1};
    CHECK(k::scalar::shoelace(xs, ys) == 2.0);
    CHECK(k::shoelace(xs, ys) == 2.0);
    if (!k::avx2_supported()) return;
    Rng rng(8);
    for (std::size_t n : {3u, 4u, 5u, 7u, 8u, 9u, 100u, 1001u}) {
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = 2.0 * 3.14159265358979 * i / n;
            const double r = rng.uniform(0.5, 1.5);
            x[i] = r * std::cos(t) + 10.0;
            y[i] = r * std::sin(t) - 4.0;
        }
        CHECK(rel(k::scalar::shoelace(x, y), k::avx2::shoelace(x, y)) <= 1e-12);
    }
}

TEST_CASE("triangle energy kernels agree") {
    if (!k::avx2_supported()) return;
    Rng rng(29);
    for (std::size_t n : {1u, 4u, 6u, 13u, 200u}) {
        std::vector<double> ar(n), g[2][3], u[2][3], e0[3][3], d[6];
        for (auto& a : ar) a = rng.uniform(0.01, 1.0);
        for (auto& gg : g)
            for (auto& v : gg) {
                v.resize(n);
                for (auto& x : v) x = rng.uniform(-3, 3);
            }
        for (auto& uu : u)
            for (auto& v : uu) {
                v.resize(n);
                for (auto& x : v) x = rng.uniform(-1, 1);
            }
        for (auto& ee : e0)
            for (auto& v : ee) {
                v.resize(n);
                for (auto& x : v) x = rng.uniform(-0.1, 0.1);
            }
        for (auto& v : d) {
            v.resize(n);
            for (auto& x : v) x = rng.uniform(0.1, 2.0);
        }
        k::TriangleEnergyInput in;
        in.count = n;
        in.area = ar.data();
        for (int j = 0; j < 3; ++j) {
            in.gx[j] = g[0][j].data();
            in.gy[j] = g[1][j].data();
            in.ux[j] = u[0][j].data();
            in.uy[j] = u[1][j].data();
            for (int c = 0; c < 3; ++c) in.e0[j][c] = e0[j][c].data();
        }
        for (int j = 0; j < 6; ++j) in.d[j] = d[j].data();
        std::vector<double> os(n), ov(n);
        k::scalar::triangle_energies(in, os);
        k::avx2::triangle_energies(in, ov);
        for (std::size_t i = 0; i < n; ++i) CHECK(rel(os[i], ov[i]) <= 1e-12);
    }
}

TEST_CASE("dispatch honours a forced ISA") {
    const k::Isa before = k::active_isa();
    k::force_isa(k::Isa::Scalar);
    CHECK(k::active_isa() == k::Isa::Scalar);
    k::force_isa(k::Isa::Avx2);
    CHECK(k::active_isa() == (k::avx2_supported() ? k::Isa::Avx2 : k::Isa::Scalar));
    k::force_isa(before);
}
