#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// kernels::scalar and an AVX2 variant in kernels::avx2; the unqualified entry
// points dispatch at runtime on CPU support. Set SDRI_SIMD=scalar to force the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sdri/vec2.hpp"

namespace sdri::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
std::string_view to_string(Isa isa);
/// Overrides the detected ISA; requesting Avx2 on a CPU without it falls back to Scalar.
void force_isa(Isa isa);
bool avx2_supported();

/// Segments laid out structure-of-arrays for distance sweeps.
struct SegmentSoA {
    std::vector<double> ax, ay;    // start point
    std::vector<double> dx, dy;    // b - a
    std::vector<double> inv_len2;  // 1 / |b - a|^2, 0 for degenerate segments

    void push(const Segment& s);
    void clear();
    std::size_t size() const { return ax.size(); }
    bool empty() const { return ax.empty(); }
};

/// Per-triangle P1 strain-energy inputs, structure-of-arrays. Strains use Voigt
/// order (e11, e22, 2 e12); the material matrix D is symmetric 3x3 stored as
/// (D11, D12, D13, D22, D23, D33). Mismatch strain is sampled at the three edge
/// midpoints, which integrates quadratics exactly.
struct TriangleEnergyInput {
    std::size_t count = 0;
    const double* area = nullptr;
    const double* gx[3] = {};
    const double* gy[3] = {};
    const double* ux[3] = {};
    const double* uy[3] = {};
    const double* e0[3][3] = {};
    const double* d[6] = {};
};

namespace scalar {
double min_distance_sq(const SegmentSoA& segs, Vec2 p);
void min_distance_sq_batch(const SegmentSoA& segs, std::span<const Vec2> pts, std::span<double> out);
double shoelace(std::span<const double> xs, std::span<const double> ys);
void triangle_energies(const TriangleEnergyInput& in, std::span<double> out);
}  // namespace scalar

namespace avx2 {
double min_distance_sq(const SegmentSoA& segs, Vec2 p);
void min_distance_sq_batch(const SegmentSoA& segs, std::span<const Vec2> pts, std::span<double> out);
double shoelace(std::span<const double> xs, std::span<const double> ys);
void triangle_energies(const TriangleEnergyInput& in, std::span<double> out);
}  // namespace avx2

/// Squared distance from p to the nearest segment; +inf when segs is empty.
double min_distance_sq(const SegmentSoA& segs, Vec2 p);
void min_distance_sq_batch(const SegmentSoA& segs, std::span<const Vec2> pts, std::span<double> out);
/// Twice the signed area of the closed ring (xs[i], ys[i]).
double shoelace(std::span<const double> xs, std::span<const double> ys);
void triangle_energies(const TriangleEnergyInput& in, std::span<double> out);

}  // namespace sdri::kernels
