#include <atomic>
#include <cstdlib>
#include <cstring>

#include "sdri/kernels.hpp"

namespace sdri::kernels {

namespace {

Isa detect() {
    if (const char* env = std::getenv("SDRI_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return Isa::Scalar;
    }
    return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

bool avx2_supported() {
#if defined(SDRI_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
    current().store(isa, std::memory_order_relaxed);
}

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double min_distance_sq(const SegmentSoA& segs, Vec2 p) {
    return active_isa() == Isa::Avx2 ? avx2::min_distance_sq(segs, p) : scalar::min_distance_sq(segs, p);
}

void min_distance_sq_batch(const SegmentSoA& segs, std::span<const Vec2> pts, std::span<double> out) {
    if (active_isa() == Isa::Avx2)
        avx2::min_distance_sq_batch(segs, pts, out);
    else
        scalar::min_distance_sq_batch(segs, pts, out);
}

double shoelace(std::span<const double> xs, std::span<const double> ys) {
    return active_isa() == Isa::Avx2 ? avx2::shoelace(xs, ys) : scalar::shoelace(xs, ys);
}

void triangle_energies(const TriangleEnergyInput& in, std::span<double> out) {
    if (active_isa() == Isa::Avx2)
        avx2::triangle_energies(in, out);
    else
        scalar::triangle_energies(in, out);
}

}  // namespace sdri::kernels
