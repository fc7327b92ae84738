#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace fxprobe::kernels {

enum class Isa { scalar, avx2, neon };

/// Table of data-parallel inner loops. Every variant computes the same
/// mathematical result as the scalar reference; only summation order (and
/// FMA contraction) differ, so results agree to rounding.
struct KernelTable {
    Isa isa;
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
    // x *= g
    void (*scale_f32)(float* x, float g, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(FXPROBE_WITH_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(FXPROBE_WITH_NEON)
const KernelTable& neon_table();
#endif

/// Kernels selected once per process: the best ISA the CPU supports, unless
/// FXPROBE_SIMD=scalar|avx2|neon forces a choice.
const KernelTable& active();

/// Table for a specific ISA, or nullptr when it is not compiled in or the
/// CPU lacks it.
const KernelTable* table_for(Isa isa);

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}
inline double sum_squares(std::span<const double> x) {
    return active().sum_squares(x.data(), x.size());
}
inline void scale(std::span<float> x, float g) {
    active().scale_f32(x.data(), g, x.size());
}

}  // namespace fxprobe::kernels
