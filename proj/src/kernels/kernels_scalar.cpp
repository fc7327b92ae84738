#include "fxprobe/kernels.h"

namespace fxprobe::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_squares_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void scale_f32_scalar(float* x, float g, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= g;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::scalar, dot_scalar, axpy_scalar, sum_squares_scalar,
                                   scale_f32_scalar};
    return table;
}

}  // namespace fxprobe::kernels
