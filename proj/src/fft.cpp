#include "fxprobe/fft.h"

#include "fxprobe/errors.h"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

namespace fxprobe {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct RealFft::Impl {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
    }
};

RealFft::RealFft(std::size_t size) : size_(size), impl_(std::make_unique<Impl>()) {
    if (size < 2) throw DimensionError("FFT size must be >= 2");
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->real = fftw_alloc_real(size);
    impl_->spec = fftw_alloc_complex(size / 2 + 1);
    const int n = static_cast<int>(size);
    // FFTW_ESTIMATE plans are chosen without timing, so output is reproducible.
    impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
    if (in.size() != size_ || out.size() != bins()) throw DimensionError("FFT buffer size mismatch");
    std::copy(in.begin(), in.end(), impl_->real);
    fftw_execute(impl_->fwd);
    std::memcpy(static_cast<void*>(out.data()), impl_->spec, bins() * sizeof(fftw_complex));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    if (in.size() != bins() || out.size() != size_) throw DimensionError("FFT buffer size mismatch");
    std::memcpy(impl_->spec, in.data(), bins() * sizeof(fftw_complex));
    fftw_execute(impl_->inv);
    std::copy(impl_->real, impl_->real + size_, out.begin());
}

}  // namespace fxprobe
