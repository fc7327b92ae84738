#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace fxprobe {

/// Real-input FFT of a fixed size backed by FFTW. Each instance owns its
/// plan and aligned buffers, so instances may be used concurrently from
/// different threads (planning itself is serialized internally).
class RealFft {
public:
    explicit RealFft(std::size_t size);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&&) noexcept;
    RealFft& operator=(RealFft&&) noexcept;

    std::size_t size() const { return size_; }
    std::size_t bins() const { return size_ / 2 + 1; }

    /// Unnormalized forward transform; `out` must hold bins() values.
    void forward(std::span<const double> in, std::span<std::complex<double>> out);
    /// Unnormalized inverse transform (result scaled by size()).
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    struct Impl;
    std::size_t size_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fxprobe
