#include "fxprobe/audio_io.h"

#include "fxprobe/errors.h"

#include <cmath>
#include <numbers>

namespace fxprobe {
namespace {

constexpr int kHalfTaps = 32;        // 64 taps total
constexpr double kKaiserBeta = 8.6;
constexpr int kPhases = 1024;        // table resolution per unit of input time

/// Kaiser window sampled on [0, kHalfTaps] at 1/kPhases spacing. Symmetric,
/// so only the non-negative half is stored.
const std::vector<double>& kaiser_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kHalfTaps * kPhases + 2);
        const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = static_cast<double>(i) / (kHalfTaps * kPhases);
            t[i] = r >= 1.0 ? 0.0 : std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) / norm;
        }
        return t;
    }();
    return table;
}

double kaiser(double x) {
    const auto& t = kaiser_table();
    const double pos = std::abs(x) * kPhases;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= t.size()) return 0.0;
    const double f = pos - static_cast<double>(i);
    return t[i] + f * (t[i + 1] - t[i]);
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

}  // namespace

std::vector<float> sinc_resample(std::span<const float> in, double step, std::size_t out_len) {
    if (!(step > 0.0)) throw ValidationError("resample step must be positive");
    const double cutoff = std::min(1.0, 1.0 / step);
    // widen the kernel when low-passing so the transition band scales with it
    const double span = kHalfTaps / cutoff;
    const auto n_in = static_cast<std::ptrdiff_t>(in.size());

    std::vector<float> out(out_len, 0.0f);
    for (std::size_t n = 0; n < out_len; ++n) {
        const double p = static_cast<double>(n) * step;
        const auto lo = static_cast<std::ptrdiff_t>(std::ceil(p - span));
        const auto hi = static_cast<std::ptrdiff_t>(std::floor(p + span));
        double acc = 0.0;
        for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(lo, 0); k <= std::min(hi, n_in - 1); ++k) {
            const double x = p - static_cast<double>(k);
            acc += static_cast<double>(in[static_cast<std::size_t>(k)]) * cutoff * sinc(cutoff * x) *
                   kaiser(x / span * kHalfTaps);
        }
        out[n] = static_cast<float>(acc);
    }
    return out;
}

std::vector<float> resample_rate(std::span<const float> in, double from_hz, double to_hz) {
    if (!(from_hz > 0.0) || !(to_hz > 0.0)) throw ValidationError("sample rates must be positive");
    const double step = from_hz / to_hz;
    const auto out_len = static_cast<std::size_t>(std::floor(static_cast<double>(in.size()) / step));
    return sinc_resample(in, step, out_len);
}

}  // namespace fxprobe
