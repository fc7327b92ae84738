#include "fxprobe/effects.h"
#include "fxprobe/fft.h"

#include <cmath>
#include <complex>
#include <numbers>

namespace fxprobe::fx {

namespace {

constexpr std::size_t kFrame = 2048;
constexpr std::size_t kHop = 512;

double wrap_phase(double p) {
    return p - 2.0 * std::numbers::pi * std::round(p / (2.0 * std::numbers::pi));
}

}  // namespace

std::vector<float> time_stretch(std::span<const float> x, std::size_t analysis_hop,
                                std::size_t synthesis_hop) {
    const std::size_t n = x.size();
    const std::size_t half = kFrame / 2;
    const std::size_t bins = kFrame / 2 + 1;
    const double ha = static_cast<double>(analysis_hop);
    const double hs = static_cast<double>(synthesis_hop);

    // frames are centred on k * analysis_hop; pad so every centre is readable
    std::vector<double> padded(n + kFrame + analysis_hop, 0.0);
    for (std::size_t i = 0; i < n; ++i) padded[i + half] = x[i];
    const std::size_t frames = n / analysis_hop + 1;

    std::vector<double> window(kFrame);
    for (std::size_t i = 0; i < kFrame; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / kFrame);

    const std::size_t out_len = (frames - 1) * synthesis_hop + kFrame;
    std::vector<double> acc(out_len, 0.0);
    std::vector<double> wsum(out_len, 0.0);

    RealFft fft(kFrame);
    std::vector<double> buf(kFrame);
    std::vector<std::complex<double>> spec(bins);
    std::vector<double> prev_phase(bins, 0.0), synth_phase(bins, 0.0);

    for (std::size_t k = 0; k < frames; ++k) {
        const std::size_t start = k * analysis_hop;
        for (std::size_t i = 0; i < kFrame; ++i) buf[i] = padded[start + i] * window[i];
        fft.forward(buf, spec);
        for (std::size_t b = 0; b < bins; ++b) {
            const double mag = std::abs(spec[b]);
            const double phase = std::arg(spec[b]);
            if (k == 0) {
                synth_phase[b] = phase;
            } else {
                const double omega = 2.0 * std::numbers::pi * static_cast<double>(b) / kFrame;
                const double deviation = wrap_phase(phase - prev_phase[b] - ha * omega);
                synth_phase[b] += hs * (omega + deviation / ha);
            }
            prev_phase[b] = phase;
            spec[b] = std::polar(mag, synth_phase[b]);
        }
        fft.inverse(spec, buf);
        const std::size_t out_start = k * synthesis_hop;
        for (std::size_t i = 0; i < kFrame; ++i) {
            acc[out_start + i] += buf[i] / kFrame * window[i];
            wsum[out_start + i] += window[i] * window[i];
        }
    }

    // drop the centring pad; output index m maps to input time m * ha / hs
    const auto stretched_len = static_cast<std::size_t>(std::floor(n * hs / ha));
    std::vector<float> y(stretched_len, 0.0f);
    for (std::size_t m = 0; m < stretched_len && m + half < out_len; ++m) {
        const double w = wsum[m + half];
        y[m] = w > 1e-6 ? static_cast<float>(acc[m + half] / w) : 0.0f;
    }
    return y;
}

std::vector<float> pitch_shift(std::span<const float> x, double semitones) {
    if (semitones == 0.0) return std::vector<float>(x.begin(), x.end());
    const double ratio = std::pow(2.0, semitones / 12.0);
    const auto hs = static_cast<std::size_t>(std::lround(kHop * ratio));
    const auto stretched = time_stretch(x, kHop, hs);
    // resample by the realized stretch so the pitch ratio is exactly hs / ha
    const double step = static_cast<double>(hs) / kHop;
    return sinc_resample(stretched, step, x.size());
}

}  // namespace fxprobe::fx
