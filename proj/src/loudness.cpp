#include "fxprobe/loudness.h"

#include "fxprobe/errors.h"
#include "fxprobe/kernels.h"

#include <cmath>

namespace fxprobe {

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
};

// BS.1770-4 coefficients at 48 kHz: high-shelf stage then RLB high-pass.
constexpr Biquad kShelf{1.53512485958697, -2.69169618940638, 1.19839281085285, -1.69065929318241,
                        0.73248077421585};
constexpr Biquad kHighPass{1.0, -2.0, 1.0, -1.99004745483398, 0.99007225036621};

constexpr double kBlockSeconds = 0.4;
constexpr double kStepSeconds = 0.1;
constexpr double kAbsoluteGate = -70.0;
constexpr double kRelativeGate = -10.0;
constexpr double kOffset = -0.691;

void run_biquad(const Biquad& f, std::vector<double>& x) {
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (double& v : x) {
        const double y = f.b0 * v + f.b1 * x1 + f.b2 * x2 - f.a1 * y1 - f.a2 * y2;
        x2 = x1;
        x1 = v;
        y2 = y1;
        y1 = y;
        v = y;
    }
}

double block_loudness(double power) { return kOffset + 10.0 * std::log10(power); }

}  // namespace

std::vector<double> k_weight(std::span<const float> x) {
    std::vector<double> y(x.begin(), x.end());
    run_biquad(kShelf, y);
    run_biquad(kHighPass, y);
    return y;
}

LoudnessReport integrated_loudness(const AudioClip& clip) {
    if (clip.sample_rate != kSampleRate)
        throw ValidationError("loudness measurement requires 48 kHz audio");
    const auto block = static_cast<std::size_t>(std::lround(kBlockSeconds * clip.sample_rate));
    const auto step = static_cast<std::size_t>(std::lround(kStepSeconds * clip.sample_rate));
    if (clip.frames() < block) throw LengthError("clip shorter than one 400 ms loudness block");

    const std::size_t n_blocks = (clip.frames() - block) / step + 1;
    std::vector<double> power(n_blocks, 0.0);
    for (const auto& ch : clip.channels) {
        const auto z = k_weight(ch);
        for (std::size_t j = 0; j < n_blocks; ++j) {
            // unity channel weight for left/right
            power[j] += kernels::sum_squares(std::span<const double>(z).subspan(j * step, block)) /
                        static_cast<double>(block);
        }
    }

    const auto gated_mean = [&](double threshold, std::size_t& count) {
        double sum = 0.0;
        count = 0;
        for (double p : power) {
            if (p > 0.0 && block_loudness(p) > threshold) {
                sum += p;
                ++count;
            }
        }
        return count ? sum / static_cast<double>(count) : 0.0;
    };

    LoudnessReport report;
    std::size_t count = 0;
    const double abs_mean = gated_mean(kAbsoluteGate, count);
    if (count == 0) return report;
    const double rel_threshold = block_loudness(abs_mean) + kRelativeGate;
    const double mean = gated_mean(std::max(rel_threshold, kAbsoluteGate), count);
    if (count == 0) return report;
    report.integrated_lufs = block_loudness(mean);
    report.gated_block_count = count;
    return report;
}

AudioClip normalize_loudness(const AudioClip& clip, double target_lufs) {
    const auto report = integrated_loudness(clip);
    if (!std::isfinite(report.integrated_lufs))
        throw SilenceError("cannot normalize silent audio");
    const double gain = std::pow(10.0, (target_lufs - report.integrated_lufs) / 20.0);
    AudioClip out = clip;
    for (auto& ch : out.channels) kernels::scale(ch, static_cast<float>(gain));
    return out;
}

}  // namespace fxprobe
