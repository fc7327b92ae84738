#include "fxprobe/effects.h"

#include <array>
#include <cmath>

namespace fxprobe::fx {

namespace {

// Freeverb tunings at 44.1 kHz.
constexpr std::array<int, 8> kCombTuning = {1116, 1188, 1277, 1356, 1422, 1491, 1557, 1617};
constexpr std::array<int, 4> kAllpassTuning = {556, 441, 341, 225};
constexpr int kStereoSpread = 23;
constexpr double kFixedGain = 0.015;
constexpr double kScaleRoom = 0.28;
constexpr double kOffsetRoom = 0.7;
constexpr double kScaleDamp = 0.4;
constexpr double kAllpassFeedback = 0.5;

std::size_t scaled(int samples_44k, double fs) {
    return static_cast<std::size_t>(std::lround(samples_44k * fs / 44100.0));
}

class Comb {
public:
    Comb(std::size_t size, double feedback, double damp)
        : buffer_(size, 0.0), feedback_(feedback), damp1_(damp), damp2_(1.0 - damp) {}

    double process(double input) {
        const double output = buffer_[index_];
        store_ = output * damp2_ + store_ * damp1_;
        buffer_[index_] = input + store_ * feedback_;
        if (++index_ == buffer_.size()) index_ = 0;
        return output;
    }

private:
    std::vector<double> buffer_;
    std::size_t index_ = 0;
    double store_ = 0.0;
    double feedback_, damp1_, damp2_;
};

class Allpass {
public:
    explicit Allpass(std::size_t size) : buffer_(size, 0.0) {}

    double process(double input) {
        const double buffered = buffer_[index_];
        const double output = -input + buffered;
        buffer_[index_] = input + buffered * kAllpassFeedback;
        if (++index_ == buffer_.size()) index_ = 0;
        return output;
    }

private:
    std::vector<double> buffer_;
    std::size_t index_ = 0;
};

struct Tank {
    std::vector<Comb> combs;
    std::vector<Allpass> allpasses;

    Tank(double fs, int spread, double feedback, double damp) {
        for (int t : kCombTuning) combs.emplace_back(scaled(t + spread, fs), feedback, damp);
        for (int t : kAllpassTuning) allpasses.emplace_back(scaled(t + spread, fs));
    }

    double process(double input) {
        double out = 0.0;
        for (auto& c : combs) out += c.process(input);
        for (auto& a : allpasses) out = a.process(out);
        return out;
    }
};

}  // namespace

AudioClip reverb(const AudioClip& clip, double fs, double room_size, double damping, double wet,
                 double dry, double width) {
    const double feedback = kScaleRoom * room_size + kOffsetRoom;
    const double damp = kScaleDamp * damping;
    const double wet1 = wet * (width / 2.0 + 0.5);
    const double wet2 = wet * ((1.0 - width) / 2.0);

    Tank left(fs, 0, feedback, damp);
    Tank right(fs, kStereoSpread, feedback, damp);

    AudioClip out = clip;
    for (std::size_t i = 0; i < clip.frames(); ++i) {
        const double in_l = clip[0][i];
        const double in_r = clip[1][i];
        const double input = (in_l + in_r) * kFixedGain;
        const double out_l = left.process(input);
        const double out_r = right.process(input);
        out[0][i] = static_cast<float>(out_l * wet1 + out_r * wet2 + in_l * dry);
        out[1][i] = static_cast<float>(out_r * wet1 + out_l * wet2 + in_r * dry);
    }
    return out;
}

}  // namespace fxprobe::fx
