#include "fxprobe/effects.h"

#include "fxprobe/errors.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fxprobe {

namespace {

constexpr std::array<std::string_view, kNumEffects> kNames = {"CHS", "CLN", "CMP", "DLY", "DIS",
                                                              "HPF", "LPF", "PS",  "RVB", "TRV"};

struct ParamDefault {
    const char* name;
    double value;
};

const std::vector<ParamDefault>& defaults_for(EffectId id) {
    static const std::array<std::vector<ParamDefault>, kNumEffects> table = {{
        /*CHS*/ {{"rate_hz", 1.0}, {"depth", 0.25}, {"centre_delay_ms", 7.0}, {"feedback", 0.0}, {"mix", 0.5}},
        /*CLN*/ {},
        /*CMP*/ {{"threshold_db", -50.0}, {"ratio", 5.0}, {"attack_ms", 1.0}, {"release_ms", 100.0}},
        /*DLY*/ {{"delay_s", 0.5}, {"feedback", 0.0}, {"mix", 0.5}},
        /*DIS*/ {{"drive_db", 25.0}},
        /*HPF*/ {{"cutoff_hz", 2000.0}},
        /*LPF*/ {{"cutoff_hz", 70.0}},
        /*PS */ {{"semitones", 4.0}},
        /*RVB*/ {{"room_size", 0.8}, {"damping", 0.5}, {"wet", 0.33}, {"dry", 0.4}, {"width", 1.0}},
        /*TRV*/ {},
    }};
    return table[effect_index(id)];
}

void require(bool ok, const EffectSpec& spec, const std::string& what) {
    if (!ok)
        throw ValidationError(std::string(effect_name(spec.id)) + ": " + what);
}

}  // namespace

std::string_view effect_name(EffectId id) { return kNames[effect_index(id)]; }

EffectId parse_effect(std::string_view name) {
    for (std::size_t i = 0; i < kNumEffects; ++i)
        if (kNames[i] == name) return kAllEffects[i];
    if (name == "DST") return EffectId::DIS;
    throw ValidationError("unknown effect id '" + std::string(name) + "'");
}

const std::vector<std::string>& effect_param_names(EffectId id) {
    static const std::array<std::vector<std::string>, kNumEffects> names = [] {
        std::array<std::vector<std::string>, kNumEffects> out;
        for (EffectId e : kAllEffects)
            for (const auto& d : defaults_for(e)) out[effect_index(e)].emplace_back(d.name);
        return out;
    }();
    return names[effect_index(id)];
}

double EffectSpec::param(const std::string& name) const {
    if (auto it = params.find(name); it != params.end()) return it->second;
    for (const auto& d : defaults_for(id))
        if (name == d.name) return d.value;
    throw ValidationError(std::string(effect_name(id)) + " has no parameter '" + name + "'");
}

EffectSpec fixed_spec(EffectId id) {
    EffectSpec spec{id, {}};
    for (const auto& d : defaults_for(id)) spec.params[d.name] = d.value;
    return spec;
}

void EffectSpec::validate() const {
    const auto& names = effect_param_names(id);
    for (const auto& [name, value] : params) {
        require(std::find(names.begin(), names.end(), name) != names.end(), *this,
                "unknown parameter '" + name + "'");
        require(std::isfinite(value), *this, "parameter '" + name + "' is not finite");
    }
    const auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    switch (id) {
    case EffectId::CLN:
    case EffectId::TRV:
        break;
    case EffectId::CHS:
        require(param("rate_hz") > 0.0, *this, "rate_hz must be > 0");
        require(in(param("depth"), 0.0, 1.0), *this, "depth must be in [0,1]");
        require(param("centre_delay_ms") > 0.0, *this, "centre_delay_ms must be > 0");
        require(std::abs(param("feedback")) < 1.0, *this, "feedback must be in (-1,1)");
        require(in(param("mix"), 0.0, 1.0), *this, "mix must be in [0,1]");
        break;
    case EffectId::CMP:
        require(param("ratio") >= 1.0, *this, "ratio must be >= 1");
        require(param("attack_ms") > 0.0 && param("release_ms") > 0.0, *this,
                "attack_ms and release_ms must be > 0");
        break;
    case EffectId::DLY:
        require(param("delay_s") >= 0.0, *this, "delay_s must be >= 0");
        require(in(param("feedback"), 0.0, 1.0) && param("feedback") < 1.0, *this,
                "feedback must be in [0,1)");
        require(in(param("mix"), 0.0, 1.0), *this, "mix must be in [0,1]");
        break;
    case EffectId::DIS:
        break;
    case EffectId::HPF:
    case EffectId::LPF:
        require(param("cutoff_hz") > 0.0 && param("cutoff_hz") < 24000.0, *this,
                "cutoff_hz must be in (0, 24000)");
        break;
    case EffectId::PS:
        require(std::abs(param("semitones")) <= 24.0, *this, "semitones must be within +-24");
        break;
    case EffectId::RVB:
        require(in(param("room_size"), 0.0, 1.0), *this, "room_size must be in [0,1]");
        require(in(param("damping"), 0.0, 1.0), *this, "damping must be in [0,1]");
        require(param("wet") >= 0.0 && param("dry") >= 0.0, *this, "wet/dry must be >= 0");
        require(in(param("width"), 0.0, 1.0), *this, "width must be in [0,1]");
        break;
    }
}

void SweepSpec::validate() const {
    const auto& names = effect_param_names(id);
    if (std::find(names.begin(), names.end(), param) == names.end())
        throw ValidationError("sweep: " + std::string(effect_name(id)) + " has no parameter '" + param + "'");
    if (steps < 2) throw ValidationError("sweep: steps must be >= 2");
    if (!std::isfinite(min) || !std::isfinite(max)) throw ValidationError("sweep: non-finite range");
    if (scale == SweepScale::log && !(min > 0.0))
        throw ValidationError("sweep: log scale requires min > 0");
}

std::vector<SweepSpec> default_sweeps() {
    return {
        {EffectId::DIS, "drive_db", 0.0, 30.0, 32, SweepScale::linear},
        {EffectId::RVB, "room_size", 0.01, 0.99, 32, SweepScale::linear},
        {EffectId::HPF, "cutoff_hz", 50.0, 10000.0, 32, SweepScale::log},
        {EffectId::LPF, "cutoff_hz", 50.0, 10000.0, 32, SweepScale::log},
    };
}

std::vector<double> sweep_values(const SweepSpec& sweep) {
    sweep.validate();
    std::vector<double> v(static_cast<std::size_t>(sweep.steps));
    const double last = sweep.steps - 1;
    for (int i = 0; i < sweep.steps; ++i) {
        if (sweep.scale == SweepScale::linear)
            v[i] = sweep.min + i * (sweep.max - sweep.min) / last;
        else
            v[i] = sweep.min * std::pow(sweep.max / sweep.min, i / last);
    }
    // pin the endpoints against rounding in pow
    v.front() = sweep.min;
    v.back() = sweep.max;
    return v;
}

std::vector<EffectSpec> sweep_specs(const SweepSpec& sweep) {
    std::vector<EffectSpec> out;
    for (double value : sweep_values(sweep)) {
        EffectSpec spec = fixed_spec(sweep.id);
        spec.params[sweep.param] = value;
        spec.validate();
        out.push_back(std::move(spec));
    }
    return out;
}

namespace fx {

std::vector<float> chorus(std::span<const float> x, double fs, double rate_hz, double depth,
                          double centre_delay_ms, double feedback, double mix) {
    const std::size_t n = x.size();
    const double d0 = centre_delay_ms * 1e-3 * fs;
    const double max_delay = d0 * (1.0 + depth) + 2.0;
    std::size_t cap = 1;
    while (cap < static_cast<std::size_t>(max_delay) + 2) cap <<= 1;
    std::vector<double> line(cap, 0.0);
    const std::size_t mask = cap - 1;

    std::vector<float> y(n);
    const double w = 2.0 * std::numbers::pi * rate_hz / fs;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = d0 * (1.0 + depth * std::sin(w * static_cast<double>(i)));
        const double read = static_cast<double>(i) - d;
        const double base = std::floor(read);
        const double frac = read - base;
        const auto k = static_cast<std::int64_t>(base);
        const auto tap = [&](std::int64_t idx) {
            return idx < 0 ? 0.0 : line[static_cast<std::size_t>(idx) & mask];
        };
        const double delayed = (1.0 - frac) * tap(k) + frac * tap(k + 1);
        line[i & mask] = x[i] + feedback * delayed;
        y[i] = static_cast<float>((1.0 - mix) * x[i] + mix * delayed);
    }
    return y;
}

AudioClip compressor(const AudioClip& clip, double threshold_db, double ratio, double attack_ms,
                     double release_ms) {
    const double fs = clip.sample_rate;
    const double a_att = std::exp(-1.0 / (attack_ms * 1e-3 * fs));
    const double a_rel = std::exp(-1.0 / (release_ms * 1e-3 * fs));
    constexpr double kFloorDb = -120.0;

    AudioClip out = clip;
    double env = kFloorDb;
    for (std::size_t i = 0; i < clip.frames(); ++i) {
        const double peak = std::max(std::abs(clip[0][i]), std::abs(clip[1][i]));
        const double level = peak > 0.0 ? std::max(kFloorDb, 20.0 * std::log10(peak)) : kFloorDb;
        const double a = level > env ? a_att : a_rel;
        env = a * env + (1.0 - a) * level;
        const double target = env <= threshold_db ? env : threshold_db + (env - threshold_db) / ratio;
        const double gain = std::pow(10.0, (target - env) / 20.0);
        out[0][i] = static_cast<float>(clip[0][i] * gain);
        out[1][i] = static_cast<float>(clip[1][i] * gain);
    }
    return out;
}

std::vector<float> delay(std::span<const float> x, double fs, double delay_s, double feedback,
                         double mix) {
    const std::size_t n = x.size();
    const auto d = static_cast<std::size_t>(std::lround(delay_s * fs));
    std::vector<double> w(n, 0.0);
    std::vector<float> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (d == 0) {
            w[i] = x[i];
        } else if (i >= d) {
            w[i] = x[i - d] + feedback * w[i - d];
        }
        y[i] = static_cast<float>((1.0 - mix) * x[i] + mix * w[i]);
    }
    return y;
}

std::vector<float> distortion(std::span<const float> x, double drive_db) {
    const double g = std::pow(10.0, drive_db / 20.0);
    std::vector<float> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = static_cast<float>(std::tanh(g * x[i]));
    return y;
}

double lowpass_coefficient(double fs, double cutoff_hz) {
    // |H| = 1/sqrt(2) at the cutoff; exp(-2 pi fc / fs) drifts above ~1 kHz
    const double c = 2.0 - std::cos(2.0 * std::numbers::pi * cutoff_hz / fs);
    return c - std::sqrt(c * c - 1.0);
}

double highpass_coefficient(double fs, double cutoff_hz) {
    // pole placed so that |H| = 1/sqrt(2) exactly at the cutoff
    const double c = std::cos(2.0 * std::numbers::pi * cutoff_hz / fs);
    return 1.0 / (c + std::sqrt(c * c - 4.0 * c + 3.0));
}

std::vector<float> lowpass(std::span<const float> x, double fs, double cutoff_hz) {
    const double a = lowpass_coefficient(fs, cutoff_hz);
    std::vector<float> y(x.size());
    double state = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        state = (1.0 - a) * x[i] + a * state;
        y[i] = static_cast<float>(state);
    }
    return y;
}

std::vector<float> highpass(std::span<const float> x, double fs, double cutoff_hz) {
    const double a = highpass_coefficient(fs, cutoff_hz);
    std::vector<float> y(x.size());
    double prev_x = 0.0, prev_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        prev_y = a * (prev_y + x[i] - prev_x);
        prev_x = x[i];
        y[i] = static_cast<float>(prev_y);
    }
    return y;
}

}  // namespace fx

AudioClip apply_effect(const AudioClip& clip, const EffectSpec& spec) {
    spec.validate();
    const double fs = clip.sample_rate;
    const auto per_channel = [&](auto&& f) {
        // doubled-mono input yields identical channels; process once
        if (clip[0] == clip[1]) {
            auto ch = f(std::span<const float>(clip[0]));
            auto copy = ch;
            return AudioClip(std::move(ch), std::move(copy), fs);
        }
        return AudioClip(f(std::span<const float>(clip[0])), f(std::span<const float>(clip[1])), fs);
    };

    switch (spec.id) {
    case EffectId::CLN:
        return clip;
    case EffectId::TRV: {
        AudioClip out = clip;
        for (auto& ch : out.channels) std::reverse(ch.begin(), ch.end());
        return out;
    }
    case EffectId::CHS:
        return per_channel([&](std::span<const float> x) {
            return fx::chorus(x, fs, spec.param("rate_hz"), spec.param("depth"),
                              spec.param("centre_delay_ms"), spec.param("feedback"), spec.param("mix"));
        });
    case EffectId::CMP:
        return fx::compressor(clip, spec.param("threshold_db"), spec.param("ratio"),
                              spec.param("attack_ms"), spec.param("release_ms"));
    case EffectId::DLY:
        return per_channel([&](std::span<const float> x) {
            return fx::delay(x, fs, spec.param("delay_s"), spec.param("feedback"), spec.param("mix"));
        });
    case EffectId::DIS:
        return per_channel([&](std::span<const float> x) { return fx::distortion(x, spec.param("drive_db")); });
    case EffectId::HPF:
        return per_channel([&](std::span<const float> x) { return fx::highpass(x, fs, spec.param("cutoff_hz")); });
    case EffectId::LPF:
        return per_channel([&](std::span<const float> x) { return fx::lowpass(x, fs, spec.param("cutoff_hz")); });
    case EffectId::PS:
        return per_channel([&](std::span<const float> x) { return fx::pitch_shift(x, spec.param("semitones")); });
    case EffectId::RVB:
        return fx::reverb(clip, fs, spec.param("room_size"), spec.param("damping"), spec.param("wet"),
                          spec.param("dry"), spec.param("width"));
    }
    throw ValidationError("unhandled effect");
}

}  // namespace fxprobe
