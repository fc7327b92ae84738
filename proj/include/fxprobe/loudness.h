#pragma once

#include "fxprobe/audio_io.h"

#include <cstddef>
#include <limits>

namespace fxprobe {

inline constexpr double kDefaultTargetLufs = -23.0;
inline constexpr double kSilenceLufs = -std::numeric_limits<double>::infinity();

struct LoudnessReport {
    /// -inf for silence, finite otherwise.
    double integrated_lufs = kSilenceLufs;
    std::size_t gated_block_count = 0;
};

/// Gated integrated loudness (BS.1770-4 K-weighting, 400 ms blocks with
/// 75 % overlap, absolute gate -70 LUFS, relative gate -10 LU). Requires
/// at least one full block.
LoudnessReport integrated_loudness(const AudioClip& clip);

/// Applies one uniform gain so the result measures `target_lufs`. Throws
/// SilenceError when the input has no measurable loudness.
AudioClip normalize_loudness(const AudioClip& clip, double target_lufs = kDefaultTargetLufs);

/// K-weighting pre-filter applied to one channel (exposed for tests).
std::vector<double> k_weight(std::span<const float> x);

}  // namespace fxprobe
