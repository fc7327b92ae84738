#pragma once

#include "fxprobe/encoders.h"

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fxprobe {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class FeatureMode { timeavg, flatten };
std::string_view feature_mode_name(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view s);

/// One feature row per clip.
struct FeatureMatrix {
    Matrix rows;
    std::vector<std::string> clip_ids;
    FeatureMode mode = FeatureMode::timeavg;

    void validate() const;
};

/// Mean over frames; length dims.
Vector time_average(const EmbeddingSequence& seq);
/// Row-major concatenation of all frames; length frames * dims.
Vector flatten(const EmbeddingSequence& seq);
Vector featurize(const EmbeddingSequence& seq, FeatureMode mode);

inline constexpr double kStdFloor = 1e-8;

/// Per-feature z-score statistics fitted on training rows.
struct NormStats {
    Vector mean;
    Vector std;  // floored at kStdFloor
};

NormStats fit_norm(const Matrix& train);
Matrix apply_norm(const NormStats& stats, const Matrix& x);
Matrix invert_norm(const NormStats& stats, const Matrix& z);

struct PcaModel {
    Vector mean;
    Matrix components;           // k x features, orthonormal rows
    Vector explained_variance;   // descending
    double total_variance = 0.0; // sum over all directions

    std::size_t k() const { return static_cast<std::size_t>(components.rows()); }
};

/// Mean-centred thin SVD; components are the top-k right singular vectors,
/// each signed so its largest-magnitude entry is positive.
PcaModel pca_fit(const Matrix& x, std::size_t k);
Matrix pca_transform(const PcaModel& model, const Matrix& x);

struct TrajectoryReport {
    double arc_length = 0.0;
    double chord_length = 0.0;
    double straightness = 1.0;
    Matrix pca3_path;  // points x 3 when a 3-component model is supplied
};

/// Chord over arc length of an ordered path (rows of `points`).
TrajectoryReport trajectory_metrics(const Matrix& points, const PcaModel* pca3 = nullptr);

}  // namespace fxprobe
