#include "fxprobe/represent.h"

#include "fxprobe/errors.h"

#include <cmath>

namespace fxprobe {

std::string_view feature_mode_name(FeatureMode mode) {
    return mode == FeatureMode::timeavg ? "timeavg" : "flatten";
}

FeatureMode parse_feature_mode(std::string_view s) {
    if (s == "timeavg") return FeatureMode::timeavg;
    if (s == "flatten") return FeatureMode::flatten;
    throw ValidationError("unknown feature mode '" + std::string(s) + "' (expected timeavg|flatten)");
}

void FeatureMatrix::validate() const {
    if (static_cast<std::size_t>(rows.rows()) != clip_ids.size())
        throw DimensionError("feature row count does not match clip id count");
    if (!rows.allFinite()) throw ValidationError("non-finite feature entry");
}

Vector time_average(const EmbeddingSequence& seq) {
    if (seq.frames < 1) throw DimensionError("time average of an empty sequence");
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(seq.dims));
    for (std::size_t t = 0; t < seq.frames; ++t) {
        const float* row = seq.data.data() + t * seq.dims;
        for (std::size_t d = 0; d < seq.dims; ++d) sum[static_cast<Eigen::Index>(d)] += row[d];
    }
    return sum / static_cast<double>(seq.frames);
}

Vector flatten(const EmbeddingSequence& seq) {
    Vector out(static_cast<Eigen::Index>(seq.data.size()));
    for (std::size_t i = 0; i < seq.data.size(); ++i) out[static_cast<Eigen::Index>(i)] = seq.data[i];
    return out;
}

Vector featurize(const EmbeddingSequence& seq, FeatureMode mode) {
    return mode == FeatureMode::timeavg ? time_average(seq) : flatten(seq);
}

NormStats fit_norm(const Matrix& train) {
    if (train.rows() < 2) throw DataError("normalization needs at least 2 training rows");
    NormStats stats;
    stats.mean = train.colwise().mean().transpose();
    const Matrix centred = train.rowwise() - stats.mean.transpose();
    stats.std = (centred.array().square().colwise().sum() / static_cast<double>(train.rows()))
                    .sqrt()
                    .transpose();
    stats.std = stats.std.cwiseMax(kStdFloor);
    return stats;
}

Matrix apply_norm(const NormStats& stats, const Matrix& x) {
    if (x.cols() != stats.mean.size()) throw DimensionError("feature width does not match norm stats");
    Matrix out = x.rowwise() - stats.mean.transpose();
    out.array().rowwise() /= stats.std.transpose().array();
    return out;
}

Matrix invert_norm(const NormStats& stats, const Matrix& z) {
    if (z.cols() != stats.mean.size()) throw DimensionError("feature width does not match norm stats");
    Matrix out = z;
    out.array().rowwise() *= stats.std.transpose().array();
    out.rowwise() += stats.mean.transpose();
    return out;
}

PcaModel pca_fit(const Matrix& x, std::size_t k) {
    const auto rows = static_cast<std::size_t>(x.rows());
    const auto cols = static_cast<std::size_t>(x.cols());
    if (k < 1 || k > std::min(rows, cols))
        throw DimensionError("PCA k=" + std::to_string(k) + " exceeds min(rows, features)");

    PcaModel model;
    model.mean = x.colwise().mean().transpose();
    const Matrix centred = x.rowwise() - model.mean.transpose();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::MatrixXd& v = svd.matrixV();
    const double denom = rows > 1 ? static_cast<double>(rows - 1) : 1.0;

    const auto kk = static_cast<Eigen::Index>(k);
    model.components.resize(kk, static_cast<Eigen::Index>(cols));
    model.explained_variance.resize(kk);
    for (Eigen::Index c = 0; c < kk; ++c) {
        Vector comp = v.col(c);
        Eigen::Index arg = 0;
        comp.cwiseAbs().maxCoeff(&arg);
        if (comp[arg] < 0.0) comp = -comp;
        model.components.row(c) = comp.transpose();
        model.explained_variance[c] = s[c] * s[c] / denom;
    }
    model.total_variance = s.squaredNorm() / denom;
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
    if (x.cols() != model.mean.size()) throw DimensionError("feature width does not match PCA model");
    const Matrix centred = x.rowwise() - model.mean.transpose();
    return centred * model.components.transpose();
}

TrajectoryReport trajectory_metrics(const Matrix& points, const PcaModel* pca3) {
    if (points.rows() < 2) throw DimensionError("trajectory needs at least 2 points");
    TrajectoryReport report;
    for (Eigen::Index i = 0; i + 1 < points.rows(); ++i)
        report.arc_length += (points.row(i + 1) - points.row(i)).norm();
    report.chord_length = (points.row(points.rows() - 1) - points.row(0)).norm();
    report.straightness = report.arc_length > 0.0 ? report.chord_length / report.arc_length : 1.0;
    // chord can exceed arc by rounding on collinear paths
    report.straightness = std::min(report.straightness, 1.0);
    if (pca3) report.pca3_path = pca_transform(*pca3, points);
    return report;
}

}  // namespace fxprobe
