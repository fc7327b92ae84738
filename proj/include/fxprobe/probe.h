#pragma once

#include "fxprobe/effects.h"
#include "fxprobe/represent.h"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fxprobe {

struct ProbeConfig {
    double lr = 3e-4;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 500;
    std::size_t patience = 50;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
    std::uint64_t seed = 0;

    /// Settings for the masking experiment: 100 epochs, best-validation
    /// checkpoint, no early stop.
    static ProbeConfig masking(std::uint64_t seed = 0);

    void validate() const;
};

struct EpochRecord {
    double train_loss = 0.0;
    double val_accuracy = 0.0;  // percent
    double val_loss = 0.0;
};

/// Single affine layer mapping features to class logits.
struct ProbeModel {
    Matrix weights;  // classes x features
    Vector bias;     // classes
    double best_val_accuracy = 0.0;  // percent
    std::size_t best_epoch = 0;      // 1-based
    std::vector<EpochRecord> history;

    std::size_t classes() const { return static_cast<std::size_t>(weights.rows()); }
    std::size_t features() const { return static_cast<std::size_t>(weights.cols()); }
    std::size_t parameter_count() const { return classes() * features() + classes(); }
    /// Index of the largest logit; ties go to the lowest class index.
    int predict(std::span<const double> row) const;
};

inline constexpr std::size_t probe_parameter_count(std::size_t classes, std::size_t features) {
    return classes * features + classes;
}

struct LossAndGradient {
    double loss = 0.0;  // mean cross-entropy
    Matrix grad_weights;
    Vector grad_bias;
};

/// Mean softmax cross-entropy over `rows` of x and its analytic gradient.
LossAndGradient softmax_loss_and_gradient(const Matrix& weights, const Vector& bias, const Matrix& x,
                                          std::span<const int> labels, std::span<const std::size_t> rows);
double softmax_loss(const Matrix& weights, const Vector& bias, const Matrix& x, std::span<const int> labels);

/// Minibatch AdamW on softmax cross-entropy from zero-initialized weights.
/// Returns the weights of the epoch with the best validation accuracy, ties
/// going to the lower validation loss (small validation sets saturate in
/// accuracy long before the probe settles). Stops after `patience` epochs
/// without an accuracy improvement.
ProbeModel train_probe(const Matrix& x_train, std::span<const int> y_train, const Matrix& x_val,
                       std::span<const int> y_val, std::size_t n_classes, const ProbeConfig& config);

/// Accuracy in percent.
double accuracy(const ProbeModel& model, const Matrix& x, std::span<const int> labels);

struct EvalReport {
    std::vector<double> per_class_recall;  // percent; NaN for classes absent from the test set
    double overall_accuracy = 0.0;         // percent
    double macro_recall = 0.0;             // percent, over classes present
    Eigen::MatrixXi confusion;             // true class rows, predicted class columns
    std::vector<std::size_t> class_counts;
};

EvalReport evaluate(const ProbeModel& model, const Matrix& x_test, std::span<const int> labels);

/// Copy of `features` with column d set to zero.
Matrix mask_dimension(const Matrix& features, std::size_t d);

enum class MaskSpace {
    normalized,  // zero after z-scoring (the training mean)
    raw,         // zero in raw space, then z-score with unmasked training stats
};

/// Effect-vs-clean classification data for one effect, raw (un-normalized).
struct BinaryTask {
    EffectId effect = EffectId::CLN;
    Matrix x_train, x_val, x_test;
    std::vector<int> y_train, y_val, y_test;  // 1 = effect present
};

struct MaskMatrix {
    std::vector<EffectId> effects;
    Vector baseline_accuracy;  // percent, per effect
    Matrix masked_accuracy;    // effects x dims, percent
    Matrix delta_pp;           // baseline - masked
};

struct MaskOptions {
    MaskSpace space = MaskSpace::normalized;
    std::size_t jobs = 1;
};

/// Trains one unmasked baseline and one probe per masked dimension for
/// every task. Test accuracy of the best-validation checkpoint is compared.
/// Seeds derive from (config.seed, effect) so all masks of one effect share
/// shuffling order and differences reflect the mask alone.
MaskMatrix mask_sweep(const std::vector<BinaryTask>& tasks, const ProbeConfig& config,
                      const MaskOptions& options = {});

}  // namespace fxprobe
