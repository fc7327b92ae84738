#include "fxprobe/probe.h"

#include "fxprobe/errors.h"
#include "fxprobe/kernels.h"
#include "fxprobe/rng.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fxprobe {

namespace {

std::span<const double> row_of(const Matrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

std::span<double> row_of(Matrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Softmax probabilities of one sample into `probs`; returns -log p[label].
double forward(const Matrix& w, const Vector& b, std::span<const double> x, int label,
               std::vector<double>& probs) {
    const auto classes = static_cast<std::size_t>(w.rows());
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) {
        probs[c] = kernels::dot(row_of(w, static_cast<Eigen::Index>(c)), x) + b[static_cast<Eigen::Index>(c)];
        max_logit = std::max(max_logit, probs[c]);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        probs[c] = std::exp(probs[c] - max_logit);
        sum += probs[c];
    }
    for (std::size_t c = 0; c < classes; ++c) probs[c] /= sum;
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300));
}

void check_labels(std::span<const int> labels, std::size_t n_classes, const char* split, bool require_all) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= n_classes)
            throw DataError(std::string(split) + " label out of range: " + std::to_string(y));
        ++counts[static_cast<std::size_t>(y)];
    }
    if (require_all)
        for (std::size_t c = 0; c < n_classes; ++c)
            if (counts[c] == 0)
                throw DataError(std::string(split) + " split has no samples of class " + std::to_string(c));
}

}  // namespace

ProbeConfig ProbeConfig::masking(std::uint64_t seed) {
    ProbeConfig c;
    c.max_epochs = 100;
    c.patience = 100;
    c.seed = seed;
    return c;
}

void ProbeConfig::validate() const {
    if (!(lr > 0.0) || batch_size < 1 || max_epochs < 1 || patience < 1)
        throw ConfigError("probe: lr, batch_size, max_epochs and patience must be positive");
    if (patience > max_epochs) throw ConfigError("probe: patience must not exceed max_epochs");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("probe: betas must be in [0,1)");
    if (!(eps > 0.0) || !(weight_decay >= 0.0)) throw ConfigError("probe: eps must be > 0, weight_decay >= 0");
}

int ProbeModel::predict(std::span<const double> row) const {
    int best = 0;
    double best_logit = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < weights.rows(); ++c) {
        const double logit = kernels::dot(row_of(weights, c), row) + bias[c];
        if (logit > best_logit) {
            best_logit = logit;
            best = static_cast<int>(c);
        }
    }
    return best;
}

LossAndGradient softmax_loss_and_gradient(const Matrix& weights, const Vector& bias, const Matrix& x,
                                          std::span<const int> labels, std::span<const std::size_t> rows) {
    LossAndGradient out;
    out.grad_weights = Matrix::Zero(weights.rows(), weights.cols());
    out.grad_bias = Vector::Zero(bias.size());
    if (rows.empty()) return out;
    const auto classes = static_cast<std::size_t>(weights.rows());
    std::vector<double> probs(classes);
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (std::size_t r : rows) {
        const auto xi = row_of(x, static_cast<Eigen::Index>(r));
        out.loss += forward(weights, bias, xi, labels[r], probs) * inv;
        for (std::size_t c = 0; c < classes; ++c) {
            const double delta = (probs[c] - (static_cast<std::size_t>(labels[r]) == c ? 1.0 : 0.0)) * inv;
            kernels::axpy(delta, xi, row_of(out.grad_weights, static_cast<Eigen::Index>(c)));
            out.grad_bias[static_cast<Eigen::Index>(c)] += delta;
        }
    }
    return out;
}

double softmax_loss(const Matrix& weights, const Vector& bias, const Matrix& x, std::span<const int> labels) {
    std::vector<double> probs(static_cast<std::size_t>(weights.rows()));
    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        loss += forward(weights, bias, row_of(x, i), labels[static_cast<std::size_t>(i)], probs);
    return x.rows() > 0 ? loss / static_cast<double>(x.rows()) : 0.0;
}

double accuracy(const ProbeModel& model, const Matrix& x, std::span<const int> labels) {
    if (x.rows() == 0) return 0.0;
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (model.predict(row_of(x, i)) == labels[static_cast<std::size_t>(i)]) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(x.rows());
}

ProbeModel train_probe(const Matrix& x_train, std::span<const int> y_train, const Matrix& x_val,
                       std::span<const int> y_val, std::size_t n_classes, const ProbeConfig& config) {
    config.validate();
    if (n_classes < 2) throw DataError("probe needs at least 2 classes");
    if (static_cast<std::size_t>(x_train.rows()) != y_train.size() ||
        static_cast<std::size_t>(x_val.rows()) != y_val.size())
        throw DimensionError("feature rows and labels differ in count");
    if (x_train.cols() != x_val.cols()) throw DimensionError("train and val feature widths differ");
    check_labels(y_train, n_classes, "train", true);
    check_labels(y_val, n_classes, "val", true);

    const auto classes = static_cast<Eigen::Index>(n_classes);
    ProbeModel model;
    model.weights = Matrix::Zero(classes, x_train.cols());
    model.bias = Vector::Zero(classes);

    Matrix m_w = Matrix::Zero(classes, x_train.cols()), v_w = m_w;
    Vector m_b = Vector::Zero(classes), v_b = m_b;

    ProbeModel best = model;
    best.best_val_accuracy = -1.0;
    double best_val_loss = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    std::size_t step = 0;

    std::vector<std::size_t> order(static_cast<std::size_t>(x_train.rows()));
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(config.seed, "probe.shuffle", epoch);
        rng.shuffle(order.begin(), order.end());

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, end - start);
            const auto g = softmax_loss_and_gradient(model.weights, model.bias, x_train, y_train, batch);
            if (!std::isfinite(g.loss))
                throw DivergenceError("probe loss became non-finite at epoch " + std::to_string(epoch));

            ++step;
            const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
            const double decay = 1.0 - config.lr * config.weight_decay;
            const auto update = [&](double* theta, double* m, double* v, const double* grad, std::size_t n) {
                for (std::size_t i = 0; i < n; ++i) {
                    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
                    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
                    const double m_hat = m[i] / bc1;
                    const double v_hat = v[i] / bc2;
                    theta[i] = theta[i] * decay - config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
                }
            };
            update(model.weights.data(), m_w.data(), v_w.data(), g.grad_weights.data(),
                   static_cast<std::size_t>(model.weights.size()));
            update(model.bias.data(), m_b.data(), v_b.data(), g.grad_bias.data(),
                   static_cast<std::size_t>(model.bias.size()));
        }

        EpochRecord rec;
        rec.train_loss = softmax_loss(model.weights, model.bias, x_train, y_train);
        if (!std::isfinite(rec.train_loss))
            throw DivergenceError("probe loss became non-finite at epoch " + std::to_string(epoch));
        rec.val_accuracy = accuracy(model, x_val, y_val);
        rec.val_loss = softmax_loss(model.weights, model.bias, x_val, y_val);
        model.history.push_back(rec);

        const bool improved = rec.val_accuracy > best.best_val_accuracy;
        if (improved || (rec.val_accuracy == best.best_val_accuracy && rec.val_loss < best_val_loss)) {
            best.weights = model.weights;
            best.bias = model.bias;
            best.best_val_accuracy = rec.val_accuracy;
            best.best_epoch = epoch;
            best_val_loss = rec.val_loss;
        }
        if (improved)
            since_best = 0;
        else if (++since_best >= config.patience)
            break;
    }

    best.history = std::move(model.history);
    return best;
}

EvalReport evaluate(const ProbeModel& model, const Matrix& x_test, std::span<const int> labels) {
    if (static_cast<std::size_t>(x_test.cols()) != model.features())
        throw DimensionError("test feature width " + std::to_string(x_test.cols()) + " does not match probe width " +
                             std::to_string(model.features()));
    if (static_cast<std::size_t>(x_test.rows()) != labels.size())
        throw DimensionError("test rows and labels differ in count");
    const auto n = static_cast<Eigen::Index>(model.classes());
    check_labels(labels, model.classes(), "test", false);

    EvalReport report;
    report.confusion = Eigen::MatrixXi::Zero(n, n);
    for (Eigen::Index i = 0; i < x_test.rows(); ++i)
        ++report.confusion(labels[static_cast<std::size_t>(i)], model.predict(row_of(x_test, i)));

    report.class_counts.resize(model.classes());
    report.per_class_recall.resize(model.classes());
    double macro = 0.0;
    std::size_t present = 0;
    for (Eigen::Index c = 0; c < n; ++c) {
        const int count = report.confusion.row(c).sum();
        report.class_counts[static_cast<std::size_t>(c)] = static_cast<std::size_t>(count);
        if (count == 0) {
            report.per_class_recall[static_cast<std::size_t>(c)] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double recall = 100.0 * report.confusion(c, c) / count;
        report.per_class_recall[static_cast<std::size_t>(c)] = recall;
        macro += recall;
        ++present;
    }
    report.macro_recall = present ? macro / static_cast<double>(present) : 0.0;
    report.overall_accuracy =
        x_test.rows() ? 100.0 * report.confusion.trace() / static_cast<double>(x_test.rows()) : 0.0;
    return report;
}

Matrix mask_dimension(const Matrix& features, std::size_t d) {
    if (d >= static_cast<std::size_t>(features.cols()))
        throw DimensionError("mask index " + std::to_string(d) + " out of range for " +
                             std::to_string(features.cols()) + " dims");
    Matrix out = features;
    out.col(static_cast<Eigen::Index>(d)).setZero();
    return out;
}

}  // namespace fxprobe
