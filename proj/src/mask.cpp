#include "fxprobe/errors.h"
#include "fxprobe/parallel.h"
#include "fxprobe/probe.h"
#include "fxprobe/rng.h"

namespace fxprobe {

namespace {

constexpr std::size_t kUnmasked = static_cast<std::size_t>(-1);

struct Prepared {
    Matrix train, val, test;
};

Prepared prepare(const BinaryTask& task, const NormStats& stats, std::size_t dim, MaskSpace space) {
    Prepared p;
    if (dim == kUnmasked) {
        p.train = apply_norm(stats, task.x_train);
        p.val = apply_norm(stats, task.x_val);
        p.test = apply_norm(stats, task.x_test);
    } else if (space == MaskSpace::normalized) {
        p.train = mask_dimension(apply_norm(stats, task.x_train), dim);
        p.val = mask_dimension(apply_norm(stats, task.x_val), dim);
        p.test = mask_dimension(apply_norm(stats, task.x_test), dim);
    } else {
        p.train = apply_norm(stats, mask_dimension(task.x_train, dim));
        p.val = apply_norm(stats, mask_dimension(task.x_val, dim));
        p.test = apply_norm(stats, mask_dimension(task.x_test, dim));
    }
    return p;
}

}  // namespace

MaskMatrix mask_sweep(const std::vector<BinaryTask>& tasks, const ProbeConfig& config, const MaskOptions& options) {
    config.validate();
    if (tasks.empty()) throw DataError("mask sweep needs at least one task");
    const auto dims = static_cast<std::size_t>(tasks.front().x_train.cols());
    for (const auto& t : tasks)
        if (static_cast<std::size_t>(t.x_train.cols()) != dims || t.x_val.cols() != t.x_train.cols() ||
            t.x_test.cols() != t.x_train.cols())
            throw DimensionError("mask sweep tasks have inconsistent feature widths");

    std::vector<NormStats> stats;
    stats.reserve(tasks.size());
    for (const auto& t : tasks) stats.push_back(fit_norm(t.x_train));

    MaskMatrix out;
    const auto n_tasks = static_cast<Eigen::Index>(tasks.size());
    out.baseline_accuracy = Vector::Zero(n_tasks);
    out.masked_accuracy = Matrix::Zero(n_tasks, static_cast<Eigen::Index>(dims));
    for (const auto& t : tasks) out.effects.push_back(t.effect);

    // slot 0 of each task is the unmasked baseline, slots 1..dims the masks
    const std::size_t per_task = dims + 1;
    parallel_for(tasks.size() * per_task, options.jobs, [&](std::size_t job) {
        const std::size_t ti = job / per_task;
        const std::size_t slot = job % per_task;
        const BinaryTask& task = tasks[ti];
        const std::size_t dim = slot == 0 ? kUnmasked : slot - 1;
        ProbeConfig cfg = config;
        cfg.seed = derive_key(config.seed, "mask", effect_index(task.effect));
        try {
            const Prepared p = prepare(task, stats[ti], dim, options.space);
            const ProbeModel model = train_probe(p.train, task.y_train, p.val, task.y_val, 2, cfg);
            const double acc = accuracy(model, p.test, task.y_test);
            if (slot == 0)
                out.baseline_accuracy[static_cast<Eigen::Index>(ti)] = acc;
            else
                out.masked_accuracy(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(dim)) = acc;
        } catch (const Error& e) {
            const std::string where = std::string(effect_name(task.effect)) + ", dim " +
                                      (slot == 0 ? std::string("none") : std::to_string(dim));
            throw DataError("mask sweep (" + where + "): " + e.what());
        }
    });

    out.delta_pp = (-out.masked_accuracy).colwise() + out.baseline_accuracy;
    return out;
}

}  // namespace fxprobe
