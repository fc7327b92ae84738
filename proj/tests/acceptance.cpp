// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Work files go to argv[1] (default:
// ./acceptance_work).

#include "fxprobe/effects.h"
#include "fxprobe/errors.h"
#include "fxprobe/loudness.h"
#include "fxprobe/parallel.h"
#include "fxprobe/pipeline.h"
#include "fxprobe/probe.h"
#include "fxprobe/represent.h"
#include "fxprobe/rng.h"
#include "oracles.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace fxprobe;
namespace fs = std::filesystem;

namespace {

constexpr double kFs = kSampleRate;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    // records a check; the criterion fails if any check fails
    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- signals

std::vector<float> sine(double f, double amp, std::size_t n) {
    std::vector<float> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * f * i / kFs));
    return x;
}

double rms(std::span<const float> x) {
    double s = 0;
    for (float v : x) s += static_cast<double>(v) * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

double peak(std::span<const float> x) {
    double p = 0;
    for (float v : x) p = std::max(p, std::abs(static_cast<double>(v)));
    return p;
}

double db(double v) { return 20 * std::log10(v); }

// Hann-windowed DFT magnitude maximized over a frequency range (2 Hz grid,
// then 0.05 Hz around the best bin).
double dominant_frequency(std::span<const float> x, double lo, double hi) {
    auto mag = [&](double f) {
        std::complex<double> acc = 0, ph = 1;
        const auto rot = std::polar(1.0, -2 * std::numbers::pi * f / kFs);
        for (std::size_t n = 0; n < x.size(); ++n) {
            const double w = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * n / (x.size() - 1));
            acc += w * x[n] * ph;
            ph *= rot;
        }
        return std::abs(acc);
    };
    double best = lo, best_m = -1;
    for (double f = lo; f <= hi; f += 2.0)
        if (const double m = mag(f); m > best_m) best_m = m, best = f;
    const double c = best;
    for (double f = c - 2; f <= c + 2; f += 0.05)
        if (const double m = mag(f); m > best_m) best_m = m, best = f;
    return best;
}

// Schroeder backward integration, line fit over -5..-35 dB, extrapolated to 60 dB.
double rt60(const std::vector<float>& ir) {
    std::vector<double> edc(ir.size());
    double acc = 0;
    for (std::size_t i = ir.size(); i-- > 0;) {
        acc += static_cast<double>(ir[i]) * ir[i];
        edc[i] = acc;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < edc.size(); ++i) {
        const double level = 10 * std::log10(edc[i] / edc[0]);
        if (level > -5 || level < -35) continue;
        const double t = static_cast<double>(i) / kFs;
        sx += t, sy += level, sxx += t * t, sxy += t * level;
        ++n;
    }
    return -60.0 / ((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return files;
}

std::string fail_summary(const CommandResult& r) {
    return r.failures.empty() ? "" : " (first failure: " + r.failures.front() + ")";
}

// --------------------------------------------------------------- criteria

Outcome parameter_counts() {
    Outcome o;
    struct Row {
        const char* encoder;
        std::size_t dim;
        const char* shown;
    };
    const Row rows[] = {{"VGGish-T", 128, "1.3 k"},        {"VGGish-F", 2176, "21.8 k"},
                        {"Stacked2-T", 32, "0.3 k"},       {"Stacked2-F", 16384, "163.9 k"},
                        {"Stacked1-T", 32, "0.3 k"},       {"Stacked1-F", 262144, "2621.5 k"},
                        {"DiffAE-T", 64, "0.7 k"},         {"DiffAE-F", 131072, "1310.7 k"}};
    for (const Row& r : rows) {
        // a real probe of that shape, not just the formula
        ProbeModel m;
        m.weights = Matrix::Zero(static_cast<Eigen::Index>(kNumEffects), static_cast<Eigen::Index>(r.dim));
        m.bias = Vector::Zero(static_cast<Eigen::Index>(kNumEffects));
        const std::size_t p = m.parameter_count();
        // one decimal in thousands, half up (163850 -> 163.9)
        const std::string shown = fmt("%.1f k", std::floor(static_cast<double>(p) / 100.0 + 0.5) / 10.0);
        o.check(p == kNumEffects * r.dim + kNumEffects && p == probe_parameter_count(kNumEffects, r.dim) &&
                    shown == r.shown,
                fmt("%-10s dim %6zu -> %7zu params -> %s (expected %s)", r.encoder, r.dim, p, shown.c_str(),
                    r.shown));
    }
    return o;
}

Outcome dsp_transfer() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();

    // one-pole filters at their cutoff; includes the fixed classification settings
    for (EffectId id : {EffectId::LPF, EffectId::HPF}) {
        const double fixed_fc = fixed_spec(id).param("cutoff_hz");
        for (double fc : {fixed_fc, 250.0, 1000.0, 8000.0}) {
            EffectSpec spec = fixed_spec(id);
            spec.params["cutoff_hz"] = fc;
            const auto x = sine(fc, 0.5, 96000);
            const auto y = apply_effect(AudioClip::from_mono(x), spec);
            const std::size_t skip = 24000;
            const double g = db(rms(std::span(y[0]).subspan(skip)) / rms(std::span(x).subspan(skip)));
            o.check(std::abs(g + 3.0) <= 0.3, fmt("%s fc %6.0f Hz: %+.3f dB at fc", std::string(effect_name(id)).c_str(), fc, g));
        }
    }

    {
        const auto spec = fixed_spec(EffectId::CMP);
        const auto x = sine(997, std::pow(10.0, -30.0 / 20), 48000);
        const auto y = apply_effect(AudioClip::from_mono(x), spec);
        const double level = db(peak(std::span(y[0]).subspan(9600)));  // steady state after 200 ms
        o.check(std::abs(level + 46.0) <= 0.5,
                fmt("CMP threshold %.0f dB ratio %.0f: -30 dBFS sine -> %.3f dBFS (target -46 +-0.5)",
                    spec.param("threshold_db"), spec.param("ratio"), level));
    }

    {
        const auto spec = fixed_spec(EffectId::PS);
        const auto y = apply_effect(AudioClip::from_mono(sine(440, 0.5, 48000)), spec);
        const double f = dominant_frequency(std::span(y[0]).subspan(8000, 32000), 400, 700);
        const double target = 440 * std::pow(2.0, spec.param("semitones") / 12);
        o.check(std::abs(f / target - 1.0) <= 0.01,
                fmt("PS %+.0f st: 440 Hz -> %.2f Hz (target %.2f, %+.3f%%)", spec.param("semitones"), f, target,
                    100 * (f / target - 1)));
    }

    {
        std::vector<float> imp(6 * 48000, 0.0f);
        imp[0] = 1.0f;
        const auto clip = AudioClip::from_mono(imp);
        double prev = 0;
        bool increasing = true;
        std::string times;
        for (double room : {0.2, 0.5, 0.8}) {
            EffectSpec spec = fixed_spec(EffectId::RVB);
            spec.params["room_size"] = room;
            spec.params["wet"] = 1.0;
            spec.params["dry"] = 0.0;
            const double t = rt60(apply_effect(clip, spec)[0]);
            increasing = increasing && t > prev;
            prev = t;
            times += fmt(" %.0f:%.3fs", room * 10, t);
        }
        o.check(increasing, "RVB RT60 by room size (x10)" + times + " strictly increasing");
    }

    const double elapsed = seconds_since(t0);
    o.check(elapsed < 30.0, fmt("runtime %.2f s (< 30 s)", elapsed));
    return o;
}

Outcome loudness() {
    Outcome o;
    double worst_target = 0, worst_linear = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        Rng rng(0, "acceptance.loudness", i);
        const auto n = static_cast<std::size_t>(rng.uniform(1.0, 6.0) * kFs);
        // a few tones with amplitude envelopes plus noise; channels at different levels
        std::vector<float> l(n), r(n);
        const int tones = static_cast<int>(rng.uniform_int(1, 5));
        std::vector<double> freq(tones), amp(tones), rate(tones);
        for (int k = 0; k < tones; ++k)
            freq[k] = std::exp(rng.uniform(std::log(40.0), std::log(16000.0))), amp[k] = rng.uniform(0.01, 0.4),
            rate[k] = rng.uniform(0.1, 3.0);
        const double noise = rng.uniform(0.0, 0.1), balance = rng.uniform(0.2, 1.0);
        for (std::size_t t = 0; t < n; ++t) {
            double v = noise * rng.normal();
            const double s = static_cast<double>(t) / kFs;
            for (int k = 0; k < tones; ++k)
                v += amp[k] * (0.6 + 0.4 * std::sin(2 * std::numbers::pi * rate[k] * s)) *
                     std::sin(2 * std::numbers::pi * freq[k] * s);
            l[t] = static_cast<float>(v);
            r[t] = static_cast<float>(balance * v + 0.01 * rng.normal());
        }
        const AudioClip clip(std::move(l), std::move(r));
        const double target = rng.uniform(-40.0, -10.0);
        const double got = integrated_loudness(normalize_loudness(clip, target)).integrated_lufs;
        worst_target = std::max(worst_target, std::abs(got - target));

        // scaling by g dB must move the reading by g LU
        const double g = rng.uniform(-20.0, 10.0);
        AudioClip scaled = clip;
        const auto lin = static_cast<float>(std::pow(10.0, g / 20));
        for (auto& ch : scaled.channels)
            for (float& v : ch) v *= lin;
        const double before = integrated_loudness(clip).integrated_lufs;
        const double after = integrated_loudness(scaled).integrated_lufs;
        worst_linear = std::max(worst_linear, std::abs((after - before) - g));
    }
    o.check(worst_target <= 0.1, fmt("20 clips normalized to random targets: max |error| %.4f LU (<= 0.1)", worst_target));
    o.check(worst_linear <= 0.05, fmt("gain linearity: max |dL - g| %.4f LU (<= 0.05)", worst_linear));
    return o;
}

Outcome pca_oracle() {
    Outcome o;
    double worst_scores = 0, worst_ortho = 0;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng(0, "acceptance.pca", trial);
        const int n = 200, d = 16;
        Matrix x(n, d);
        // random column scales plus a shared factor so the spectrum is not flat
        std::vector<double> scale(d);
        for (double& s : scale) s = rng.uniform(0.5, 5.0);
        for (int r = 0; r < n; ++r) {
            const double common = rng.normal();
            for (int c = 0; c < d; ++c) x(r, c) = scale[c] * rng.normal() + common * (c % 4) + 3.0;
        }
        oracle::Mat xs(n, std::vector<double>(d));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < d; ++c) xs[r][c] = x(r, c);
        const auto ref = oracle::covariance_pca(xs, d);
        const auto m = pca_fit(x, d);
        const Matrix s = pca_transform(m, x);
        for (int c = 0; c < d; ++c) {
            double dotp = 0;
            for (int j = 0; j < d; ++j) dotp += m.components(c, j) * ref.components[c][j];
            const double sign = dotp < 0 ? -1.0 : 1.0;
            for (int r = 0; r < n; ++r) worst_scores = std::max(worst_scores, std::abs(s(r, c) - sign * ref.scores[r][c]));
        }
        const Matrix g = m.components * m.components.transpose();
        worst_ortho = std::max(worst_ortho, (g - Matrix::Identity(d, d)).cwiseAbs().maxCoeff());
    }
    o.check(worst_scores <= 1e-6, fmt("50 x (200x16): max |score - oracle| %.3g after sign alignment (<= 1e-6)", worst_scores));
    o.check(worst_ortho <= 1e-6, fmt("max |C C^T - I| %.3g (<= 1e-6)", worst_ortho));
    return o;
}

Outcome probe_correctness() {
    Outcome o;

    {
        // two Gaussian blobs separated by the hyperplane 3x + y = 0
        Rng rng(0, "acceptance.blobs");
        Matrix x(200, 2);
        std::vector<int> y(200);
        bool separable = true;
        for (int i = 0; i < 200; ++i) {
            y[i] = i % 2;
            const double cx = y[i] ? 3.0 : -3.0, cy = y[i] ? 1.0 : -1.0;
            x(i, 0) = cx + 0.5 * rng.normal();
            x(i, 1) = cy + 0.5 * rng.normal();
            separable = separable && ((3 * x(i, 0) + x(i, 1) > 0) == (y[i] == 1));
        }
        ProbeConfig cfg;
        cfg.patience = cfg.max_epochs;  // 500
        const auto model = train_probe(x, y, x, y, 2, cfg);
        std::size_t first_perfect = 0;
        for (std::size_t e = 0; e < model.history.size(); ++e)
            if (model.history[e].val_accuracy == 100.0) {
                first_perfect = e + 1;
                break;
            }
        const double acc = accuracy(model, x, y);
        o.check(separable && acc == 100.0 && model.history.size() <= 500,
                fmt("separable toy: train accuracy %.1f%%, first perfect epoch %zu of <= 500", acc, first_perfect));
    }

    {
        Rng rng(0, "acceptance.gradient");
        const int n = 20, d = 8, k = 10;
        Matrix x(n, d), w(k, d);
        Vector b(k);
        std::vector<int> y(n);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.3 * rng.normal();
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.1 * rng.normal();
        for (int& v : y) v = static_cast<int>(rng.uniform_int(0, k - 1));
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        const auto g = softmax_loss_and_gradient(w, b, x, y, rows);

        // loss itself against the first-principles oracle
        oracle::Mat wr(k, std::vector<double>(d)), xr(n, std::vector<double>(d));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < d; ++j) wr[i][j] = w(i, j);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) xr[i][j] = x(i, j);
        const double ref_loss = oracle::softmax_xent(wr, std::vector<double>(b.data(), b.data() + k), xr, y);

        const double h = 1e-6;
        double worst = 0;
        auto rel = [](double fd, double an) { return std::abs(fd - an) / std::max(1.0, std::abs(an)); };
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            Matrix wp = w, wm = w;
            wp.data()[i] += h;
            wm.data()[i] -= h;
            worst = std::max(worst, rel((softmax_loss(wp, b, x, y) - softmax_loss(wm, b, x, y)) / (2 * h),
                                        g.grad_weights.data()[i]));
        }
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            Vector bp = b, bm = b;
            bp[i] += h;
            bm[i] -= h;
            worst = std::max(worst, rel((softmax_loss(w, bp, x, y) - softmax_loss(w, bm, x, y)) / (2 * h), g.grad_bias[i]));
        }
        o.check(worst <= 1e-5 && std::abs(g.loss - ref_loss) <= 1e-12,
                fmt("gradient vs central differences: max relative error %.3g (<= 1e-5); loss vs oracle %.3g",
                    worst, std::abs(g.loss - ref_loss)));
    }

    {
        // 10 informative Gaussian classes; large test set so the chance level
        // is resolved to about 1 pp
        const int k = 10, d = 16;
        Rng rng(0, "acceptance.shuffle");
        Matrix centres(k, d);
        for (Eigen::Index i = 0; i < centres.size(); ++i) centres.data()[i] = 1.5 * rng.normal();
        auto make = [&](int n, Matrix& x, std::vector<int>& y) {
            x.resize(n, d);
            y.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                y[i] = i % k;
                for (int j = 0; j < d; ++j) x(i, j) = centres(y[i], j) + rng.normal();
            }
        };
        Matrix xtr, xva, xte;
        std::vector<int> ytr, yva, yte;
        make(2000, xtr, ytr);
        make(500, xva, yva);
        make(1000, xte, yte);
        const auto stats = fit_norm(xtr);
        xtr = apply_norm(stats, xtr), xva = apply_norm(stats, xva), xte = apply_norm(stats, xte);

        ProbeConfig cfg;
        cfg.seed = 1;
        const double control = evaluate(train_probe(xtr, ytr, xva, yva, k, cfg), xte, yte).overall_accuracy;

        Rng shuf(0, "acceptance.shuffle.labels");
        auto ytr_s = ytr, yva_s = yva;
        shuf.shuffle(ytr_s.begin(), ytr_s.end());
        shuf.shuffle(yva_s.begin(), yva_s.end());
        const double shuffled = evaluate(train_probe(xtr, ytr_s, xva, yva_s, k, cfg), xte, yte).overall_accuracy;
        o.note(fmt("unshuffled control accuracy %.1f%% (labels are learnable)", control));
        o.check(control >= 50.0 && std::abs(shuffled - 10.0) <= 3.0,
                fmt("label-shuffled 10-way test accuracy %.1f%% (10 +- 3 pp, 1000 test rows)", shuffled));
    }
    return o;
}

struct Desk {
    RunConfig config;
    RunOptions options;
    bool rendered = false;
};

Outcome desk_classification(Desk& desk) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cmd_render(desk.config, desk.options);
    o.check(r.ok(), fmt("render: %zu failures%s", r.failures.size(), fail_summary(r).c_str()));
    const auto e = cmd_encode(desk.config, desk.options);
    o.check(e.ok(), fmt("encode: %zu failures%s", e.failures.size(), fail_summary(e).c_str()));
    desk.rendered = r.ok() && e.ok();
    if (!desk.rendered) return o;
    const auto t = cmd_probe(desk.config, FeatureMode::timeavg, desk.options);
    const auto f = cmd_probe(desk.config, FeatureMode::flatten, desk.options);
    const double elapsed = seconds_since(t0);

    auto recall = [](const ProbeRun& p, EffectId id) { return p.report.per_class_recall[effect_index(id)]; };
    for (const auto* run : {&t, &f}) {
        std::string row;
        for (EffectId id : kAllEffects) row += fmt(" %s %.0f", std::string(effect_name(id)).c_str(), recall(*run, id));
        o.note(fmt("%s (dim %zu, %zu params, best epoch %zu):%s", run == &t ? "T" : "F", run->feature_dim,
                   run->parameter_count, run->best_epoch, row.c_str()));
    }
    o.check(recall(t, EffectId::LPF) >= 95.0, fmt("time-averaged LPF recall %.1f%% (>= 95)", recall(t, EffectId::LPF)));
    o.check(recall(t, EffectId::HPF) >= 95.0, fmt("time-averaged HPF recall %.1f%% (>= 95)", recall(t, EffectId::HPF)));
    o.check(recall(t, EffectId::TRV) <= 65.0, fmt("time-averaged TRV recall %.1f%% (<= 65)", recall(t, EffectId::TRV)));
    o.check(recall(f, EffectId::TRV) >= 90.0, fmt("flattened TRV recall %.1f%% (>= 90)", recall(f, EffectId::TRV)));
    o.check(elapsed < 600.0, fmt("render + encode + both probes: %.1f s (< 600 s)", elapsed));
    return o;
}

Outcome masking(const Desk& desk) {
    Outcome o;
    if (!desk.rendered) {
        o.check(false, "desk corpus unavailable");
        return o;
    }
    // TRV vs CLN on time-averaged features: the real dimensions carry no
    // signal, so only the appended indicator can matter
    const auto manifest = load_manifest(PipelinePaths{desk.config.output_dir}.manifest());
    const auto feats = load_features(desk.config, manifest, FeatureMode::timeavg);
    std::vector<EffectId> effects;
    std::vector<Split> splits;
    for (const auto& en : manifest.entries) effects.push_back(en.effect.id), splits.push_back(en.split);
    auto tasks = build_binary_tasks(feats.rows, effects, splits);
    auto it = std::find_if(tasks.begin(), tasks.end(), [](const BinaryTask& t) { return t.effect == EffectId::TRV; });
    if (it == tasks.end()) {
        o.check(false, "no TRV task");
        return o;
    }
    BinaryTask task = *it;
    const auto real = static_cast<std::size_t>(task.x_train.cols());
    auto append = [](Matrix& x, const std::vector<int>& y) {
        Matrix out(x.rows(), x.cols() + 2);
        out.leftCols(x.cols()) = x;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            out(r, x.cols()) = y[static_cast<std::size_t>(r)];  // perfect indicator
            out(r, x.cols() + 1) = 0.5;                         // constant
        }
        x = std::move(out);
    };
    append(task.x_train, task.y_train);
    append(task.x_val, task.y_val);
    append(task.x_test, task.y_test);

    ProbeConfig cfg = ProbeConfig::masking(desk.config.probe.seed);
    cfg.lr = desk.config.probe.lr;
    cfg.batch_size = desk.config.probe.batch_size;
    cfg.max_epochs = cfg.patience = desk.config.mask_epochs;
    MaskOptions mo;
    mo.space = desk.config.mask_space;
    mo.jobs = desk.options.jobs;
    const auto mm = mask_sweep({task}, cfg, mo);

    const double leak = mm.delta_pp(0, static_cast<Eigen::Index>(real));
    const double constant = mm.delta_pp(0, static_cast<Eigen::Index>(real + 1));
    double worst_other = 0;
    for (std::size_t d = 0; d < real; ++d) worst_other = std::max(worst_other, std::abs(mm.delta_pp(0, static_cast<Eigen::Index>(d))));
    o.note(fmt("TRV vs CLN, %zu real dims + indicator + constant; baseline test accuracy %.1f%%", real,
               mm.baseline_accuracy[0]));
    o.check(leak >= 20.0, fmt("indicator masked: delta %.1f pp (>= 20)", leak));
    o.check(worst_other <= 5.0, fmt("other dims: max |delta| %.1f pp (<= 5)", worst_other));
    o.check(std::abs(constant) <= 2.0, fmt("constant dim: |delta| %.1f pp (<= 2)", std::abs(constant)));
    return o;
}

Outcome trajectories(const Desk& desk) {
    Outcome o;
    Matrix line(8, 4);
    for (int i = 0; i < 8; ++i) line.row(i) << 0.5 * i, -2.0 * i, 3.0 * i, 1.0;
    const double s_line = trajectory_metrics(line).straightness;
    o.check(s_line == 1.0, fmt("collinear path straightness %.17g (== 1 exactly)", s_line));

    const int n = 4001;
    Matrix arc(n, 2);
    for (int i = 0; i < n; ++i) {
        const double th = std::numbers::pi * i / (n - 1);
        arc.row(i) << std::cos(th), std::sin(th);
    }
    const double s_arc = trajectory_metrics(arc).straightness;
    o.check(std::abs(s_arc - 2 / std::numbers::pi) <= 0.01, fmt("dense semicircle %.5f (2/pi = %.5f +- 0.01)", s_arc, 2 / std::numbers::pi));

    if (!desk.rendered) {
        o.check(false, "desk corpus unavailable");
        return o;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto sw = cmd_sweep(desk.config, desk.options);
    o.check(sw.result.ok(), fmt("sweep: %zu paths in %.1f s, %zu failures%s", sw.paths.size(), seconds_since(t0),
                                sw.result.failures.size(), fail_summary(sw.result).c_str()));
    const std::size_t expected_paths = desk.config.sweep.size() * 2 * desk.config.sweep_clips_per_instrument;
    o.check(sw.paths.size() == expected_paths, fmt("%zu paths (expected %zu)", sw.paths.size(), expected_paths));
    for (const auto& s : sw.summaries)
        o.check(s.all_below_one && s.max < 1.0,
                fmt("%-16s %zu paths: median %.4f mean %.4f min %.4f max %.4f", s.sweep.c_str(), s.paths, s.median,
                    s.mean, s.min, s.max));
    bool every = !sw.paths.empty();
    for (const auto& p : sw.paths) every = every && p.report.straightness < 1.0;
    o.check(every, "every sweep path straightness < 1");
    const auto summary = PipelinePaths{desk.config.output_dir}.sweep() / "summary.csv";
    o.check(fs::exists(summary) && fs::file_size(summary) > 0, "summary statistics written to " + summary.string());
    return o;
}

Outcome determinism(const fs::path& work) {
    Outcome o;
    RunConfig c;
    c.corpus.n_per_instrument = 4;
    c.output_dir = work / "rerun";
    c.probe.max_epochs = 40;
    c.probe.patience = 40;
    c.mask_epochs = 10;
    c.sweep_clips_per_instrument = 2;
    for (auto& s : c.sweep) s.steps = 6;

    auto run_all = [&](std::size_t jobs) {
        fs::remove_all(c.output_dir);
        RunOptions opts;
        opts.jobs = jobs;
        std::size_t failures = cmd_render(c, opts).failures.size();
        failures += cmd_encode(c, opts).failures.size();
        for (FeatureMode m : {FeatureMode::timeavg, FeatureMode::flatten}) {
            failures += cmd_project(c, m, opts).failures.size();
            failures += cmd_probe(c, m, opts).result.failures.size();
        }
        failures += cmd_mask(c, opts).result.failures.size();
        failures += cmd_sweep(c, opts).result.failures.size();
        return std::make_pair(failures, snapshot(c.output_dir));
    };
    const auto [fa, a] = run_all(1);
    const auto [fb, b] = run_all(3);
    o.check(fa == 0 && fb == 0, fmt("both runs clean (%zu, %zu failures)", fa, fb));

    std::size_t manifests = 0, embeddings = 0, csvs = 0, differing = 0;
    for (const auto& [name, bytes] : a) {
        const auto ext = fs::path(name).extension();
        manifests += name == "manifest.json";
        embeddings += ext == ".f32";
        csvs += ext == ".csv";
        auto jt = b.find(name);
        if (jt == b.end() || jt->second != bytes) {
            if (differing++ < 5) o.note("differs: " + name);
        }
    }
    for (const auto& [name, bytes] : b)
        if (!a.count(name) && differing++ < 5) o.note("only in second run: " + name);
    o.check(manifests == 1 && embeddings > 0 && csvs > 0,
            fmt("compared %zu files: %zu manifest, %zu embeddings, %zu CSVs", a.size(), manifests, embeddings, csvs));
    o.check(differing == 0, fmt("rerun (jobs 1 vs 3) byte-identical: %zu differing files", differing));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_work";
    fs::create_directories(work);

    Desk desk;
    desk.config.corpus.n_per_instrument = 32;
    desk.config.output_dir = work / "desk";
    desk.options.jobs = default_jobs();
    apply_env_overrides(desk.config);
    desk.config.validate();
    fs::remove_all(desk.config.output_dir);

    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"probe parameter counts", parameter_counts},
        {"DSP transfer functions", dsp_transfer},
        {"loudness normalization", loudness},
        {"PCA against covariance oracle", pca_oracle},
        {"probe correctness", probe_correctness},
        {"desk-scale effect classification", [&] { return desk_classification(desk); }},
        {"masking validation", [&] { return masking(desk); }},
        {"trajectory straightness", [&] { return trajectories(desk); }},
        {"rerun determinism", [&] { return determinism(work); }},
    };

    std::printf("seed %llu, jobs %zu, work dir %s\n", static_cast<unsigned long long>(desk.config.seed),
                desk.options.jobs, work.string().c_str());
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        std::printf("%s  %zu  %s  (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, seconds_since(t0));
        for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
