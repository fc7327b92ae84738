#include "fxprobe/pipeline.h"

#include "fxprobe/errors.h"
#include "fxprobe/loudness.h"
#include "fxprobe/parallel.h"
#include "fxprobe/rng.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <memory>
#include <numeric>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

namespace fxprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << text;
        if (!out) throw IoError("write failed for " + path.string());
    }
    fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void log(const RunOptions& options, const std::string& msg) {
    if (options.log) options.log(msg);
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return s;
}

/// Source material for rendering, produced lazily so only the clips being
/// worked on are held in memory.
struct SourceSpec {
    std::string source_id;
    Instrument instrument;
    std::function<AudioClip()> load;
};

std::vector<SourceSpec> list_sources(const RunConfig& config) {
    std::vector<SourceSpec> out;
    if (config.corpus.mode == CorpusMode::synth) {
        for (Instrument inst : {Instrument::guitar_like, Instrument::piano_like}) {
            for (std::size_t i = 0; i < config.corpus.n_per_instrument; ++i) {
                const std::uint64_t seed = config.seed;
                out.push_back({synth_source_id(inst, i), inst, [inst, i, seed] {
                                   return inst == Instrument::guitar_like ? synth_guitar(seed, i) : synth_piano(seed, i);
                               }});
            }
        }
        return out;
    }

    const fs::path dir = config.corpus.input_dir;
    if (!fs::is_directory(dir)) throw DataError("input_dir " + dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".wav") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        // slice count needs the decoded length; slicing happens here once
        const AudioClip clip = read_wav(file);
        const auto slices = std::make_shared<std::vector<AudioClip>>(slice_clips(clip, kClipSamples));
        const std::string stem = sanitize(fs::relative(file, dir).replace_extension().string());
        for (std::size_t k = 0; k < slices->size(); ++k) {
            char suffix[16];
            std::snprintf(suffix, sizeof(suffix), "_%03zu", k);
            out.push_back({stem + suffix, Instrument::external, [slices, k] { return (*slices)[k]; }});
        }
    }
    if (out.empty()) throw DataError("no usable audio (>= 2^18 samples) found in " + dir.string());
    return out;
}

json render_section(const RunConfig& config) {
    json corpus{{"mode", config.corpus.mode == CorpusMode::synth ? "synth" : "external"},
                {"n_per_instrument", config.corpus.n_per_instrument},
                {"input_dir", config.corpus.input_dir.string()}};
    return json{{"seed", config.seed}, {"corpus", corpus}, {"target_lufs", config.target_lufs}};
}

std::string clip_id_for(const std::string& source_id, EffectId id) {
    return source_id + "." + std::string(effect_name(id));
}

CorpusManifest require_manifest(const PipelinePaths& paths) {
    if (!fs::exists(paths.manifest()))
        throw DataError("no manifest at " + paths.manifest().string() + " (run render first)");
    return load_manifest(paths.manifest());
}

std::optional<std::size_t> expected_frames(const RunConfig& config) {
    if (config.encoder.kind == EncoderKind::external) return std::nullopt;
    return kClipSamples / config.encoder.mel.hop;
}

std::uint64_t probe_seed(const RunConfig& config) {
    return derive_key(config.seed, "probe", config.probe.seed);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

fs::path PipelinePaths::embeddings(const RunConfig& config) const {
    if (config.encoder.kind == EncoderKind::external) return config.encoder.directory;
    return root / "embeddings" / config.encoder.encoder_id();
}

std::string sweep_name(const SweepSpec& sweep) {
    return std::string(effect_name(sweep.id)) + "." + sweep.param;
}

// --- render ------------------------------------------------------------------

CommandResult cmd_render(const RunConfig& config, const RunOptions& options) {
    config.validate();
    const PipelinePaths paths{config.output_dir};
    CommandResult result;

    const std::string stamp = content_hash(render_section(config));
    const fs::path stamp_file = paths.stamps() / "render";
    if (read_text(stamp_file) == stamp && fs::exists(paths.manifest())) {
        const auto manifest = load_manifest(paths.manifest());
        const bool complete = std::all_of(manifest.entries.begin(), manifest.entries.end(),
                                          [&](const ManifestEntry& e) { return fs::exists(paths.root / e.source); });
        if (complete) {
            result.notes.push_back("render: up to date (" + std::to_string(manifest.entries.size()) + " clips)");
            return result;
        }
    }

    fs::create_directories(paths.sources());
    fs::create_directories(paths.audio());
    const auto sources = list_sources(config);

    std::vector<Instrument> instruments;
    for (const auto& s : sources) instruments.push_back(s.instrument);
    const auto splits = assign_splits(instruments, config.seed);

    std::vector<std::vector<ManifestEntry>> produced(sources.size());
    std::vector<std::vector<std::string>> failures(sources.size());
    parallel_for(sources.size(), options.jobs, [&](std::size_t i) {
        const SourceSpec& src = sources[i];
        AudioClip normalized;
        try {
            normalized = normalize_loudness(src.load(), config.target_lufs);
            write_wav(normalized, paths.sources() / (src.source_id + ".wav"));
        } catch (const Error& e) {
            failures[i].push_back(src.source_id + ": " + e.what());
            return;
        }
        for (EffectId id : kAllEffects) {
            const std::string clip_id = clip_id_for(src.source_id, id);
            try {
                const EffectSpec spec = fixed_spec(id);
                const AudioClip out = normalize_loudness(apply_effect(normalized, spec), config.target_lufs);
                const std::string rel = "audio/" + clip_id + ".wav";
                write_wav(out, paths.root / rel);
                ManifestEntry e;
                e.clip_id = clip_id;
                e.source_id = src.source_id;
                e.source = rel;
                e.instrument = src.instrument;
                e.effect = spec;
                e.split = splits[i];
                produced[i].push_back(std::move(e));
            } catch (const Error& e) {
                failures[i].push_back(clip_id + ": " + e.what());
            }
        }
        log(options, "rendered " + src.source_id);
    });

    CorpusManifest manifest;
    manifest.seed = config.seed;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        for (auto& e : produced[i]) manifest.entries.push_back(std::move(e));
        for (auto& f : failures[i]) result.failures.push_back(std::move(f));
    }
    if (manifest.entries.empty()) throw DataError("render produced no clips");
    manifest.validate(false);
    save_manifest(manifest, paths.manifest());
    if (result.ok()) write_text(stamp_file, stamp);
    result.notes.push_back("render: " + std::to_string(manifest.entries.size()) + " clips from " +
                           std::to_string(sources.size()) + " sources");
    return result;
}

// --- encode ------------------------------------------------------------------

CommandResult cmd_encode(const RunConfig& config, const RunOptions& options) {
    config.validate();
    const PipelinePaths paths{config.output_dir};
    const auto manifest = require_manifest(paths);
    CommandResult result;
    const fs::path dir = paths.embeddings(config);

    if (config.encoder.kind == EncoderKind::external) {
        const ExternalMeta meta = read_external_meta(dir);
        for (const auto& e : manifest.entries) {
            try {
                read_embedding(dir, meta, e.clip_id);
            } catch (const Error& err) {
                result.failures.push_back(e.clip_id + ": " + err.what());
            }
        }
        result.notes.push_back("encode: validated external embeddings in " + dir.string());
        return result;
    }

    const auto encoder = make_encoder(config.encoder);
    const ExternalMeta meta{encoder->dims(), encoder->frame_rate_hz(), encoder->id()};
    fs::create_directories(dir);
    if (fs::exists(dir / "meta.json")) {
        ExternalMeta existing;
        bool same = false;
        try {
            existing = read_external_meta(dir);
            same = existing == meta;
        } catch (const Error&) {
        }
        if (!same) {
            log(options, "warning: embedding metadata changed; re-encoding " + dir.string());
            for (const auto& f : fs::directory_iterator(dir))
                if (f.path().extension() == ".f32") fs::remove(f.path());
        }
    }
    write_external_meta(dir, meta);

    const auto frames = expected_frames(config);
    std::vector<std::string> failures(manifest.entries.size());
    std::vector<std::string> warnings(manifest.entries.size());
    std::vector<char> encoded(manifest.entries.size(), 0);
    parallel_for(manifest.entries.size(), options.jobs, [&](std::size_t i) {
        const ManifestEntry& e = manifest.entries[i];
        const fs::path file = dir / (e.clip_id + ".f32");
        if (fs::exists(file)) {
            try {
                const auto seq = read_embedding(dir, meta, e.clip_id);
                if (!frames || seq.frames == *frames) return;
                throw CorruptionError("unexpected frame count " + std::to_string(seq.frames));
            } catch (const Error& err) {
                warnings[i] = "warning: re-encoding " + e.clip_id + " (" + err.what() + ")";
            }
        }
        try {
            const fs::path wav = paths.root / e.source;
            if (!fs::exists(wav)) throw DataError("missing audio for clip " + e.clip_id + ": " + wav.string());
            write_embedding(dir, e.clip_id, encoder->encode(read_wav(wav)));
            encoded[i] = 1;
        } catch (const Error& err) {
            failures[i] = e.clip_id + ": " + err.what();
        }
    });

    std::size_t count = 0;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        if (!warnings[i].empty()) {
            log(options, warnings[i]);
            result.notes.push_back(warnings[i]);
        }
        if (!failures[i].empty()) result.failures.push_back(failures[i]);
        count += encoded[i];
    }
    result.notes.push_back("encode: " + std::to_string(count) + " encoded, " +
                           std::to_string(manifest.entries.size() - count - result.failures.size()) +
                           " up to date in " + dir.string());
    return result;
}

// --- features ----------------------------------------------------------------

FeatureMatrix load_features(const RunConfig& config, const CorpusManifest& manifest, FeatureMode mode) {
    const PipelinePaths paths{config.output_dir};
    const fs::path dir = paths.embeddings(config);
    const ExternalMeta meta = read_external_meta(dir);
    FeatureMatrix fm;
    fm.mode = mode;
    Eigen::Index width = -1;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        const auto seq = read_embedding(dir, meta, e.clip_id);
        const Vector row = featurize(seq, mode);
        if (width < 0) {
            width = row.size();
            fm.rows.resize(static_cast<Eigen::Index>(manifest.entries.size()), width);
        } else if (row.size() != width) {
            throw DimensionError("inconsistent embedding shapes: " + e.clip_id + " has " + std::to_string(row.size()) +
                                 " features, expected " + std::to_string(width));
        }
        fm.rows.row(static_cast<Eigen::Index>(i)) = row.transpose();
        fm.clip_ids.push_back(e.clip_id);
    }
    if (width < 0) throw DataError("manifest has no entries");
    fm.validate();
    return fm;
}

// --- project -----------------------------------------------------------------

CommandResult cmd_project(const RunConfig& config, FeatureMode mode, const RunOptions& options) {
    config.validate();
    const PipelinePaths paths{config.output_dir};
    const auto manifest = require_manifest(paths);
    const auto fm = load_features(config, manifest, mode);
    Matrix x = fm.rows;
    if (config.project_normalize) x = apply_norm(fit_norm(x), x);
    const auto model = pca_fit(x, 3);
    const Matrix scores = pca_transform(model, x);

    std::ostringstream csv;
    csv << "clip_id,instrument,effect,param_value,pc1,pc2,pc3\n";
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        const auto r = static_cast<Eigen::Index>(i);
        csv << e.clip_id << ',' << instrument_name(e.instrument) << ',' << effect_name(e.effect.id) << ','
            << (e.param_value ? fmt_num(*e.param_value) : "") << ',' << fmt_num(scores(r, 0)) << ','
            << fmt_num(scores(r, 1)) << ',' << fmt_num(scores(r, 2)) << '\n';
    }
    const fs::path out = paths.project(mode) / "pca_projection.csv";
    write_text(out, csv.str());

    json var = json::array();
    for (Eigen::Index c = 0; c < model.explained_variance.size(); ++c) var.push_back(model.explained_variance[c]);
    write_text(paths.project(mode) / "pca.json",
               json{{"explained_variance", var},
                    {"total_variance", model.total_variance},
                    {"features", x.cols()},
                    {"rows", x.rows()}}
                       .dump(2) + "\n");
    CommandResult result;
    result.notes.push_back("project: " + std::to_string(x.rows()) + " rows x " + std::to_string(x.cols()) +
                           " features -> " + out.string());
    log(options, result.notes.back());
    return result;
}

// --- probe -------------------------------------------------------------------

std::string report_csv(const std::string& encoder_id, FeatureMode mode, std::size_t dim,
                       std::size_t parameter_count, const EvalReport& report) {
    std::ostringstream csv;
    csv << "encoder,mode,dim,probe_params";
    for (EffectId id : kAllEffects) csv << ',' << effect_name(id);
    csv << ",AVG,AVG_overall\n";
    csv << encoder_id << ',' << (mode == FeatureMode::timeavg ? "T" : "F") << ',' << dim << ',' << parameter_count;
    for (EffectId id : kAllEffects) csv << ',' << fmt_num(report.per_class_recall[effect_index(id)]);
    csv << ',' << fmt_num(report.macro_recall) << ',' << fmt_num(report.overall_accuracy) << '\n';
    return csv.str();
}

ProbeRun cmd_probe(const RunConfig& config, FeatureMode mode, const RunOptions& options) {
    config.validate();
    const PipelinePaths paths{config.output_dir};
    const auto manifest = require_manifest(paths);
    const auto fm = load_features(config, manifest, mode);

    std::array<std::vector<Eigen::Index>, 3> rows;
    std::array<std::vector<int>, 3> labels;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        const auto s = static_cast<std::size_t>(e.split);
        rows[s].push_back(static_cast<Eigen::Index>(i));
        labels[s].push_back(static_cast<int>(effect_index(e.effect.id)));
    }
    if (config.shuffle_labels) {
        for (std::size_t s = 0; s < 3; ++s) {
            Rng rng(config.seed, "probe.shuffle_labels", s);
            rng.shuffle(labels[s].begin(), labels[s].end());
        }
    }
    const auto take = [&](std::size_t s) {
        Matrix m(static_cast<Eigen::Index>(rows[s].size()), fm.rows.cols());
        for (std::size_t k = 0; k < rows[s].size(); ++k) m.row(static_cast<Eigen::Index>(k)) = fm.rows.row(rows[s][k]);
        return m;
    };
    const Matrix raw_train = take(0), raw_val = take(1), raw_test = take(2);
    if (raw_test.rows() == 0) throw DataError("test split is empty (corpus too small)");
    const NormStats stats = fit_norm(raw_train);

    ProbeConfig pc = config.probe;
    pc.seed = probe_seed(config);
    log(options, "probe: training on " + std::to_string(raw_train.rows()) + " x " + std::to_string(raw_train.cols()));
    const ProbeModel model =
        train_probe(apply_norm(stats, raw_train), labels[0], apply_norm(stats, raw_val), labels[1], kNumEffects, pc);

    ProbeRun run;
    run.report = evaluate(model, apply_norm(stats, raw_test), labels[2]);
    run.feature_dim = model.features();
    run.parameter_count = model.parameter_count();
    run.best_epoch = model.best_epoch;
    run.epochs_run = model.history.size();

    const fs::path dir = paths.probe(mode);
    const std::string encoder_id = read_external_meta(paths.embeddings(config)).encoder_id;
    write_text(dir / "report.csv", report_csv(encoder_id, mode, run.feature_dim, run.parameter_count, run.report));

    json recall = json::object();
    for (EffectId id : kAllEffects) {
        const double r = run.report.per_class_recall[effect_index(id)];
        recall[std::string(effect_name(id))] = std::isnan(r) ? json(nullptr) : json(r);
    }
    json confusion = json::array();
    for (Eigen::Index r = 0; r < run.report.confusion.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < run.report.confusion.cols(); ++c) row.push_back(run.report.confusion(r, c));
        confusion.push_back(row);
    }
    json history = json::array();
    for (const auto& h : model.history) history.push_back({{"train_loss", h.train_loss}, {"val_accuracy", h.val_accuracy},
                                                            {"val_loss", h.val_loss}});
    const json report{{"encoder_id", encoder_id},
                      {"mode", std::string(feature_mode_name(mode))},
                      {"feature_dim", run.feature_dim},
                      {"parameter_count", run.parameter_count},
                      {"train_rows", raw_train.rows()},
                      {"val_rows", raw_val.rows()},
                      {"test_rows", raw_test.rows()},
                      {"shuffle_labels", config.shuffle_labels},
                      {"best_epoch", run.best_epoch},
                      {"best_val_accuracy", model.best_val_accuracy},
                      {"per_class_recall", recall},
                      {"macro_recall", run.report.macro_recall},
                      {"overall_accuracy", run.report.overall_accuracy},
                      {"confusion", confusion},
                      {"history", history}};
    write_text(dir / "report.json", report.dump(2) + "\n");
    run.result.notes.push_back("probe: overall " + fmt_num(run.report.overall_accuracy) + "%, macro " +
                               fmt_num(run.report.macro_recall) + "% -> " + (dir / "report.csv").string());
    return run;
}

// --- mask --------------------------------------------------------------------

std::vector<BinaryTask> build_binary_tasks(const Matrix& features, const std::vector<EffectId>& effects,
                                           const std::vector<Split>& splits) {
    if (static_cast<std::size_t>(features.rows()) != effects.size() || effects.size() != splits.size())
        throw DimensionError("features, effects and splits must align");
    std::vector<BinaryTask> tasks;
    for (EffectId target : kAllEffects) {
        if (target == EffectId::CLN) continue;
        BinaryTask task;
        task.effect = target;
        std::array<std::vector<Eigen::Index>, 3> rows;
        std::array<std::vector<int>*, 3> ys = {&task.y_train, &task.y_val, &task.y_test};
        for (std::size_t i = 0; i < effects.size(); ++i) {
            if (effects[i] != target && effects[i] != EffectId::CLN) continue;
            const auto s = static_cast<std::size_t>(splits[i]);
            rows[s].push_back(static_cast<Eigen::Index>(i));
            ys[s]->push_back(effects[i] == target ? 1 : 0);
        }
        std::array<Matrix*, 3> xs = {&task.x_train, &task.x_val, &task.x_test};
        for (std::size_t s = 0; s < 3; ++s) {
            xs[s]->resize(static_cast<Eigen::Index>(rows[s].size()), features.cols());
            for (std::size_t k = 0; k < rows[s].size(); ++k)
                xs[s]->row(static_cast<Eigen::Index>(k)) = features.row(rows[s][k]);
        }
        tasks.push_back(std::move(task));
    }
    return tasks;
}

MaskRun cmd_mask(const RunConfig& config, const RunOptions& options) {
    config.validate();
    const PipelinePaths paths{config.output_dir};
    const auto manifest = require_manifest(paths);
    const auto fm = load_features(config, manifest, FeatureMode::timeavg);

    std::vector<EffectId> effects;
    std::vector<Split> splits;
    for (const auto& e : manifest.entries) {
        effects.push_back(e.effect.id);
        splits.push_back(e.split);
    }
    const auto tasks = build_binary_tasks(fm.rows, effects, splits);
    ProbeConfig pc = ProbeConfig::masking(probe_seed(config));
    pc.lr = config.probe.lr;
    pc.batch_size = config.probe.batch_size;
    pc.beta1 = config.probe.beta1;
    pc.beta2 = config.probe.beta2;
    pc.eps = config.probe.eps;
    pc.weight_decay = config.probe.weight_decay;
    pc.max_epochs = config.mask_epochs;
    pc.patience = config.mask_epochs;

    log(options, "mask: " + std::to_string(tasks.size()) + " effects x " + std::to_string(fm.rows.cols()) + " dims");
    MaskRun run;
    run.matrix = mask_sweep(tasks, pc, MaskOptions{config.mask_space, options.jobs});

    const auto dims = run.matrix.delta_pp.cols();
    std::ostringstream delta, acc;
    delta << "effect,baseline_acc";
    acc << "effect,baseline_acc";
    for (Eigen::Index d = 0; d < dims; ++d) {
        delta << ",d" << d;
        acc << ",d" << d;
    }
    delta << '\n';
    acc << '\n';
    for (std::size_t t = 0; t < run.matrix.effects.size(); ++t) {
        const auto r = static_cast<Eigen::Index>(t);
        delta << effect_name(run.matrix.effects[t]) << ',' << fmt_num(run.matrix.baseline_accuracy[r]);
        acc << effect_name(run.matrix.effects[t]) << ',' << fmt_num(run.matrix.baseline_accuracy[r]);
        for (Eigen::Index d = 0; d < dims; ++d) {
            delta << ',' << fmt_num(run.matrix.delta_pp(r, d));
            acc << ',' << fmt_num(run.matrix.masked_accuracy(r, d));
        }
        delta << '\n';
        acc << '\n';
    }
    write_text(paths.mask() / "mask_matrix.csv", delta.str());
    write_text(paths.mask() / "mask_accuracy.csv", acc.str());
    run.result.notes.push_back("mask: " + std::to_string(run.matrix.effects.size()) + "x" + std::to_string(dims) +
                               " delta matrix -> " + (paths.mask() / "mask_matrix.csv").string());
    return run;
}

// --- sweep -------------------------------------------------------------------

SweepRun cmd_sweep(const RunConfig& config, const RunOptions& options) {
    config.validate();
    if (config.encoder.kind == EncoderKind::external)
        throw ConfigError("sweep renders new audio and needs an in-process encoder (mel or random_projection)");
    const PipelinePaths paths{config.output_dir};
    const auto manifest = require_manifest(paths);
    const auto encoder = make_encoder(config.encoder);

    // corpus PCA over time-averaged embeddings of every rendered clip
    const auto fm = load_features(config, manifest, FeatureMode::timeavg);
    const PcaModel pca = pca_fit(fm.rows, std::min<std::size_t>(3, static_cast<std::size_t>(fm.rows.cols())));

    std::vector<std::pair<std::string, Instrument>> chosen;
    std::map<Instrument, std::size_t> taken;
    for (const auto& id : manifest.source_ids()) {
        const auto it = std::find_if(manifest.entries.begin(), manifest.entries.end(),
                                     [&](const ManifestEntry& e) { return e.source_id == id; });
        if (taken[it->instrument] < config.sweep_clips_per_instrument) {
            ++taken[it->instrument];
            chosen.emplace_back(id, it->instrument);
        }
    }

    struct Job {
        std::size_t sweep;
        std::size_t source;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < config.sweep.size(); ++s)
        for (std::size_t c = 0; c < chosen.size(); ++c) jobs.push_back({s, c});

    std::vector<std::optional<SweepPath>> results(jobs.size());
    std::vector<std::string> failures(jobs.size());
    parallel_for(jobs.size(), options.jobs, [&](std::size_t j) {
        const SweepSpec& sweep = config.sweep[jobs[j].sweep];
        const auto& [source_id, instrument] = chosen[jobs[j].source];
        try {
            const AudioClip source = read_wav(paths.sources() / (source_id + ".wav"));
            const auto specs = sweep_specs(sweep);
            Matrix points(static_cast<Eigen::Index>(specs.size()), static_cast<Eigen::Index>(encoder->dims()));
            for (std::size_t k = 0; k < specs.size(); ++k) {
                const AudioClip out = normalize_loudness(apply_effect(source, specs[k]), config.target_lufs);
                points.row(static_cast<Eigen::Index>(k)) = time_average(encoder->encode(out)).transpose();
            }
            SweepPath path;
            path.sweep = sweep_name(sweep);
            path.source_id = source_id;
            path.instrument = instrument;
            path.values = sweep_values(sweep);
            path.report = trajectory_metrics(points, &pca);
            results[j] = std::move(path);
        } catch (const Error& e) {
            failures[j] = sweep_name(sweep) + " on " + source_id + ": " + e.what();
        }
        log(options, "swept " + sweep_name(sweep) + " on " + source_id);
    });

    SweepRun run;
    std::ostringstream paths_csv, traj_csv, summary_csv;
    paths_csv << "sweep,source_id,instrument,step,param_value,pc1,pc2,pc3\n";
    traj_csv << "sweep,source_id,instrument,arc_length,chord_length,straightness\n";
    summary_csv << "sweep,paths,median_straightness,mean_straightness,min_straightness,max_straightness,all_below_one\n";
    std::map<std::string, std::vector<double>> by_sweep;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (!failures[j].empty()) run.result.failures.push_back(failures[j]);
        if (!results[j]) continue;
        const SweepPath& p = *results[j];
        for (std::size_t k = 0; k < p.values.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(k);
            paths_csv << p.sweep << ',' << p.source_id << ',' << instrument_name(p.instrument) << ',' << k << ','
                      << fmt_num(p.values[k]);
            for (Eigen::Index c = 0; c < 3; ++c)
                paths_csv << ',' << (c < p.report.pca3_path.cols() ? fmt_num(p.report.pca3_path(r, c)) : "");
            paths_csv << '\n';
        }
        traj_csv << p.sweep << ',' << p.source_id << ',' << instrument_name(p.instrument) << ','
                 << fmt_num(p.report.arc_length) << ',' << fmt_num(p.report.chord_length) << ','
                 << fmt_num(p.report.straightness) << '\n';
        by_sweep[p.sweep].push_back(p.report.straightness);
        run.paths.push_back(p);
    }
    for (const auto& sweep : config.sweep) {
        const std::string name = sweep_name(sweep);
        const auto& values = by_sweep[name];
        SweepSummary s;
        s.sweep = name;
        s.paths = values.size();
        if (!values.empty()) {
            s.median = median_of(values);
            s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
            s.min = *std::min_element(values.begin(), values.end());
            s.max = *std::max_element(values.begin(), values.end());
            s.all_below_one = s.max < 1.0;
        }
        summary_csv << name << ',' << s.paths << ',' << fmt_num(s.median) << ',' << fmt_num(s.mean) << ','
                    << fmt_num(s.min) << ',' << fmt_num(s.max) << ',' << (s.all_below_one ? "true" : "false") << '\n';
        run.summaries.push_back(s);
    }
    write_text(paths.sweep() / "paths.csv", paths_csv.str());
    write_text(paths.sweep() / "trajectories.csv", traj_csv.str());
    write_text(paths.sweep() / "summary.csv", summary_csv.str());
    run.result.notes.push_back("sweep: " + std::to_string(run.paths.size()) + " paths -> " +
                               (paths.sweep() / "summary.csv").string());
    return run;
}

}  // namespace fxprobe
