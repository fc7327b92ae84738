#include "fxprobe/config.h"

#include "fxprobe/errors.h"
#include "fxprobe/rng.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>

namespace fxprobe {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
            if (std::is_unsigned_v<T> && !v.is_number_unsigned() && v.get<long long>() < 0)
                throw ConfigError(where + "." + key + " must be non-negative");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
        } else {
            if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
        }
        out = v.get<T>();
    } catch (const json::exception& ex) {
        throw ConfigError(where + "." + key + ": " + ex.what());
    }
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) return (base / path).lexically_normal();
    return path;
}

SweepSpec parse_sweep(const json& j, std::size_t index) {
    const std::string where = "sweep[" + std::to_string(index) + "]";
    only_keys(j, where, {"id", "param", "min", "max", "steps", "scale"});
    SweepSpec s;
    std::string id, scale = "linear";
    read(j, "id", id, where);
    read(j, "param", s.param, where);
    read(j, "min", s.min, where);
    read(j, "max", s.max, where);
    read(j, "steps", s.steps, where);
    read(j, "scale", scale, where);
    if (!j.contains("id") || !j.contains("param") || !j.contains("min") || !j.contains("max"))
        throw ConfigError(where + " requires id, param, min and max");
    try {
        s.id = parse_effect(id);
    } catch (const ValidationError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    if (scale == "linear") s.scale = SweepScale::linear;
    else if (scale == "log") s.scale = SweepScale::log;
    else throw ConfigError(where + ".scale must be linear or log");
    return s;
}

}  // namespace

std::string content_hash(const json& j) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

void RunConfig::validate() const {
    if (corpus.mode == CorpusMode::synth && corpus.n_per_instrument < 1)
        throw ConfigError("corpus.n_per_instrument must be >= 1");
    if (corpus.mode == CorpusMode::external && corpus.input_dir.empty())
        throw ConfigError("corpus.input_dir is required for external corpora");
    if (!std::isfinite(target_lufs) || target_lufs > 0.0) throw ConfigError("target_lufs must be finite and <= 0");
    encoder.validate();
    probe.validate();
    if (mask_epochs < 1) throw ConfigError("probe.mask_epochs must be >= 1");
    for (const auto& s : sweep) {
        try {
            s.validate();
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
    }
    if (sweep_clips_per_instrument < 1) throw ConfigError("sweep_clips_per_instrument must be >= 1");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
    only_keys(j, "config", {"seed", "corpus", "target_lufs", "encoder", "probe", "sweep",
                            "sweep_clips_per_instrument", "project", "output_dir"});
    RunConfig c;
    read(j, "seed", c.seed, "config");
    read(j, "target_lufs", c.target_lufs, "config");
    read(j, "sweep_clips_per_instrument", c.sweep_clips_per_instrument, "config");
    std::string out_dir;
    read(j, "output_dir", out_dir, "config");
    if (!out_dir.empty()) c.output_dir = resolve(out_dir, base_dir);
    else if (!base_dir.empty()) c.output_dir = (base_dir / c.output_dir).lexically_normal();

    if (j.contains("corpus")) {
        const json& jc = j.at("corpus");
        only_keys(jc, "corpus", {"mode", "n_per_instrument", "input_dir"});
        std::string mode = "synth", input;
        read(jc, "mode", mode, "corpus");
        read(jc, "n_per_instrument", c.corpus.n_per_instrument, "corpus");
        read(jc, "input_dir", input, "corpus");
        if (mode == "synth") c.corpus.mode = CorpusMode::synth;
        else if (mode == "external") c.corpus.mode = CorpusMode::external;
        else throw ConfigError("corpus.mode must be synth or external");
        if (!input.empty()) c.corpus.input_dir = resolve(input, base_dir);
    }

    if (j.contains("encoder")) {
        const json& je = j.at("encoder");
        only_keys(je, "encoder", {"kind", "n_fft", "hop", "n_mels", "fmin", "fmax", "log_floor", "dims",
                                  "seed", "directory"});
        std::string kind = "mel", dir;
        read(je, "kind", kind, "encoder");
        read(je, "n_fft", c.encoder.mel.n_fft, "encoder");
        read(je, "hop", c.encoder.mel.hop, "encoder");
        read(je, "n_mels", c.encoder.mel.n_mels, "encoder");
        read(je, "fmin", c.encoder.mel.fmin, "encoder");
        read(je, "fmax", c.encoder.mel.fmax, "encoder");
        read(je, "log_floor", c.encoder.mel.log_floor, "encoder");
        read(je, "dims", c.encoder.projection_dims, "encoder");
        read(je, "seed", c.encoder.projection_seed, "encoder");
        read(je, "directory", dir, "encoder");
        if (kind == "mel") c.encoder.kind = EncoderKind::mel;
        else if (kind == "random_projection") c.encoder.kind = EncoderKind::random_projection;
        else if (kind == "external") c.encoder.kind = EncoderKind::external;
        else throw ConfigError("encoder.kind must be mel, random_projection or external");
        if (!dir.empty()) c.encoder.directory = resolve(dir, base_dir);
    }

    if (j.contains("probe")) {
        const json& jp = j.at("probe");
        only_keys(jp, "probe", {"lr", "batch_size", "max_epochs", "patience", "beta1", "beta2", "eps",
                                "weight_decay", "seed", "mask_epochs", "mask_space", "shuffle_labels"});
        read(jp, "lr", c.probe.lr, "probe");
        read(jp, "batch_size", c.probe.batch_size, "probe");
        read(jp, "max_epochs", c.probe.max_epochs, "probe");
        read(jp, "patience", c.probe.patience, "probe");
        read(jp, "beta1", c.probe.beta1, "probe");
        read(jp, "beta2", c.probe.beta2, "probe");
        read(jp, "eps", c.probe.eps, "probe");
        read(jp, "weight_decay", c.probe.weight_decay, "probe");
        read(jp, "seed", c.probe.seed, "probe");
        read(jp, "mask_epochs", c.mask_epochs, "probe");
        read(jp, "shuffle_labels", c.shuffle_labels, "probe");
        std::string space = "normalized";
        read(jp, "mask_space", space, "probe");
        if (space == "normalized") c.mask_space = MaskSpace::normalized;
        else if (space == "raw") c.mask_space = MaskSpace::raw;
        else throw ConfigError("probe.mask_space must be normalized or raw");
    }

    if (j.contains("sweep")) {
        const json& js = j.at("sweep");
        if (!js.is_array()) throw ConfigError("sweep must be an array");
        c.sweep.clear();
        for (std::size_t i = 0; i < js.size(); ++i) c.sweep.push_back(parse_sweep(js[i], i));
    }

    if (j.contains("project")) {
        only_keys(j.at("project"), "project", {"normalize"});
        read(j.at("project"), "normalize", c.project_normalize, "project");
    }

    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ConfigError("config is not valid JSON: " + std::string(ex.what()));
    }
    return parse_run_config(j, path.parent_path());
}

json to_json(const RunConfig& c) {
    json corpus{{"mode", c.corpus.mode == CorpusMode::synth ? "synth" : "external"},
                {"n_per_instrument", c.corpus.n_per_instrument}};
    if (!c.corpus.input_dir.empty()) corpus["input_dir"] = c.corpus.input_dir.string();

    json encoder{{"n_fft", c.encoder.mel.n_fft},    {"hop", c.encoder.mel.hop},
                 {"n_mels", c.encoder.mel.n_mels},  {"fmin", c.encoder.mel.fmin},
                 {"fmax", c.encoder.mel.fmax},      {"log_floor", c.encoder.mel.log_floor},
                 {"dims", c.encoder.projection_dims}, {"seed", c.encoder.projection_seed}};
    switch (c.encoder.kind) {
    case EncoderKind::mel: encoder["kind"] = "mel"; break;
    case EncoderKind::random_projection: encoder["kind"] = "random_projection"; break;
    case EncoderKind::external: encoder["kind"] = "external"; break;
    }
    if (!c.encoder.directory.empty()) encoder["directory"] = c.encoder.directory.string();

    json probe{{"lr", c.probe.lr},
               {"batch_size", c.probe.batch_size},
               {"max_epochs", c.probe.max_epochs},
               {"patience", c.probe.patience},
               {"beta1", c.probe.beta1},
               {"beta2", c.probe.beta2},
               {"eps", c.probe.eps},
               {"weight_decay", c.probe.weight_decay},
               {"seed", c.probe.seed},
               {"mask_epochs", c.mask_epochs},
               {"mask_space", c.mask_space == MaskSpace::normalized ? "normalized" : "raw"},
               {"shuffle_labels", c.shuffle_labels}};

    json sweep = json::array();
    for (const auto& s : c.sweep)
        sweep.push_back({{"id", std::string(effect_name(s.id))},
                         {"param", s.param},
                         {"min", s.min},
                         {"max", s.max},
                         {"steps", s.steps},
                         {"scale", s.scale == SweepScale::log ? "log" : "linear"}});

    return json{{"seed", c.seed},
                {"corpus", corpus},
                {"target_lufs", c.target_lufs},
                {"encoder", encoder},
                {"probe", probe},
                {"sweep", sweep},
                {"sweep_clips_per_instrument", c.sweep_clips_per_instrument},
                {"project", {{"normalize", c.project_normalize}}},
                {"output_dir", c.output_dir.string()}};
}

void apply_env_overrides(RunConfig& config) {
    if (const char* s = std::getenv("FXPROBE_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(s, &end, 10);
        if (end == s || *end != '\0') throw ConfigError("FXPROBE_SEED must be an unsigned integer");
        config.seed = v;
    }
}

}  // namespace fxprobe
