#include "fxprobe/corpus.h"

#include "fxprobe/errors.h"
#include "fxprobe/rng.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace fxprobe {

using nlohmann::json;

std::string_view instrument_name(Instrument i) {
    switch (i) {
    case Instrument::guitar_like: return "guitar-like";
    case Instrument::piano_like: return "piano-like";
    case Instrument::external: return "external";
    }
    return "external";
}

Instrument parse_instrument(std::string_view s) {
    if (s == "guitar-like") return Instrument::guitar_like;
    if (s == "piano-like") return Instrument::piano_like;
    if (s == "external") return Instrument::external;
    throw ValidationError("unknown instrument '" + std::string(s) + "'");
}

std::string_view split_name(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    }
    return "train";
}

Split parse_split(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw ValidationError("unknown split '" + std::string(s) + "'");
}

json to_json(const EffectSpec& spec) {
    json params = json::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    return json{{"id", std::string(effect_name(spec.id))}, {"params", params}};
}

EffectSpec effect_spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("id")) throw ValidationError("effect spec needs an 'id'");
    for (const auto& [k, v] : j.items())
        if (k != "id" && k != "params") throw ValidationError("unknown effect spec key '" + k + "'");
    EffectSpec spec;
    spec.id = parse_effect(j.at("id").get<std::string>());
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) {
            if (!v.is_number()) throw ValidationError("effect parameter '" + k + "' must be a number");
            spec.params[k] = v.get<double>();
        }
    }
    spec.validate();
    return spec;
}

void CorpusManifest::validate(bool require_all_effects) const {
    std::set<std::string> ids;
    std::map<std::string, Split> split_of;
    std::map<std::string, std::set<EffectId>> effects_of;
    for (const auto& e : entries) {
        if (!ids.insert(e.clip_id).second) throw DataError("duplicate clip_id '" + e.clip_id + "'");
        auto [it, fresh] = split_of.emplace(e.source_id, e.split);
        if (!fresh && it->second != e.split)
            throw DataError("source '" + e.source_id + "' has variants in several splits");
        effects_of[e.source_id].insert(e.effect.id);
    }
    if (require_all_effects) {
        for (const auto& [src, effects] : effects_of)
            if (effects.size() != kNumEffects)
                throw DataError("source '" + src + "' is missing effect classes");
    }
}

std::vector<std::string> CorpusManifest::source_ids() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& e : entries)
        if (seen.insert(e.source_id).second) out.push_back(e.source_id);
    return out;
}

json to_json(const CorpusManifest& manifest) {
    json entries = json::array();
    for (const auto& e : manifest.entries) {
        json j{{"clip_id", e.clip_id},
               {"source_id", e.source_id},
               {"source", e.source},
               {"instrument", std::string(instrument_name(e.instrument))},
               {"effect", to_json(e.effect)},
               {"split", std::string(split_name(e.split))}};
        j["param_value"] = e.param_value ? json(*e.param_value) : json(nullptr);
        entries.push_back(std::move(j));
    }
    return json{{"seed", manifest.seed}, {"entries", entries}};
}

CorpusManifest manifest_from_json(const json& j) {
    try {
        CorpusManifest m;
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [k, v] : j.items())
            if (k != "seed" && k != "entries") throw FormatError("unknown manifest key '" + k + "'");
        for (const auto& je : j.at("entries")) {
            for (const auto& [k, v] : je.items())
                if (k != "clip_id" && k != "source_id" && k != "source" && k != "instrument" && k != "effect" &&
                    k != "param_value" && k != "split")
                    throw FormatError("unknown manifest entry key '" + k + "'");
            ManifestEntry e;
            e.clip_id = je.at("clip_id").get<std::string>();
            e.source_id = je.at("source_id").get<std::string>();
            e.source = je.at("source").get<std::string>();
            e.instrument = parse_instrument(je.at("instrument").get<std::string>());
            e.effect = effect_spec_from_json(je.at("effect"));
            e.split = parse_split(je.at("split").get<std::string>());
            if (je.contains("param_value") && !je.at("param_value").is_null())
                e.param_value = je.at("param_value").get<double>();
            m.entries.push_back(std::move(e));
        }
        return m;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("malformed manifest: ") + ex.what());
    }
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << to_json(manifest).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw FormatError("manifest is not valid JSON: " + std::string(ex.what()));
    }
    return manifest_from_json(j);
}

std::vector<Split> assign_splits(const std::vector<Instrument>& source_instruments, std::uint64_t seed) {
    std::vector<Split> out(source_instruments.size(), Split::train);
    for (Instrument inst : {Instrument::guitar_like, Instrument::piano_like, Instrument::external}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < source_instruments.size(); ++i)
            if (source_instruments[i] == inst) members.push_back(i);
        if (members.empty()) continue;
        Rng rng(seed, "split", static_cast<std::uint64_t>(inst));
        rng.shuffle(members.begin(), members.end());
        const std::size_t n = members.size();
        std::size_t n_val = 0, n_test = 0;
        if (n >= 3) {
            n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * n)));
            n_test = n_val;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (k < n_val) out[members[k]] = Split::val;
            else if (k < n_val + n_test) out[members[k]] = Split::test;
        }
    }
    return out;
}

}  // namespace fxprobe
