#include "curev/config.hpp"

#include "curev/jsonl.hpp"

namespace curev {

using nlohmann::json;

namespace {

const json* section(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return nullptr;
    if (!j[key].is_object()) throw ConfigError(std::string(key) + ": expected an object");
    return &j[key];
}

std::optional<std::filesystem::path> path_at(const json& paths, const char* key, const std::filesystem::path& base,
                                             bool must_exist) {
    if (!paths.contains(key) || paths[key].is_null()) return std::nullopt;
    if (!paths[key].is_string()) throw ConfigError(std::string("paths.") + key + ": expected a string");
    std::filesystem::path p = paths[key].get<std::string>();
    if (p.is_relative()) p = base / p;
    p = p.lexically_normal();
    if (must_exist && !std::filesystem::exists(p))
        throw ConfigError(std::string("paths.") + key + ": " + p.string() + " does not exist");
    return p;
}

template <class T>
T get(const json& obj, const char* key, T fallback, const char* where) {
    if (!obj.contains(key) || obj[key].is_null()) return fallback;
    try {
        return obj[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(where) + "." + key + ": wrong type");
    }
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    PipelineConfig c;

    if (const auto* paths = section(j, "paths")) {
        c.corpus = path_at(*paths, "corpus", base_dir, true);
        c.out_dir = path_at(*paths, "out_dir", base_dir, false);
        c.fixtures = path_at(*paths, "fixtures", base_dir, true);
        c.prompts = path_at(*paths, "prompts", base_dir, true);
    }
    if (const auto* judge = section(j, "judge")) {
        c.backend = get<std::string>(*judge, "backend", c.backend, "judge");
        if (c.backend != "mock" && c.backend != "remote") throw ConfigError("judge.backend: expected mock or remote");
        try {
            c.judge = judge::JudgeConfig::from_json(*judge);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("judge: ") + e.what());
        } catch (const judge::JudgeConfigError& e) {
            throw ConfigError(std::string("judge: ") + e.what());
        }
    }
    if (const auto* filter = section(j, "filter")) {
        c.threshold = get<int>(*filter, "threshold", c.threshold, "filter");
        if (!score_in_range(c.threshold)) throw ConfigError("filter.threshold: must lie in 1..10");
    }
    if (const auto* seeds = section(j, "seeds")) {
        c.split_seed = get<std::uint64_t>(*seeds, "split", c.split_seed, "seeds");
        c.pairing_seed = get<std::uint64_t>(*seeds, "pairing", c.pairing_seed, "seeds");
    }
    if (const auto* mapping = section(j, "field_mapping")) {
        try {
            c.field_mapping = corpus::FieldMapping::from_json(*mapping);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("field_mapping: ") + e.what());
        }
    }
    if (j.contains("codebleu_weights") && !j["codebleu_weights"].is_null()) {
        const auto& w = j["codebleu_weights"];
        if (!w.is_array() || w.size() != 4) throw ConfigError("codebleu_weights: expected four numbers");
        for (std::size_t i = 0; i < 4; ++i) {
            if (!w[i].is_number()) throw ConfigError("codebleu_weights: expected four numbers");
            c.codebleu_weights.values[i] = w[i].get<double>();
        }
        try {
            c.codebleu_weights.validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("codebleu_weights: ") + e.what());
        }
    }
    if (const auto* task = section(j, "taskprep")) {
        c.train_fraction = get<double>(*task, "train_fraction", c.train_fraction, "taskprep");
        if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
            throw ConfigError("taskprep.train_fraction: must lie strictly between 0 and 1");
        if (task->contains("pairs") && !(*task)["pairs"].is_null())
            c.pairs = get<std::size_t>(*task, "pairs", 0, "taskprep");
        const auto sampling = get<std::string>(*task, "sampling", "uniform", "taskprep");
        if (sampling == "uniform") {
            c.sampling = corpus::Sampling::uniform;
        } else if (sampling == "stratified_by_language") {
            c.sampling = corpus::Sampling::stratified_by_language;
        } else {
            throw ConfigError("taskprep.sampling: expected uniform or stratified_by_language");
        }
    }
    if (const auto* annotate = section(j, "annotate")) {
        c.port = get<int>(*annotate, "port", c.port, "annotate");
        if (c.port < 0 || c.port > 65535) throw ConfigError("annotate.port: out of range");
        c.annotators = get<std::vector<std::string>>(*annotate, "annotators", c.annotators, "annotate");
        if (c.annotators.size() != 2 || c.annotators[0].empty() || c.annotators[1].empty() ||
            c.annotators[0] == c.annotators[1])
            throw ConfigError("annotate.annotators: expected two distinct non-empty ids");
    }
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& file) {
    json j;
    try {
        j = json::parse(jsonl::read_text(file));
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    return from_json(j, file.parent_path());
}

}  // namespace curev
