#include "curev/taskprep.hpp"

#include <cstdio>
#include <map>

#include "curev/jsonl.hpp"

namespace curev::taskprep {

using nlohmann::json;

std::string_view task_name(Task task) {
    return task == Task::comment_generation ? "comment_generation" : "code_refinement";
}

std::string_view variant_name(Variant variant) { return variant == Variant::original ? "original" : "curated"; }

std::optional<Task> parse_task(std::string_view text) {
    for (auto t : {Task::comment_generation, Task::code_refinement})
        if (text == task_name(t)) return t;
    return std::nullopt;
}

json TrainingMetadata::to_json() const {
    return json{{"base_model", base_model}, {"lora_r", lora_r},         {"lora_alpha", lora_alpha},
                {"lora_dropout", lora_dropout}, {"batch_size", batch_size}, {"epochs", epochs}};
}

std::string default_prompt_template(Task task) {
    if (task == Task::comment_generation)
        return "Review the following code change and write a review comment.\n\n"
               "### Code change\n{diff}\n\n### Review comment\n";
    return "Revise the code according to the review comment. Answer with the revised change as a unified diff.\n\n"
           "### Old file\n{old_file}\n\n### Code change\n{diff}\n\n### Review comment\n{comment}\n\n"
           "### Revised code change\n";
}

json task_record(const corpus::PairedSample& pair, Task task, Variant variant) {
    const auto& s = pair.sample;
    const std::string& comment = variant == Variant::original ? s.comment : pair.curated_comment;
    json r{{"id", s.id}, {"lang", std::string(corpus::language_name(s.language))}, {"diff", s.diff},
           {"comment", comment}};
    if (task == Task::code_refinement) {
        if (s.old_file.empty() || !s.target_diff) throw TaskError("sample " + s.id + " is not eligible for refinement");
        r["old_file"] = s.old_file;
        r["target"] = *s.target_diff;
    }
    return r;
}

std::vector<Skip> ineligible(const std::vector<corpus::PairedSample>& pairs, Task task) {
    std::vector<Skip> out;
    if (task != Task::code_refinement) return out;
    for (const auto& p : pairs) {
        if (p.sample.old_file.empty()) {
            out.push_back({p.sample.id, "missing old_file"});
        } else if (!p.sample.target_diff || p.sample.target_diff->empty()) {
            out.push_back({p.sample.id, "missing target"});
        }
    }
    return out;
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string lines(const std::vector<const corpus::PairedSample*>& subset, Task task, Variant variant) {
    std::string out;
    for (const auto* p : subset) out += jsonl::dump_line(task_record(*p, task, variant)) + "\n";
    return out;
}

}  // namespace

TaskExport export_task(const std::vector<corpus::PairedSample>& pairs, Task task,
                       const std::filesystem::path& out_dir, const ExportOptions& options) {
    TaskExport result{task, ineligible(pairs, task), {}};

    std::map<std::string, const corpus::PairedSample*, std::less<>> by_id;
    for (const auto& p : pairs)
        if (!by_id.emplace(p.sample.id, &p).second) throw TaskError("duplicate pair id " + p.sample.id);
    for (const auto& s : result.skipped) by_id.erase(s.id);

    std::vector<corpus::ReviewSample> eligible;
    for (const auto& [_, p] : by_id) eligible.push_back(p->sample);
    const auto total_eligible = eligible.size();
    corpus::Split split;
    try {
        split = corpus::split(corpus::Corpus(std::move(eligible)), options.train_fraction, options.seed);
    } catch (const corpus::CorpusError& e) {
        throw TaskError(std::string(task_name(task)) + ": " + e.what());
    }

    auto subset = [&](const corpus::Corpus& part) {
        std::vector<const corpus::PairedSample*> out;
        for (const auto& s : part) out.push_back(by_id.at(s.id));
        return out;
    };
    const auto train = subset(split.train);
    const auto eval = subset(split.eval);
    const auto prompt = options.prompt_template.value_or(default_prompt_template(task));

    json skipped = json::array();
    for (const auto& s : result.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});

    for (auto variant : {Variant::original, Variant::curated}) {
        VariantExport v;
        v.variant = variant;
        v.directory = out_dir / std::string(task_name(task)) / std::string(variant_name(variant));
        const auto train_text = lines(train, task, variant);
        const auto eval_text = lines(eval, task, variant);
        jsonl::write_text(v.directory / "train.jsonl", train_text);
        jsonl::write_text(v.directory / "eval.jsonl", eval_text);
        jsonl::write_text(v.directory / "prompt_template.txt", prompt);
        v.train_count = train.size();
        v.eval_count = eval.size();
        v.train_hash = fnv1a64_hex(train_text);
        v.eval_hash = fnv1a64_hex(eval_text);

        json fields = task == Task::comment_generation
                          ? json{{"input", json::array({"diff"})}, {"target", "comment"}}
                          : json{{"input", json::array({"diff", "old_file", "comment"})}, {"target", "target"}};
        json manifest{
            {"task", task_name(task)},
            {"variant", variant_name(variant)},
            {"seed", options.seed},
            {"train_fraction", options.train_fraction},
            {"counts",
             {{"pairs", pairs.size()}, {"eligible", total_eligible}, {"train", train.size()}, {"eval", eval.size()},
              {"skipped", result.skipped.size()}}},
            {"skipped", skipped},
            {"fields", fields},
            {"training", options.training.to_json()},
            {"prompt_template", prompt},
            {"files",
             {{"train.jsonl", v.train_hash}, {"eval.jsonl", v.eval_hash},
              {"prompt_template.txt", fnv1a64_hex(prompt)}}},
        };
        const auto manifest_text = manifest.dump(2) + "\n";
        jsonl::write_text(v.directory / "manifest.json", manifest_text);
        v.manifest_hash = fnv1a64_hex(manifest_text);
        result.variants.push_back(std::move(v));
    }
    return result;
}

}  // namespace curev::taskprep
