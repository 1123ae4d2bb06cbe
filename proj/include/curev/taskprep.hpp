#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curev/corpus.hpp"
#include "curev/error.hpp"

namespace curev::taskprep {

class TaskError : public Error {
public:
    explicit TaskError(const std::string& what) : Error("taskprep", what) {}
};

enum class Task { comment_generation, code_refinement };
enum class Variant { original, curated };

std::string_view task_name(Task task);
std::string_view variant_name(Variant variant);
std::optional<Task> parse_task(std::string_view text);

/// Fine-tuning setup recorded alongside every export.
struct TrainingMetadata {
    std::string base_model = "DeepSeek-Coder-6.7B-Instruct";
    int lora_r = 16;
    int lora_alpha = 32;
    double lora_dropout = 0.05;
    int batch_size = 4;
    int epochs = 5;

    nlohmann::json to_json() const;
};

struct ExportOptions {
    double train_fraction = 0.75;
    std::uint64_t seed = 42;
    std::optional<std::string> prompt_template;  // built-in template per task when unset
    TrainingMetadata training;
};

/// Default downstream prompt; `{diff}`, `{old_file}` and `{comment}` are
/// filled by the training harness, not here.
std::string default_prompt_template(Task task);

/// One export line. comment_generation: input diff, target comment.
/// code_refinement: input diff + old_file + comment, target target_diff.
/// The comment is the only field that varies between variants.
nlohmann::json task_record(const corpus::PairedSample& pair, Task task, Variant variant);

struct Skip {
    std::string id;
    std::string reason;
};

/// Samples a task cannot use; the same list applies to both variants.
std::vector<Skip> ineligible(const std::vector<corpus::PairedSample>& pairs, Task task);

struct VariantExport {
    Variant variant;
    std::filesystem::path directory;
    std::size_t train_count = 0;
    std::size_t eval_count = 0;
    std::string train_hash;  // FNV-1a 64, hex
    std::string eval_hash;
    std::string manifest_hash;
};

struct TaskExport {
    Task task;
    std::vector<Skip> skipped;
    std::vector<VariantExport> variants;  // original, curated
};

/// Writes `<out>/<task>/<variant>/{train,eval}.jsonl`, `prompt_template.txt`
/// and `manifest.json` for both variants. Eligible samples are split once by
/// seed, so both variants share id membership and order.
TaskExport export_task(const std::vector<corpus::PairedSample>& pairs, Task task,
                       const std::filesystem::path& out_dir, const ExportOptions& options);

std::string fnv1a64_hex(std::string_view bytes);

}  // namespace curev::taskprep
