#include <fstream>
#include <sstream>

#include "curev/judge.hpp"
#include "curev/jsonl.hpp"
#include "curev/parse.hpp"

namespace curev::judge {

namespace {

constexpr std::string_view kSystem =
    "You are an experienced software engineer. You review code changes and judge the quality of "
    "code review comments written by other reviewers. Follow the requested output format exactly.";

constexpr std::string_view kEvaluation = R"(### Code review comment generation
Generate a review comment that you consider perfect for the code change without considering the given input comment. A review comment should highlight the main issues, improvements, or suggestions for the code changes. The generated review comment should be concise, relevant, clear, useful, and complete.

### Code review comment assessment
Then, evaluate and categorize only the given review comment, written by a reviewer, based on the below criteria.
You can use the generated review comment as a reference to evaluate the given review comment.
Note that multiple labels are allowed for the categories "Type" and "Nature".

1. Type: Categorize the review according to the type of issue it addresses: Refactoring, Bugfix, Testing, Logging, Documentation, Other.

2. Nature: Specify the nature of the review according to these categories:
- Descriptive: describe what the reviewer observes without explicitly suggesting specific actions.
- Prescriptive: suggest or request specific actions on the code.
- Clarification: request explanation or further information to better understand the code changes.
- Other: for comments that do not fit the previous categories.

3. Civility: Specify the tone of the review comment:
- Civil: respectful and professional tone.
- Uncivil: disrespectful or inappropriate tone.

4. Conciseness: Assess how effectively the comment conveys its message using the fewest necessary words while remaining fully informative. A concise comment should be completely brief but informative, avoiding unnecessary details, repetition, or verbosity. Use a 1-to-10 rating scale.

5. Clarity: Assess how clearly the review comment communicates its message. A score of 1 indicates very unclear, and 10 indicates very clear communication. Use a 1-to-10 rating scale.
{relevance_criterion}
Provide a rationale for each evaluation.

### Output format
{output_format}

### Given review comment
{review_comment}

### Code changes
{code_diff}
)";

constexpr std::string_view kRelevance = R"(
6. Relevance: Evaluate the extent to which the review comment is pertinent to the code change. A score of 1 means the comment is completely irrelevant, while a score of 10 means it is highly relevant. Use a 1-to-10 rating scale.
)";

constexpr std::string_view kReformulation = R"(### Review comment reformulation
Your task is to reformulate and improve the given review comment by making it civil, more clear, and more concise without changing its core message or intent.
The reformulated comment should respect the following guidelines:

1. Conciseness: The comment should convey its message in the fewest words necessary while still being informative. Eliminate redundancy and irrelevant details.

2. Clarity: Ensure the comment is straightforward, well-structured, and grammatically correct, making the feedback easy to understand without any ambiguity.

3. Civility: Keep the comment respectful, professional, and constructive, avoiding any harsh or inappropriate language.

Use the code changes only to resolve vague references in the comment; do not raise issues the reviewer did not raise.

### Output format
{output_format}

### Given review comment
{review_comment}

### Code changes
{code_diff}
)";

constexpr std::string_view kCommentInfo = "review_comment";
constexpr std::string_view kDiffInfo = "diff";

void override_from(const std::filesystem::path& file, std::string& dest) {
    if (std::filesystem::exists(file)) dest = jsonl::read_text(file);
}

JudgePrompt make_prompt(const corpus::ReviewSample& sample, PromptKind kind, const PromptTemplates& t,
                        std::string_view comment) {
    std::map<std::string, std::string, std::less<>> slots{
        {"review_comment", fenced(comment, kCommentInfo)},
        {"code_diff", fenced(sample.diff, kDiffInfo)},
    };
    std::string_view tmpl;
    switch (kind) {
        case PromptKind::evaluation:
            tmpl = t.evaluation;
            slots["relevance_criterion"] = t.relevance_criterion;
            slots["output_format"] = parse::judgment_format_instruction(true);
            break;
        case PromptKind::reevaluation:
            tmpl = t.evaluation;
            slots["relevance_criterion"] = "";
            slots["output_format"] = parse::judgment_format_instruction(false);
            break;
        case PromptKind::reformulation:
            tmpl = t.reformulation;
            slots["output_format"] = parse::reformulation_format_instruction();
            break;
    }
    return JudgePrompt{sample.id, kind, t.system, fill_template(tmpl, slots)};
}

}  // namespace

std::string_view kind_name(PromptKind kind) {
    switch (kind) {
        case PromptKind::evaluation: return "evaluation";
        case PromptKind::reformulation: return "reformulation";
        case PromptKind::reevaluation: return "reevaluation";
    }
    return "";
}

std::optional<PromptKind> parse_kind(std::string_view text) {
    for (auto k : {PromptKind::evaluation, PromptKind::reformulation, PromptKind::reevaluation})
        if (text == kind_name(k)) return k;
    return std::nullopt;
}

PromptTemplates PromptTemplates::defaults() {
    PromptTemplates t;
    t.system = std::string(kSystem);
    t.evaluation = std::string(kEvaluation);
    t.relevance_criterion = std::string(kRelevance);
    t.reformulation = std::string(kReformulation);
    return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    auto t = defaults();
    override_from(dir / "system.txt", t.system);
    override_from(dir / "evaluation.txt", t.evaluation);
    override_from(dir / "relevance.txt", t.relevance_criterion);
    override_from(dir / "reformulation.txt", t.reformulation);
    t.version = "custom:" + dir.filename().string();
    return t;
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = slots.find(tmpl.substr(i + 1, close - i - 1));
                if (it != slots.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

std::string fenced(std::string_view content, std::string_view info) {
    const auto fence = parse::fence_for(content);
    std::string out = fence;
    out += info;
    out += '\n';
    out += content;
    out += '\n';
    out += fence;
    return out;
}

JudgePrompt build_evaluation_prompt(const corpus::ReviewSample& sample, const PromptTemplates& templates) {
    return make_prompt(sample, PromptKind::evaluation, templates, sample.comment);
}

JudgePrompt build_reformulation_prompt(const corpus::ReviewSample& sample, const PromptTemplates& templates) {
    return make_prompt(sample, PromptKind::reformulation, templates, sample.comment);
}

JudgePrompt build_reevaluation_prompt(const corpus::ReviewSample& sample, std::string_view reformulated_comment,
                                      const PromptTemplates& templates) {
    return make_prompt(sample, PromptKind::reevaluation, templates, reformulated_comment);
}

std::optional<PromptSlots> extract_prompt_slots(std::string_view user_text) {
    const auto blocks = parse::fenced_blocks(user_text);
    const parse::FencedBlock* comment = nullptr;
    const parse::FencedBlock* diff = nullptr;
    for (const auto& b : blocks) {
        if (!comment && b.info == kCommentInfo) {
            comment = &b;
        } else if (comment && !diff && b.info == kDiffInfo) {
            diff = &b;
        }
    }
    if (!comment || !diff) return std::nullopt;
    return PromptSlots{comment->content, diff->content};
}

}  // namespace curev::judge
