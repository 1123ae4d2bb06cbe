#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "curev/cli.hpp"
#include "curev/config.hpp"
#include "curev/jsonl.hpp"
#include "curev/label_json.hpp"
#include "curev/metrics/report.hpp"
#include "curev/service.hpp"
#include "curev/stats.hpp"
#include "curev/taskprep.hpp"

namespace curev::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("usage", what) {}
};

template <class T>
T pick(const std::optional<T>& flag, const std::optional<T>& config, const char* name) {
    if (flag) return *flag;
    if (config) return *config;
    throw UsageError(std::string("--") + name + " is required (or set it in the config)");
}

std::unique_ptr<judge::Backend> make_backend(const std::string& name, const std::optional<fs::path>& fixtures) {
    if (name == "mock") {
        if (!fixtures) throw UsageError("--fixtures is required for the mock backend");
        if (!fs::is_directory(*fixtures)) throw IoError("fixture directory " + fixtures->string() + " not found");
        return std::make_unique<judge::MockBackend>(*fixtures);
    }
    if (name == "remote") return std::make_unique<judge::RemoteBackend>();
    throw UsageError("--backend must be mock or remote");
}

judge::PromptTemplates templates_for(const std::optional<fs::path>& dir) {
    return dir ? judge::PromptTemplates::load(*dir) : judge::PromptTemplates::defaults();
}

std::vector<std::string> read_id_list(const fs::path& path) {
    std::vector<std::string> ids;
    for (const auto& line : jsonl::read_lines(path)) ids.push_back(line.text);
    return ids;
}

void write_id_list(const fs::path& path, const std::vector<std::string>& ids) {
    std::string text;
    for (const auto& id : ids) text += id + "\n";
    jsonl::write_text(path, text);
}

/// Human labels for kappa: consensus records, optionally mixed into an
/// annotation export (only the consensus lines are used).
agreement::LabelIndex load_human_labels(const fs::path& path) {
    std::vector<agreement::ConsensusRecord> records;
    for (auto j : jsonl::read(path)) {
        if (j.contains("kind")) {
            if (j["kind"] != "consensus") continue;
            j.erase("kind");
        }
        records.push_back(agreement::consensus_from_json(j));
    }
    return agreement::index_consensus(records);
}

struct Options {
    std::optional<fs::path> config;

    // import
    std::optional<fs::path> import_in, import_out, import_rejects;
    // judge / curate
    std::optional<std::string> backend;
    std::optional<fs::path> fixtures, prompts, judge_in, judge_out, judge_failed;
    std::optional<int> max_parallel;
    // filter
    std::optional<fs::path> filter_corpus, filter_judged, filter_out, filter_removed;
    std::optional<int> threshold;
    // curate
    std::optional<fs::path> curate_kept, curate_judged, curate_removed, curate_out, curate_quarantine, curate_report;
    // stats
    std::optional<fs::path> stats_judged, stats_out;
    // kappa
    fs::path kappa_human, kappa_llm;
    std::optional<fs::path> kappa_out;
    // annotate serve
    std::optional<fs::path> serve_samples, serve_store, serve_static;
    std::vector<std::string> serve_annotators;
    std::optional<int> serve_port;
    // export-tasks
    std::optional<fs::path> export_corpus, export_curated, export_out;
    std::string export_task = "all";
    std::optional<std::size_t> export_pairs;
    std::optional<std::uint64_t> split_seed, pairing_seed;
    std::optional<double> fraction;
    std::optional<std::string> sampling;
    // eval
    fs::path eval_cand, eval_ref;
    std::string eval_metric = "all";
    std::optional<std::string> eval_language;
    bool eval_raw = false, eval_new_side = false, eval_serial = false;
    std::optional<fs::path> eval_out;
    // prompt
    fs::path prompt_corpus;
    std::string prompt_id, prompt_kind = "evaluation", prompt_reformulated;
};

PipelineConfig load_config(const Options& o) {
    return o.config ? PipelineConfig::load(*o.config) : PipelineConfig{};
}

judge::JudgeConfig judge_config(const PipelineConfig& c, const Options& o) {
    auto jc = c.judge;
    if (o.max_parallel) jc.max_parallel = *o.max_parallel;
    jc.validate();
    return jc;
}

int cmd_import(const Options& o, const PipelineConfig& c, std::ostream& out) {
    const auto in = pick(o.import_in, std::optional<fs::path>{}, "in");
    const auto dest = pick(o.import_out, c.out_dir ? std::optional(*c.out_dir / "corpus.jsonl") : std::nullopt, "out");
    auto result = corpus::import_samples(in, c.field_mapping);
    corpus::save_corpus(dest, result.corpus);
    const auto rejects =
        o.import_rejects ? *o.import_rejects : fs::path(dest).replace_extension(".rejects.jsonl");
    corpus::save_rejects(rejects, result.rejects);
    out << json{{"imported", result.corpus.size()}, {"rejected", result.rejects.size()}}.dump() << "\n";
    return kExitOk;
}

int cmd_judge(const Options& o, const PipelineConfig& c, std::ostream& out, std::ostream& err) {
    const auto in = pick(o.judge_in, c.corpus, "in");
    const auto dest = pick(o.judge_out, c.out_dir ? std::optional(*c.out_dir / "judged.jsonl") : std::nullopt, "out");
    const auto failed_path = o.judge_failed ? *o.judge_failed : fs::path(dest).replace_extension(".failed.jsonl");
    auto backend = make_backend(o.backend.value_or(c.backend), o.fixtures ? o.fixtures : c.fixtures);
    const auto run = judge::judge_corpus(corpus::load_corpus(in), *backend, judge_config(c, o),
                                         templates_for(o.prompts ? o.prompts : c.prompts));
    judge::save_judged(dest, run.judged);
    judge::save_failed(failed_path, run.failed);
    if (run.judged.empty() && !run.failed.empty())
        throw Error("judge", "every sample failed; first error: " + run.failed.front().error);
    if (!run.failed.empty()) err << run.failed.size() << " sample(s) failed; see " << failed_path.string() << "\n";
    out << json{{"judged", run.judged.size()}, {"failed", run.failed.size()}}.dump() << "\n";
    return kExitOk;
}

int cmd_filter(const Options& o, const PipelineConfig& c, std::ostream& out) {
    const auto corpus_path = pick(o.filter_corpus, c.corpus, "corpus");
    const auto judged = pick(o.filter_judged, std::optional<fs::path>{}, "judged");
    const auto dest = pick(o.filter_out, c.out_dir ? std::optional(*c.out_dir / "kept.jsonl") : std::nullopt, "out");
    const auto removed_path = o.filter_removed ? *o.filter_removed : fs::path(dest).replace_extension(".removed.txt");
    const auto full = corpus::load_corpus(corpus_path);
    const auto result =
        curation::filter_irrelevant(full, curation::index_judgments(judge::load_judged(judged)), o.threshold.value_or(c.threshold));
    corpus::save_corpus(dest, result.kept);
    write_id_list(removed_path, result.removed);
    out << json{{"total", full.size()}, {"kept", result.kept.size()}, {"removed", result.removed.size()}}.dump()
        << "\n";
    return kExitOk;
}

int cmd_curate(const Options& o, const PipelineConfig& c, std::ostream& out, std::ostream& err) {
    const auto kept_path = pick(o.curate_kept, std::optional<fs::path>{}, "kept");
    const auto judged_path = pick(o.curate_judged, std::optional<fs::path>{}, "judged");
    const auto dest = pick(o.curate_out, c.out_dir ? std::optional(*c.out_dir / "curated.jsonl") : std::nullopt, "out");
    const auto quarantine = o.curate_quarantine ? *o.curate_quarantine : fs::path(dest).replace_extension(".quarantine.jsonl");
    const auto report_dir = o.curate_report ? *o.curate_report : dest.parent_path() / "curation_report";

    const auto judged = judge::load_judged(judged_path);
    auto backend = make_backend(o.backend.value_or(c.backend), o.fixtures ? o.fixtures : c.fixtures);
    const auto run = curation::curate(corpus::load_corpus(kept_path), curation::index_judgments(judged), *backend,
                                      judge_config(c, o), templates_for(o.prompts ? o.prompts : c.prompts));
    curation::save_curated(dest, run.curated);
    judge::save_failed(quarantine, run.quarantined);

    const auto removed = o.curate_removed ? read_id_list(*o.curate_removed) : std::vector<std::string>{};
    const auto report = curation::make_report(judged, run.curated, removed, run.quarantined.size());
    fs::create_directories(report_dir);
    jsonl::write_text(report_dir / "report.json", curation::report_to_json(report).dump(2) + "\n");
    jsonl::write_text(report_dir / "report.txt", curation::render_report(report));
    if (run.curated.empty() && !run.quarantined.empty())
        throw Error("curation", "every sample was quarantined; first error: " + run.quarantined.front().error);
    if (!run.quarantined.empty())
        err << run.quarantined.size() << " sample(s) quarantined; see " << quarantine.string() << "\n";
    out << json{{"curated", run.curated.size()}, {"quarantined", run.quarantined.size()}}.dump() << "\n";
    return kExitOk;
}

int cmd_stats(const Options& o, const PipelineConfig& c, std::ostream& out) {
    const auto judged = pick(o.stats_judged, std::optional<fs::path>{}, "judged");
    const auto dir = pick(o.stats_out, c.out_dir ? std::optional(*c.out_dir / "stats") : std::nullopt, "out-dir");
    const auto report = stats::describe(judge::load_judged(judged));
    stats::write_outputs(dir, report);
    out << stats::render_means_table(report);
    return kExitOk;
}

int cmd_kappa(const Options& o, std::ostream& out) {
    const auto report = agreement::kappa_report(load_human_labels(o.kappa_human),
                                                agreement::index_judged(judge::load_judged(o.kappa_llm)));
    if (o.kappa_out) jsonl::write_text(*o.kappa_out, agreement::report_to_json(report).dump(2) + "\n");
    out << agreement::render_report(report);
    return kExitOk;
}

int cmd_serve(const Options& o, const PipelineConfig& c, std::ostream& out) {
    const auto samples = pick(o.serve_samples, c.corpus, "samples");
    const auto store = pick(o.serve_store, c.out_dir ? std::optional(*c.out_dir / "annotations.log.jsonl") : std::nullopt, "store");
    const auto annotators = o.serve_annotators.empty() ? c.annotators : o.serve_annotators;
    service::AnnotationService svc(corpus::load_corpus(samples), annotators, store);
    service::ServeOptions opts;
    opts.port = o.serve_port.value_or(c.port);
    opts.static_dir = o.serve_static;
    service::serve(svc, opts, [&out](int port) {
        out << json{{"listening", "http://127.0.0.1:" + std::to_string(port)}}.dump() << std::endl;
    });
    return kExitOk;
}

corpus::Sampling parse_sampling(const std::string& s) {
    if (s == "uniform") return corpus::Sampling::uniform;
    if (s == "stratified_by_language") return corpus::Sampling::stratified_by_language;
    throw UsageError("--sampling must be uniform or stratified_by_language");
}

int cmd_export(const Options& o, const PipelineConfig& c, std::ostream& out) {
    const auto corpus_path = pick(o.export_corpus, c.corpus, "corpus");
    const auto curated_path = pick(o.export_curated, std::optional<fs::path>{}, "curated");
    const auto dir = pick(o.export_out, c.out_dir ? std::optional(*c.out_dir / "tasks") : std::nullopt, "out");

    std::vector<taskprep::Task> tasks;
    if (o.export_task == "all") {
        tasks = {taskprep::Task::comment_generation, taskprep::Task::code_refinement};
    } else if (auto t = taskprep::parse_task(o.export_task)) {
        tasks = {*t};
    } else {
        throw UsageError("--task must be comment_generation, code_refinement or all");
    }

    std::vector<corpus::CuratedComment> curated;
    for (const auto& s : curation::load_curated(curated_path)) curated.push_back({s.id, s.reformulated_comment});
    const auto n = o.export_pairs ? *o.export_pairs : c.pairs.value_or(curated.size());
    const auto sampling = o.sampling ? parse_sampling(*o.sampling) : c.sampling;
    const auto pairs = corpus::pair_subsets(corpus::load_corpus(corpus_path), curated, n,
                                            o.pairing_seed.value_or(c.pairing_seed), sampling);

    taskprep::ExportOptions opts;
    opts.train_fraction = o.fraction.value_or(c.train_fraction);
    opts.seed = o.split_seed.value_or(c.split_seed);
    json summary = json::array();
    for (const auto task : tasks) {
        const auto result = taskprep::export_task(pairs, task, dir, opts);
        for (const auto& v : result.variants)
            summary.push_back({{"task", taskprep::task_name(task)},
                               {"variant", taskprep::variant_name(v.variant)},
                               {"train", v.train_count},
                               {"eval", v.eval_count},
                               {"skipped", result.skipped.size()},
                               {"manifest_hash", v.manifest_hash}});
    }
    out << summary.dump() << "\n";
    return kExitOk;
}

int cmd_eval(const Options& o, const PipelineConfig& c, std::ostream& out) {
    static const std::set<std::string> metrics{"bleu", "codebleu", "em", "all"};
    if (!metrics.count(o.eval_metric)) throw UsageError("--metric must be bleu, codebleu, em or all");
    metrics::EvalOptions opts;
    opts.weights = c.codebleu_weights;
    opts.match_mode = o.eval_raw ? metrics::MatchMode::raw : metrics::MatchMode::normalized;
    opts.diff_new_side = o.eval_new_side;
    opts.exec = o.eval_serial ? metrics::Execution::serial : metrics::Execution::parallel;
    if (o.eval_language) {
        opts.language = corpus::parse_language(*o.eval_language);
        if (!opts.language) throw UsageError("unknown --language " + *o.eval_language);
    }
    if (o.eval_metric == "codebleu" && !opts.language) throw UsageError("--metric codebleu needs --language");

    const auto report = metrics::evaluate(metrics::load_texts(o.eval_cand), metrics::load_texts(o.eval_ref), opts);
    if (o.eval_out) jsonl::write_text(*o.eval_out, metrics::report_to_json(report).dump(2) + "\n");

    char buf[64];
    if (o.eval_metric == "bleu") {
        std::snprintf(buf, sizeof buf, "%.4f\n", report.bleu);
        out << buf;
    } else if (o.eval_metric == "codebleu") {
        std::snprintf(buf, sizeof buf, "%.4f\n", report.codebleu->combined);
        out << buf;
    } else if (o.eval_metric == "em") {
        out << report.exact_match_count << "/" << report.total << "\n";
    } else {
        out << metrics::render_report(report);
    }
    return kExitOk;
}

int cmd_prompt(const Options& o, const PipelineConfig& c, std::ostream& out) {
    const auto corpus = corpus::load_corpus(o.prompt_corpus);
    const auto* sample = corpus.find(o.prompt_id);
    if (!sample) throw UsageError("no sample " + o.prompt_id);
    const auto kind = judge::parse_kind(o.prompt_kind);
    if (!kind) throw UsageError("--kind must be evaluation, reformulation or reevaluation");
    const auto templates = templates_for(o.prompts ? o.prompts : c.prompts);
    judge::JudgePrompt p;
    switch (*kind) {
        case judge::PromptKind::evaluation: p = judge::build_evaluation_prompt(*sample, templates); break;
        case judge::PromptKind::reformulation: p = judge::build_reformulation_prompt(*sample, templates); break;
        case judge::PromptKind::reevaluation:
            p = judge::build_reevaluation_prompt(*sample, o.prompt_reformulated, templates);
            break;
    }
    out << "### system\n" << p.system_text << "\n### user\n" << p.user_text;
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Curation toolchain for code-review datasets", "curev"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--config", o.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);

    auto* imp = app.add_subcommand("import", "Normalize a raw JSONL dump into the corpus schema");
    imp->add_option("--in", o.import_in, "Raw JSONL dump")->check(CLI::ExistingFile);
    imp->add_option("--out", o.import_out, "Corpus JSONL");
    imp->add_option("--rejects", o.import_rejects, "Rejected records (default: <out>.rejects.jsonl)");

    auto backend_opts = [&](CLI::App* sub) {
        sub->add_option("--backend", o.backend, "mock or remote")->check(CLI::IsMember({"mock", "remote"}));
        sub->add_option("--fixtures", o.fixtures, "Mock reply directory");
        sub->add_option("--prompts", o.prompts, "Prompt template directory");
        sub->add_option("--max-parallel", o.max_parallel, "Concurrent judge calls")->check(CLI::PositiveNumber);
    };

    auto* jdg = app.add_subcommand("judge", "Evaluate every comment with the judge");
    backend_opts(jdg);
    jdg->add_option("--in", o.judge_in, "Corpus JSONL");
    jdg->add_option("--out", o.judge_out, "Judged JSONL");
    jdg->add_option("--failed", o.judge_failed, "Failed samples (default: <out>.failed.jsonl)");

    auto* flt = app.add_subcommand("filter", "Drop comments judged irrelevant");
    flt->add_option("--corpus", o.filter_corpus, "Corpus JSONL");
    flt->add_option("--judged", o.filter_judged, "Judged JSONL");
    flt->add_option("--threshold", o.threshold, "Keep relevance >= threshold")->check(CLI::Range(1, 10));
    flt->add_option("--out", o.filter_out, "Kept corpus JSONL");
    flt->add_option("--removed", o.filter_removed, "Removed ids (default: <out>.removed.txt)");

    auto* cur = app.add_subcommand("curate", "Reformulate kept comments and re-evaluate them");
    backend_opts(cur);
    cur->add_option("--kept", o.curate_kept, "Kept corpus JSONL");
    cur->add_option("--judged", o.curate_judged, "Judged JSONL of the original comments");
    cur->add_option("--removed", o.curate_removed, "Removed ids from filter, for the report");
    cur->add_option("--out", o.curate_out, "Curated JSONL");
    cur->add_option("--quarantine", o.curate_quarantine, "Quarantined samples (default: <out>.quarantine.jsonl)");
    cur->add_option("--report-dir", o.curate_report, "Evolution report directory");

    auto* sts = app.add_subcommand("stats", "Category distributions and score means");
    sts->add_option("--judged", o.stats_judged, "Judged JSONL");
    sts->add_option("--out-dir", o.stats_out, "Output directory");

    auto* kap = app.add_subcommand("kappa", "Agreement between human consensus and judge labels");
    kap->add_option("--human", o.kappa_human, "Consensus JSONL or annotation export")->required()->check(CLI::ExistingFile);
    kap->add_option("--llm", o.kappa_llm, "Judged JSONL")->required()->check(CLI::ExistingFile);
    kap->add_option("--out", o.kappa_out, "Report JSON");

    auto* ann = app.add_subcommand("annotate", "Annotation service");
    ann->require_subcommand(1);
    auto* srv = ann->add_subcommand("serve", "Serve the annotation API on 127.0.0.1");
    srv->add_option("--samples", o.serve_samples, "Corpus JSONL of samples to annotate");
    srv->add_option("--store", o.serve_store, "Append-only annotation log");
    srv->add_option("--annotators", o.serve_annotators, "Two annotator ids")->delimiter(',')->expected(2);
    srv->add_option("--port", o.serve_port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    srv->add_option("--static", o.serve_static, "Static UI assets")->check(CLI::ExistingDirectory);

    auto* exp = app.add_subcommand("export-tasks", "Write original/curated training sets for downstream tasks");
    exp->add_option("--corpus", o.export_corpus, "Original corpus JSONL");
    exp->add_option("--curated", o.export_curated, "Curated JSONL");
    exp->add_option("--out", o.export_out, "Output directory");
    exp->add_option("--task", o.export_task, "comment_generation, code_refinement or all");
    exp->add_option("--pairs", o.export_pairs, "Number of paired samples (default: all curated)");
    exp->add_option("--split-seed", o.split_seed, "Train/eval split seed");
    exp->add_option("--pairing-seed", o.pairing_seed, "Pair sampling seed");
    exp->add_option("--fraction", o.fraction, "Train fraction")->check(CLI::Range(0.0, 1.0));
    exp->add_option("--sampling", o.sampling, "uniform or stratified_by_language");

    auto* evl = app.add_subcommand("eval", "Score candidates against references");
    evl->add_option("--cand", o.eval_cand, "Candidate {id, text} JSONL")->required()->check(CLI::ExistingFile);
    evl->add_option("--ref", o.eval_ref, "Reference {id, text} JSONL")->required()->check(CLI::ExistingFile);
    evl->add_option("--metric", o.eval_metric, "bleu, codebleu, em or all");
    evl->add_option("--language", o.eval_language, "Language for CodeBLEU");
    evl->add_flag("--raw", o.eval_raw, "Exact match without whitespace normalization");
    evl->add_flag("--diff-new-side", o.eval_new_side, "Score the post-change side of unified diffs");
    evl->add_flag("--serial", o.eval_serial, "Disable OpenMP");
    evl->add_option("--out", o.eval_out, "Report JSON");

    auto* prm = app.add_subcommand("prompt", "Print the prompt built for one sample");
    prm->add_option("--corpus", o.prompt_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    prm->add_option("--id", o.prompt_id, "Sample id")->required();
    prm->add_option("--kind", o.prompt_kind, "evaluation, reformulation or reevaluation");
    prm->add_option("--reformulated", o.prompt_reformulated, "Comment for a reevaluation prompt");
    prm->add_option("--prompts", o.prompts, "Prompt template directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        const auto config = load_config(o);
        if (imp->parsed()) return cmd_import(o, config, out);
        if (jdg->parsed()) return cmd_judge(o, config, out, err);
        if (flt->parsed()) return cmd_filter(o, config, out);
        if (cur->parsed()) return cmd_curate(o, config, out, err);
        if (sts->parsed()) return cmd_stats(o, config, out);
        if (kap->parsed()) return cmd_kappa(o, out);
        if (srv->parsed()) {
            command = "annotate serve";
            return cmd_serve(o, config, out);
        }
        if (exp->parsed()) return cmd_export(o, config, out);
        if (evl->parsed()) return cmd_eval(o, config, out);
        if (prm->parsed()) return cmd_prompt(o, config, out);
    } catch (const UsageError& e) {
        err << app.get_subcommands().front()->help() << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << json{{"command", command}, {"stage", e.stage()}, {"error", e.what()}}.dump() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << json{{"command", command}, {"stage", "internal"}, {"error", e.what()}}.dump() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace curev::cli
