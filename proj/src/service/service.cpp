#include <algorithm>
#include <set>

#include "curev/diff.hpp"
#include "curev/jsonl.hpp"
#include "curev/label_json.hpp"
#include "curev/service.hpp"

namespace curev::service {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response error(int status, const std::string& message, const std::string& field = {}) {
    json body{{"error", message}};
    if (!field.empty()) body["field"] = field;
    return json_response(status, body);
}

std::optional<json> parse_body(const Request& r) {
    try {
        return json::parse(r.body);
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
}

const char* tag_name(corpus::LineTag tag) {
    switch (tag) {
        case corpus::LineTag::add: return "add";
        case corpus::LineTag::del: return "del";
        case corpus::LineTag::context: return "context";
    }
    return "context";
}

json diff_lines(const std::string& diff) {
    json out = json::array();
    try {
        for (const auto& hunk : corpus::parse_unified_diff(diff).hunks) {
            for (const auto& h : hunk.file_header) out.push_back({{"tag", "header"}, {"text", h}});
            out.push_back({{"tag", "hunk"}, {"text", hunk.header}});
            for (const auto& l : hunk.lines) out.push_back({{"tag", tag_name(l.tag)}, {"text", l.text}});
        }
    } catch (const corpus::DiffError&) {
        out = json::array();
        std::size_t start = 0;
        while (start <= diff.size()) {
            const auto end = std::min(diff.find('\n', start), diff.size());
            out.push_back({{"tag", "context"}, {"text", diff.substr(start, end - start)}});
            start = end + 1;
        }
    }
    return out;
}

}  // namespace

AnnotationService::AnnotationService(corpus::Corpus samples, std::vector<std::string> annotators,
                                     std::filesystem::path store_path)
    : samples_(std::move(samples)), annotators_(std::move(annotators)), store_(std::move(store_path)) {
    if (annotators_.size() != 2 || annotators_[0] == annotators_[1] || annotators_[0].empty() ||
        annotators_[1].empty())
        throw StoreError("the service needs two distinct annotator ids");
    for (const auto& a : store_.annotations()) {
        if (!samples_.find(a.sample_id)) throw StoreError("log references unknown sample " + a.sample_id);
        if (std::find(annotators_.begin(), annotators_.end(), a.annotator_id) == annotators_.end())
            throw StoreError("log references unknown annotator " + a.annotator_id);
    }
}

Response AnnotationService::handle(const Request& request) {
    std::lock_guard lock(mutex_);
    try {
        if (request.method == "GET" && request.path == "/api/session") return session();
        if (request.method == "GET" && request.path == "/api/samples/next") return next_sample(request);
        if (request.method == "POST" && request.path == "/api/annotations") return post_annotation(request);
        if (request.method == "GET" && request.path == "/api/conflicts") return conflicts();
        if (request.method == "POST" && request.path == "/api/resolutions") return post_resolution(request);
        if (request.method == "GET" && request.path == "/api/export") return {200, export_jsonl(), "application/x-ndjson"};
        return error(404, "no route for " + request.method + " " + request.path);
    } catch (const StoreError& e) {
        return error(500, e.what());
    }
}

const agreement::AnnotationRecord* AnnotationService::find(std::string_view sample_id,
                                                           std::string_view annotator) const {
    for (const auto& a : store_.annotations())
        if (a.sample_id == sample_id && a.annotator_id == annotator) return &a;
    return nullptr;
}

Response AnnotationService::session() const {
    json progress = json::object();
    for (const auto& a : annotators_) {
        std::size_t done = 0;
        for (const auto& r : store_.annotations()) done += r.annotator_id == a ? 1 : 0;
        progress[a] = done;
    }
    return json_response(200, {{"annotators", annotators_}, {"samples", samples_.size()}, {"annotated", progress}});
}

Response AnnotationService::next_sample(const Request& request) const {
    auto it = request.query.find("annotator");
    if (it == request.query.end() || it->second.empty()) return error(400, "annotator is required", "annotator");
    if (std::find(annotators_.begin(), annotators_.end(), it->second) == annotators_.end())
        return error(400, "unknown annotator " + it->second, "annotator");

    std::size_t remaining = 0;
    const corpus::ReviewSample* next = nullptr;
    for (const auto& s : samples_) {
        if (find(s.id, it->second)) continue;
        ++remaining;
        if (!next) next = &s;
    }
    if (!next) return json_response(200, {{"done", true}, {"remaining", 0}});
    json sample{{"id", next->id},
                {"lang", std::string(corpus::language_name(next->language))},
                {"comment", next->comment},
                {"old_file", next->old_file},
                {"diff", next->diff},
                {"diff_lines", diff_lines(next->diff)}};
    return json_response(200, {{"done", false}, {"remaining", remaining}, {"sample", sample}});
}

Response AnnotationService::post_annotation(const Request& request) {
    const auto body = parse_body(request);
    if (!body) return error(400, "body is not valid JSON", "body");
    agreement::AnnotationRecord record;
    try {
        record = agreement::annotation_from_json(*body);
    } catch (const SchemaError& e) {
        return error(400, e.what(), e.field());
    }
    if (std::find(annotators_.begin(), annotators_.end(), record.annotator_id) == annotators_.end())
        return error(400, "unknown annotator " + record.annotator_id, "annotator_id");
    if (!samples_.find(record.sample_id)) return error(404, "unknown sample " + record.sample_id, "sample_id");
    if (find(record.sample_id, record.annotator_id))
        return error(409, record.annotator_id + " already annotated " + record.sample_id);
    store_.append(record);
    return json_response(201, agreement::annotation_to_json(record));
}

std::vector<agreement::Conflict> AnnotationService::all_conflicts() const {
    std::vector<agreement::AnnotationRecord> a, b;
    for (const auto& s : samples_) {
        const auto* ra = find(s.id, annotators_[0]);
        const auto* rb = find(s.id, annotators_[1]);
        if (!ra || !rb) continue;
        a.push_back(*ra);
        b.push_back(*rb);
    }
    return agreement::find_conflicts(a, b);
}

std::vector<agreement::Conflict> AnnotationService::open_conflicts() const {
    std::set<std::pair<std::string, std::string>> resolved;
    for (const auto& r : store_.resolutions()) resolved.emplace(r.sample_id, r.dimension);
    std::vector<agreement::Conflict> out;
    for (auto& c : all_conflicts())
        if (!resolved.count({c.sample_id, c.dimension})) out.push_back(std::move(c));
    return out;
}

Response AnnotationService::conflicts() const {
    json out = json::array();
    for (const auto& c : open_conflicts())
        out.push_back({{"sample_id", c.sample_id},
                       {"dimension", c.dimension},
                       {"values", {{annotators_[0], c.value_a}, {annotators_[1], c.value_b}}}});
    return json_response(200, out);
}

Response AnnotationService::post_resolution(const Request& request) {
    const auto body = parse_body(request);
    if (!body) return error(400, "body is not valid JSON", "body");
    agreement::Resolution resolution;
    try {
        resolution = agreement::resolution_from_json(*body);
    } catch (const SchemaError& e) {
        return error(400, e.what(), e.field());
    }
    const auto open = open_conflicts();
    const auto conflict = std::find_if(open.begin(), open.end(), [&](const agreement::Conflict& c) {
        return c.sample_id == resolution.sample_id && c.dimension == resolution.dimension;
    });
    if (conflict == open.end())
        return error(404, "no open conflict on " + resolution.dimension + " for " + resolution.sample_id);
    if (resolution.pick_annotator &&
        std::find(annotators_.begin(), annotators_.end(), *resolution.pick_annotator) == annotators_.end())
        return error(400, "unknown annotator " + *resolution.pick_annotator, "pick");
    if (resolution.value) {
        try {
            agreement::with_dimension(find(resolution.sample_id, annotators_[0])->labels, resolution.dimension,
                                      *resolution.value);
        } catch (const SchemaError& e) {
            return error(400, e.what(), "value");
        }
    }
    store_.append(resolution);
    return json_response(201, agreement::resolution_to_json(resolution));
}

std::vector<agreement::ConsensusRecord> AnnotationService::consensus() const {
    std::vector<agreement::ConsensusRecord> out;
    for (const auto& s : samples_) {
        const auto* ra = find(s.id, annotators_[0]);
        const auto* rb = find(s.id, annotators_[1]);
        if (!ra || !rb) continue;
        if (auto c = agreement::consensus_for(*ra, *rb, store_.resolutions())) out.push_back(std::move(*c));
    }
    return out;
}

std::string AnnotationService::export_jsonl() const {
    auto records = store_.annotations();
    std::sort(records.begin(), records.end(), [](const auto& x, const auto& y) {
        return std::tie(x.sample_id, x.annotator_id) < std::tie(y.sample_id, y.annotator_id);
    });
    std::string out;
    for (const auto& r : records) {
        auto j = agreement::annotation_to_json(r);
        j["kind"] = "annotation";
        out += jsonl::dump_line(j) + "\n";
    }
    for (const auto& c : consensus()) {
        auto j = agreement::consensus_to_json(c);
        j["kind"] = "consensus";
        out += jsonl::dump_line(j) + "\n";
    }
    return out;
}

}  // namespace curev::service
