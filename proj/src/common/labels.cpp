#include <cctype>

#include "curev/label_json.hpp"
#include "curev/labels.hpp"

namespace curev {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

std::string criterion_key(Criterion c) {
    switch (c) {
        case Criterion::relevance: return "relevance";
        case Criterion::clarity: return "clarity";
        case Criterion::conciseness: return "conciseness";
    }
    return {};
}

std::optional<Criterion> parse_criterion(std::string_view key) { return parse_label<Criterion>(key); }

std::optional<std::string> first_invalid_field(const Labels& labels) {
    if (labels.types.empty()) return "type";
    if (labels.natures.empty()) return "nature";
    if (!score_in_range(labels.relevance)) return "relevance";
    if (!score_in_range(labels.clarity)) return "clarity";
    if (!score_in_range(labels.conciseness)) return "conciseness";
    return std::nullopt;
}

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
    if (!j.is_object()) throw SchemaError(key, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(key, "missing");
    return *it;
}

template <class E>
LabelSet<E> label_set_from(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_array()) throw SchemaError(key, "expected an array of labels");
    LabelSet<E> out;
    for (const auto& item : v) {
        if (!item.is_string()) throw SchemaError(key, "labels must be strings");
        auto label = parse_label<E>(item.get<std::string>());
        if (!label) throw SchemaError(key, "unknown label '" + item.get<std::string>() + "'");
        out.insert(*label);
    }
    if (out.empty()) throw SchemaError(key, "label set is empty");
    return out;
}

Civility civility_from(const json& j) {
    const json& v = require(j, "civility");
    if (!v.is_string()) throw SchemaError("civility", "expected a string");
    auto c = parse_label<Civility>(v.get<std::string>());
    if (!c) throw SchemaError("civility", "unknown value '" + v.get<std::string>() + "'");
    return *c;
}

int score_from(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number_integer()) throw SchemaError(key, "expected an integer score");
    const auto s = v.get<long long>();
    if (s < kMinScore || s > kMaxScore) throw SchemaError(key, "score out of range 1..10");
    return static_cast<int>(s);
}

std::string text_from(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_string()) throw SchemaError(key, "expected a string");
    return v.get<std::string>();
}

}  // namespace

json labels_to_json(const Labels& l) {
    return json{{"type", l.types.names()},
                {"nature", l.natures.names()},
                {"civility", std::string(label_name(l.civility))},
                {"relevance", l.relevance},
                {"clarity", l.clarity},
                {"conciseness", l.conciseness}};
}

Labels labels_from_json(const json& j) {
    Labels l;
    l.types = label_set_from<IssueType>(j, "type");
    l.natures = label_set_from<Nature>(j, "nature");
    l.civility = civility_from(j);
    l.relevance = score_from(j, "relevance");
    l.clarity = score_from(j, "clarity");
    l.conciseness = score_from(j, "conciseness");
    return l;
}

json judgment_to_json(const Judgment& j) {
    json out = labels_to_json(j.labels);
    out["reference_comment"] = j.reference_comment;
    out["rationale"] = j.rationale;
    return out;
}

Judgment judgment_from_json(const json& j) {
    Judgment out;
    out.labels = labels_from_json(j);
    out.reference_comment = text_from(j, "reference_comment");
    out.rationale = text_from(j, "rationale");
    return out;
}

json post_judgment_to_json(const PostJudgment& p) {
    return json{{"nature", p.natures.names()},
                {"civility", std::string(label_name(p.civility))},
                {"clarity", p.clarity},
                {"conciseness", p.conciseness}};
}

PostJudgment post_judgment_from_json(const json& j) {
    if (j.is_object() && j.contains("relevance"))
        throw SchemaError("relevance", "post-curation judgments carry no relevance");
    PostJudgment p;
    p.natures = label_set_from<Nature>(j, "nature");
    p.civility = civility_from(j);
    p.clarity = score_from(j, "clarity");
    p.conciseness = score_from(j, "conciseness");
    return p;
}

}  // namespace curev
