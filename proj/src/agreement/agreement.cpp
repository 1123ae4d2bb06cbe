#include "curev/agreement.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>

#include "curev/label_json.hpp"

namespace curev::agreement {

using nlohmann::json;

double cohen_kappa_indices(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t k,
                           Weighting weighting) {
    if (a.size() != b.size()) throw AgreementError("length mismatch");
    if (a.empty()) throw AgreementError("empty sequences");
    if (k == 0) throw AgreementError("empty label space");

    // Integer weights scaled by (k-1) keep every sum exact.
    const std::int64_t scale = (weighting == Weighting::linear && k > 1) ? static_cast<std::int64_t>(k - 1) : 1;
    auto weight = [&](std::size_t i, std::size_t j) -> std::int64_t {
        if (weighting == Weighting::none || k == 1) return i == j ? 1 : 0;
        const auto d = static_cast<std::int64_t>(i > j ? i - j : j - i);
        return scale - d;
    };

    std::vector<std::int64_t> rows(k, 0), cols(k, 0);
    std::int64_t observed = 0;  // sum of weights over pairs, times scale
    for (std::size_t n = 0; n < a.size(); ++n) {
        if (a[n] >= k || b[n] >= k) throw AgreementError("label outside space");
        ++rows[a[n]];
        ++cols[b[n]];
        observed += weight(a[n], b[n]);
    }
    std::int64_t expected = 0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) expected += weight(i, j) * rows[i] * cols[j];

    const auto n = static_cast<std::int64_t>(a.size());
    const std::int64_t full = scale * n * n;
    if (expected == full) return 1.0;
    return static_cast<double>(n * observed - expected) / static_cast<double>(full - expected);
}

const DimensionKappa& KappaReport::at(std::string_view dimension) const {
    for (const auto& d : dimensions)
        if (d.dimension == dimension) return d;
    throw AgreementError("unknown dimension " + std::string(dimension));
}

namespace {

template <class E>
DimensionKappa presence_kappa(std::string_view name, const std::vector<const Labels*>& human,
                              const std::vector<const Labels*>& llm, LabelSet<E> Labels::*field) {
    DimensionKappa out{std::string(name), 0.0, std::nullopt, {}};
    double sum = 0.0;
    std::size_t counted = 0;
    for (E e : all_labels<E>()) {
        std::vector<std::size_t> a, b;
        for (std::size_t i = 0; i < human.size(); ++i) {
            a.push_back((human[i]->*field).contains(e) ? 1 : 0);
            b.push_back((llm[i]->*field).contains(e) ? 1 : 0);
        }
        bool degenerate = true;
        for (std::size_t i = 0; i < a.size(); ++i) degenerate = degenerate && a[i] == a[0] && b[i] == a[0];
        const double k = cohen_kappa_indices(a, b, 2);
        out.per.push_back({std::string(label_name(e)), k, degenerate});
        if (!degenerate) {
            sum += k;
            ++counted;
        }
    }
    out.kappa = counted ? sum / static_cast<double>(counted) : 1.0;
    return out;
}

std::string fmt(double v, const char* spec = "%.4f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string require_string(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty())
        throw SchemaError(key, "expected a non-empty string");
    return j[key].get<std::string>();
}

bool known_dimension(std::string_view d) {
    return std::find(kDimensions.begin(), kDimensions.end(), d) != kDimensions.end();
}

std::map<std::string, const AnnotationRecord*, std::less<>> index_annotations(const std::vector<AnnotationRecord>& v,
                                                                             const char* who) {
    std::map<std::string, const AnnotationRecord*, std::less<>> out;
    for (const auto& r : v)
        if (!out.emplace(r.sample_id, &r).second)
            throw AgreementError(std::string("annotator ") + who + " has two records for " + r.sample_id);
    return out;
}

std::vector<Conflict> conflicts_between(const AnnotationRecord& a, const AnnotationRecord& b) {
    std::vector<Conflict> out;
    for (auto d : kDimensions) {
        auto va = dimension_value(a.labels, d);
        auto vb = dimension_value(b.labels, d);
        if (va != vb) out.push_back({a.sample_id, std::string(d), std::move(va), std::move(vb)});
    }
    return out;
}

}  // namespace

KappaReport kappa_report(const LabelIndex& human, const LabelIndex& llm) {
    std::vector<const Labels*> h, l;
    for (const auto& [id, labels] : human) {
        auto it = llm.find(id);
        if (it == llm.end()) continue;
        h.push_back(&labels);
        l.push_back(&it->second);
    }
    if (h.empty()) throw AgreementError("no overlapping sample ids");

    KappaReport report;
    report.overlap = h.size();
    report.dimensions.push_back(presence_kappa<IssueType>("type", h, l, &Labels::types));
    report.dimensions.push_back(presence_kappa<Nature>("nature", h, l, &Labels::natures));

    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < h.size(); ++i) {
        a.push_back(static_cast<std::size_t>(h[i]->civility));
        b.push_back(static_cast<std::size_t>(l[i]->civility));
    }
    report.dimensions.push_back({"civility", cohen_kappa_indices(a, b, label_count<Civility>), std::nullopt, {}});

    for (Criterion c : all_labels<Criterion>()) {
        a.clear();
        b.clear();
        for (std::size_t i = 0; i < h.size(); ++i) {
            a.push_back(static_cast<std::size_t>(h[i]->score(c) - kMinScore));
            b.push_back(static_cast<std::size_t>(l[i]->score(c) - kMinScore));
        }
        constexpr auto k = static_cast<std::size_t>(kMaxScore - kMinScore + 1);
        report.dimensions.push_back({criterion_key(c), cohen_kappa_indices(a, b, k),
                                     cohen_kappa_indices(a, b, k, Weighting::linear), {}});
    }
    return report;
}

json report_to_json(const KappaReport& r) {
    json dims = json::object();
    for (const auto& d : r.dimensions) {
        json entry{{"kappa", d.kappa}};
        if (d.linear) entry["kappa_linear"] = *d.linear;
        if (!d.per.empty()) {
            json per = json::object();
            for (const auto& s : d.per) per[s.subcategory] = {{"kappa", s.kappa}, {"degenerate", s.degenerate}};
            entry["subcategories"] = per;
        }
        dims[d.dimension] = entry;
    }
    return json{{"overlap", r.overlap}, {"dimensions", dims}};
}

std::string render_report(const KappaReport& r) {
    std::string out = "samples " + std::to_string(r.overlap) + "\n";
    out += "dimension     kappa    linear\n";
    for (const auto& d : r.dimensions) {
        std::string name = d.dimension;
        name.resize(14, ' ');
        out += name + fmt(d.kappa, "%7.4f") + "  " + (d.linear ? fmt(*d.linear, "%7.4f") : std::string("     --")) + "\n";
    }
    return out;
}

json annotation_to_json(const AnnotationRecord& r) {
    return json{{"sample_id", r.sample_id}, {"annotator_id", r.annotator_id}, {"labels", labels_to_json(r.labels)}};
}

AnnotationRecord annotation_from_json(const json& j) {
    AnnotationRecord r;
    r.sample_id = require_string(j, "sample_id");
    r.annotator_id = require_string(j, "annotator_id");
    if (!j.contains("labels")) throw SchemaError("labels", "missing");
    r.labels = labels_from_json(j["labels"]);
    return r;
}

json consensus_to_json(const ConsensusRecord& r) {
    return json{{"sample_id", r.sample_id}, {"labels", labels_to_json(r.labels)}, {"resolution_note", r.resolution_note}};
}

ConsensusRecord consensus_from_json(const json& j) {
    ConsensusRecord r;
    r.sample_id = require_string(j, "sample_id");
    if (!j.contains("labels")) throw SchemaError("labels", "missing");
    r.labels = labels_from_json(j["labels"]);
    if (j.contains("resolution_note")) {
        if (!j["resolution_note"].is_string()) throw SchemaError("resolution_note", "expected a string");
        r.resolution_note = j["resolution_note"].get<std::string>();
    }
    return r;
}

json dimension_value(const Labels& labels, std::string_view dimension) {
    if (!known_dimension(dimension)) throw AgreementError("unknown dimension " + std::string(dimension));
    return labels_to_json(labels)[std::string(dimension)];
}

Labels with_dimension(const Labels& labels, std::string_view dimension, const json& value) {
    if (!known_dimension(dimension)) throw AgreementError("unknown dimension " + std::string(dimension));
    auto j = labels_to_json(labels);
    j[std::string(dimension)] = value;
    return labels_from_json(j);
}

CoverageMismatch::CoverageMismatch(std::vector<std::string> missing_from_a, std::vector<std::string> missing_from_b)
    : AgreementError([&] {
          std::string what = "coverage mismatch;";
          auto list = [&](const char* label, const std::vector<std::string>& ids) {
              if (ids.empty()) return;
              what += std::string(" missing from ") + label + ":";
              for (const auto& id : ids) what += " " + id;
              what += ";";
          };
          list("A", missing_from_a);
          list("B", missing_from_b);
          what.pop_back();
          return what;
      }()),
      missing_a_(std::move(missing_from_a)),
      missing_b_(std::move(missing_from_b)) {}

std::vector<Conflict> find_conflicts(const std::vector<AnnotationRecord>& a, const std::vector<AnnotationRecord>& b) {
    const auto ia = index_annotations(a, "A");
    const auto ib = index_annotations(b, "B");
    std::vector<std::string> missing_a, missing_b;
    for (const auto& [id, _] : ib)
        if (!ia.count(id)) missing_a.push_back(id);
    for (const auto& [id, _] : ia)
        if (!ib.count(id)) missing_b.push_back(id);
    if (!missing_a.empty() || !missing_b.empty()) throw CoverageMismatch(missing_a, missing_b);

    std::vector<Conflict> out;
    for (const auto& [id, ra] : ia) {
        auto c = conflicts_between(*ra, *ib.find(id)->second);
        out.insert(out.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
    }
    return out;
}

json resolution_to_json(const Resolution& r) {
    json j{{"sample_id", r.sample_id}, {"dimension", r.dimension}, {"note", r.note}};
    if (r.pick_annotator) j["pick"] = *r.pick_annotator;
    if (r.value) j["value"] = *r.value;
    return j;
}

Resolution resolution_from_json(const json& j) {
    Resolution r;
    r.sample_id = require_string(j, "sample_id");
    r.dimension = require_string(j, "dimension");
    if (!known_dimension(r.dimension)) throw SchemaError("dimension", "unknown dimension '" + r.dimension + "'");
    if (j.contains("pick")) r.pick_annotator = require_string(j, "pick");
    if (j.contains("value")) r.value = j["value"];
    if (r.pick_annotator.has_value() == r.value.has_value())
        throw SchemaError("pick", "exactly one of pick or value is required");
    if (j.contains("note")) {
        if (!j["note"].is_string()) throw SchemaError("note", "expected a string");
        r.note = j["note"].get<std::string>();
    }
    return r;
}

std::optional<ConsensusRecord> consensus_for(const AnnotationRecord& a, const AnnotationRecord& b,
                                             const std::vector<Resolution>& resolutions) {
    if (a.sample_id != b.sample_id) throw AgreementError("records cover different samples");
    const auto conflicts = conflicts_between(a, b);

    // Later resolutions of the same conflict replace earlier ones.
    std::map<std::string, const Resolution*, std::less<>> chosen;
    for (const auto& r : resolutions) {
        if (r.sample_id != a.sample_id) continue;
        const bool matches = std::any_of(conflicts.begin(), conflicts.end(),
                                         [&](const Conflict& c) { return c.dimension == r.dimension; });
        if (!matches) throw AgreementError("no conflict on " + r.dimension + " for " + r.sample_id);
        if (r.pick_annotator.has_value() == r.value.has_value())
            throw AgreementError("resolution needs exactly one of pick or value");
        if (r.pick_annotator && *r.pick_annotator != a.annotator_id && *r.pick_annotator != b.annotator_id)
            throw AgreementError("unknown annotator " + *r.pick_annotator);
        chosen[r.dimension] = &r;
    }

    Labels labels = a.labels;
    std::string note;
    for (const auto& c : conflicts) {
        auto it = chosen.find(c.dimension);
        if (it == chosen.end()) return std::nullopt;
        const Resolution& r = *it->second;
        json value;
        if (r.pick_annotator) {
            value = *r.pick_annotator == a.annotator_id ? c.value_a : c.value_b;
        } else {
            value = *r.value;
        }
        labels = with_dimension(labels, c.dimension, value);
        if (!r.note.empty()) note += (note.empty() ? "" : "; ") + c.dimension + ": " + r.note;
    }
    return ConsensusRecord{a.sample_id, labels, note};
}

std::vector<ConsensusRecord> build_consensus(const std::vector<AnnotationRecord>& a,
                                             const std::vector<AnnotationRecord>& b,
                                             const std::vector<Resolution>& resolutions) {
    const auto conflicts = find_conflicts(a, b);
    std::set<std::pair<std::string, std::string>> open;
    for (const auto& c : conflicts) open.emplace(c.sample_id, c.dimension);
    for (const auto& r : resolutions)
        if (!open.count({r.sample_id, r.dimension}))
            throw AgreementError("no conflict on " + r.dimension + " for " + r.sample_id);

    const auto ia = index_annotations(a, "A");
    const auto ib = index_annotations(b, "B");
    std::vector<ConsensusRecord> out;
    for (const auto& [id, ra] : ia) {
        auto c = consensus_for(*ra, *ib.find(id)->second, resolutions);
        if (!c) throw AgreementError("unresolved conflict for " + id);
        out.push_back(std::move(*c));
    }
    return out;
}

LabelIndex index_consensus(const std::vector<ConsensusRecord>& records) {
    LabelIndex out;
    for (const auto& r : records)
        if (!out.emplace(r.sample_id, r.labels).second) throw AgreementError("duplicate consensus for " + r.sample_id);
    return out;
}

LabelIndex index_judged(const std::vector<judge::JudgedRecord>& records) {
    LabelIndex out;
    for (const auto& r : records)
        if (!out.emplace(r.id, r.judgment.labels).second) throw AgreementError("duplicate judgment for " + r.id);
    return out;
}

}  // namespace curev::agreement
