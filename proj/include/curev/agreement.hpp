#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "curev/error.hpp"
#include "curev/judge.hpp"
#include "curev/labels.hpp"

namespace curev::agreement {

class AgreementError : public Error {
public:
    explicit AgreementError(const std::string& what) : Error("agreement", what) {}
};

enum class Weighting { none, linear };

/// Cohen's kappa over label indices in [0, k). Linear weighting credits a
/// disagreement between i and j with 1 - |i-j|/(k-1). Returns exactly 1 when
/// chance agreement is 1 (both raters used a single, shared label).
double cohen_kappa_indices(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t k,
                           Weighting weighting = Weighting::none);

/// Cohen's kappa over arbitrary labels; `label_space` fixes the order used
/// by linear weighting. Throws AgreementError on length mismatch, empty input
/// or a label outside the space.
template <class L>
double cohen_kappa(std::span<const L> a, std::span<const L> b, std::span<const L> label_space,
                   Weighting weighting = Weighting::none) {
    if (a.size() != b.size()) throw AgreementError("length mismatch");
    if (a.empty()) throw AgreementError("empty sequences");
    auto to_index = [&](std::span<const L> seq) {
        std::vector<std::size_t> out;
        out.reserve(seq.size());
        for (const auto& v : seq) {
            auto it = std::find(label_space.begin(), label_space.end(), v);
            if (it == label_space.end()) throw AgreementError("label outside space");
            out.push_back(static_cast<std::size_t>(it - label_space.begin()));
        }
        return out;
    };
    const auto ia = to_index(a);
    const auto ib = to_index(b);
    return cohen_kappa_indices(ia, ib, label_space.size(), weighting);
}

template <class L>
double cohen_kappa(const std::vector<L>& a, const std::vector<L>& b, const std::vector<L>& label_space,
                   Weighting weighting = Weighting::none) {
    return cohen_kappa(std::span<const L>(a), std::span<const L>(b), std::span<const L>(label_space), weighting);
}

// Dimensions compared between raters, in report order.
inline constexpr std::array<std::string_view, 6> kDimensions{"type",      "nature",  "civility",
                                                             "relevance", "clarity", "conciseness"};

struct SubcategoryKappa {
    std::string subcategory;
    double kappa = 0.0;
    bool degenerate = false;  // both raters gave the same constant answer
};

struct DimensionKappa {
    std::string dimension;
    double kappa = 0.0;                 // headline value
    std::optional<double> linear;       // scores only
    std::vector<SubcategoryKappa> per;  // type/nature only
};

struct KappaReport {
    std::size_t overlap = 0;
    std::vector<DimensionKappa> dimensions;  // kDimensions order

    const DimensionKappa& at(std::string_view dimension) const;
};

using LabelIndex = std::map<std::string, Labels, std::less<>>;

/// Agreement between two raters over their overlapping ids. Civility is
/// binary; type and nature average the binary presence kappa of each
/// subcategory, skipping degenerate subcategories unless all are; scores use
/// unweighted kappa with the linear variant alongside. Throws AgreementError
/// when no ids overlap.
KappaReport kappa_report(const LabelIndex& human, const LabelIndex& llm);

nlohmann::json report_to_json(const KappaReport& report);
std::string render_report(const KappaReport& report);

struct AnnotationRecord {
    std::string sample_id;
    std::string annotator_id;
    Labels labels;

    bool operator==(const AnnotationRecord&) const = default;
};

struct ConsensusRecord {
    std::string sample_id;
    Labels labels;
    std::string resolution_note;

    bool operator==(const ConsensusRecord&) const = default;
};

nlohmann::json annotation_to_json(const AnnotationRecord& record);
AnnotationRecord annotation_from_json(const nlohmann::json& j);
nlohmann::json consensus_to_json(const ConsensusRecord& record);
ConsensusRecord consensus_from_json(const nlohmann::json& j);

/// JSON value of one dimension ("type" -> ["Bugfix"], "clarity" -> 7).
nlohmann::json dimension_value(const Labels& labels, std::string_view dimension);
/// Returns `labels` with `dimension` replaced by `value`; throws SchemaError
/// on an invalid value and AgreementError on an unknown dimension.
Labels with_dimension(const Labels& labels, std::string_view dimension, const nlohmann::json& value);

struct Conflict {
    std::string sample_id;
    std::string dimension;
    nlohmann::json value_a;
    nlohmann::json value_b;

    bool operator==(const Conflict&) const = default;
};

class CoverageMismatch : public AgreementError {
public:
    CoverageMismatch(std::vector<std::string> missing_from_a, std::vector<std::string> missing_from_b);
    const std::vector<std::string>& missing_from_a() const noexcept { return missing_a_; }
    const std::vector<std::string>& missing_from_b() const noexcept { return missing_b_; }

private:
    std::vector<std::string> missing_a_;
    std::vector<std::string> missing_b_;
};

/// One entry per (sample, differing dimension), ordered by sample id then
/// dimension order. Both annotators must cover the same ids.
std::vector<Conflict> find_conflicts(const std::vector<AnnotationRecord>& a, const std::vector<AnnotationRecord>& b);

/// Decision for one conflict: take one annotator's value or supply a new one.
struct Resolution {
    std::string sample_id;
    std::string dimension;
    std::optional<std::string> pick_annotator;
    std::optional<nlohmann::json> value;
    std::string note;
};

nlohmann::json resolution_to_json(const Resolution& r);
Resolution resolution_from_json(const nlohmann::json& j);

/// Consensus for one sample, or nullopt while any of its conflicts is
/// unresolved. Resolutions must name an existing conflict and exactly one of
/// pick_annotator / value.
std::optional<ConsensusRecord> consensus_for(const AnnotationRecord& a, const AnnotationRecord& b,
                                             const std::vector<Resolution>& resolutions);

/// Consensus for every sample. Throws AgreementError when a conflict has no
/// resolution or a resolution does not match a conflict.
std::vector<ConsensusRecord> build_consensus(const std::vector<AnnotationRecord>& a,
                                             const std::vector<AnnotationRecord>& b,
                                             const std::vector<Resolution>& resolutions);

LabelIndex index_consensus(const std::vector<ConsensusRecord>& records);
LabelIndex index_judged(const std::vector<judge::JudgedRecord>& records);

}  // namespace curev::agreement
