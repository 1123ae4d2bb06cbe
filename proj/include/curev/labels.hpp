#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curev {

// Evaluation framework label spaces. Enumerator order is the canonical
// reporting order used by every table and JSON export.

enum class IssueType : std::uint8_t { refactoring, bugfix, testing, logging, documentation, other };
enum class Nature : std::uint8_t { prescriptive, descriptive, clarification, other };
enum class Civility : std::uint8_t { civil, uncivil };
enum class Criterion : std::uint8_t { relevance, clarity, conciseness };

template <class E>
struct LabelSpace;

template <>
struct LabelSpace<IssueType> {
    static constexpr std::string_view category = "Type";
    static constexpr std::array<std::string_view, 6> names{
        "Refactoring", "Bugfix", "Testing", "Logging", "Documentation", "Other"};
};

template <>
struct LabelSpace<Nature> {
    static constexpr std::string_view category = "Nature";
    static constexpr std::array<std::string_view, 4> names{
        "Prescriptive", "Descriptive", "Clarification", "Other"};
};

template <>
struct LabelSpace<Civility> {
    static constexpr std::string_view category = "Civility";
    static constexpr std::array<std::string_view, 2> names{"Civil", "Uncivil"};
};

template <>
struct LabelSpace<Criterion> {
    static constexpr std::string_view category = "Criterion";
    static constexpr std::array<std::string_view, 3> names{"Relevance", "Clarity", "Conciseness"};
};

template <class E>
constexpr std::size_t label_count = LabelSpace<E>::names.size();

template <class E>
constexpr std::string_view label_name(E value) {
    return LabelSpace<E>::names[static_cast<std::size_t>(value)];
}

template <class E>
constexpr std::array<E, label_count<E>> all_labels() {
    std::array<E, label_count<E>> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<E>(i);
    return out;
}

bool iequals(std::string_view a, std::string_view b);

/// Case-insensitive lookup of a label by its canonical name.
template <class E>
std::optional<E> parse_label(std::string_view token) {
    for (std::size_t i = 0; i < label_count<E>; ++i)
        if (iequals(token, LabelSpace<E>::names[i])) return static_cast<E>(i);
    return std::nullopt;
}

/// Lowercase criterion key as used in JSON and error messages ("clarity").
std::string criterion_key(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view key);

/// Multi-label set over a small enum, iterated in canonical order.
template <class E>
class LabelSet {
public:
    LabelSet() = default;
    LabelSet(std::initializer_list<E> labels) {
        for (E e : labels) insert(e);
    }

    void insert(E e) { bits_ |= bit(e); }
    void erase(E e) { bits_ &= static_cast<std::uint16_t>(~bit(e)); }
    bool contains(E e) const { return (bits_ & bit(e)) != 0; }
    bool empty() const { return bits_ == 0; }
    std::size_t size() const {
        std::size_t n = 0;
        for (E e : all_labels<E>()) n += contains(e) ? 1 : 0;
        return n;
    }
    std::vector<E> labels() const {
        std::vector<E> out;
        for (E e : all_labels<E>())
            if (contains(e)) out.push_back(e);
        return out;
    }
    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (E e : labels()) out.emplace_back(label_name(e));
        return out;
    }
    std::uint16_t bits() const { return bits_; }

    bool operator==(const LabelSet&) const = default;

private:
    static std::uint16_t bit(E e) { return static_cast<std::uint16_t>(1u << static_cast<unsigned>(e)); }
    std::uint16_t bits_ = 0;
};

/// The framework labels a rater assigns to one review comment: shared by the
/// LLM judgment and the human annotations.
struct Labels {
    LabelSet<IssueType> types;
    LabelSet<Nature> natures;
    Civility civility = Civility::civil;
    int relevance = 1;
    int clarity = 1;
    int conciseness = 1;

    int score(Criterion c) const {
        switch (c) {
            case Criterion::relevance: return relevance;
            case Criterion::clarity: return clarity;
            case Criterion::conciseness: return conciseness;
        }
        return 0;
    }

    bool operator==(const Labels&) const = default;
};

constexpr int kMinScore = 1;
constexpr int kMaxScore = 10;

inline bool score_in_range(int s) { return s >= kMinScore && s <= kMaxScore; }

/// Returns the name of the first field that breaks the framework's invariants
/// (non-empty label sets, scores in 1..10), or nullopt when valid.
std::optional<std::string> first_invalid_field(const Labels& labels);

/// Full judge output for one sample.
struct Judgment {
    std::string reference_comment;
    Labels labels;
    std::string rationale;

    bool operator==(const Judgment&) const = default;
};

/// Re-evaluation of a reformulated comment. Carries no relevance.
struct PostJudgment {
    LabelSet<Nature> natures;
    Civility civility = Civility::civil;
    int clarity = 1;
    int conciseness = 1;

    bool operator==(const PostJudgment&) const = default;
};

}  // namespace curev
