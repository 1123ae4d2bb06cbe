#pragma once

#include <json.hpp>

#include "curev/error.hpp"
#include "curev/labels.hpp"

namespace curev {

/// Raised when a persisted record does not match its documented schema.
/// `field()` names the offending key.
class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& what)
        : Error("schema", field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

nlohmann::json labels_to_json(const Labels& labels);
/// Validates label spaces and score ranges; throws SchemaError.
Labels labels_from_json(const nlohmann::json& j);

nlohmann::json judgment_to_json(const Judgment& j);
Judgment judgment_from_json(const nlohmann::json& j);

nlohmann::json post_judgment_to_json(const PostJudgment& p);
PostJudgment post_judgment_from_json(const nlohmann::json& j);

template <class E>
nlohmann::json label_set_to_json(const LabelSet<E>& set) {
    return set.names();
}

}  // namespace curev
