#pragma once

#include <stdexcept>
#include <string>

namespace curev {

/// Base for every error raised by the toolchain. `stage()` names the pipeline
/// component that failed; the CLI reports it in its machine-readable summary.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& what)
        : std::runtime_error(what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace curev
