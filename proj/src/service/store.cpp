#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <unistd.h>

#include "curev/jsonl.hpp"
#include "curev/label_json.hpp"
#include "curev/service.hpp"

namespace curev::service {

using nlohmann::json;

namespace {

std::string errno_text() { return std::strerror(errno); }

}  // namespace

AnnotationStore::AnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());

    std::string content;
    if (std::filesystem::exists(path_)) content = jsonl::read_text(path_);

    // Whatever follows the last newline is a write that never completed.
    const auto last_newline = content.rfind('\n');
    const std::size_t intact = last_newline == std::string::npos ? 0 : last_newline + 1;
    recovered_bytes_ = content.size() - intact;
    if (recovered_bytes_ > 0) std::filesystem::resize_file(path_, intact);

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < intact) {
        const auto end = content.find('\n', start);
        const std::string_view line(content.data() + start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto entry = json::parse(line);
            const auto kind = entry.at("kind").get<std::string>();
            if (kind == "annotation") {
                annotations_.push_back(agreement::annotation_from_json(entry.at("data")));
            } else if (kind == "resolution") {
                resolutions_.push_back(agreement::resolution_from_json(entry.at("data")));
            } else {
                throw StoreError("unknown entry kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw StoreError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw StoreError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }

    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StoreError("cannot open " + path_.string() + ": " + errno_text());
}

AnnotationStore::~AnnotationStore() {
    if (fd_ >= 0) ::close(fd_);
}

void AnnotationStore::write_line(const json& entry) {
    const auto line = jsonl::dump_line(entry) + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StoreError("write failed: " + errno_text());
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw StoreError("fsync failed: " + errno_text());
}

void AnnotationStore::append(const agreement::AnnotationRecord& record) {
    write_line(json{{"kind", "annotation"}, {"data", agreement::annotation_to_json(record)}});
    annotations_.push_back(record);
}

void AnnotationStore::append(const agreement::Resolution& resolution) {
    write_line(json{{"kind", "resolution"}, {"data", agreement::resolution_to_json(resolution)}});
    resolutions_.push_back(resolution);
}

}  // namespace curev::service
