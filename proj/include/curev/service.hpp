#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curev/agreement.hpp"
#include "curev/corpus.hpp"

namespace curev::service {

class StoreError : public Error {
public:
    explicit StoreError(const std::string& what) : Error("store", what) {}
};

/// Append-only JSONL log of annotations and resolutions. Every append is
/// flushed and fsynced before it returns. Reopening replays the log; a torn
/// final line (a crash mid-write) is dropped and trimmed from the file.
class AnnotationStore {
public:
    explicit AnnotationStore(std::filesystem::path path);
    ~AnnotationStore();
    AnnotationStore(const AnnotationStore&) = delete;
    AnnotationStore& operator=(const AnnotationStore&) = delete;

    void append(const agreement::AnnotationRecord& record);
    void append(const agreement::Resolution& resolution);

    const std::vector<agreement::AnnotationRecord>& annotations() const { return annotations_; }
    const std::vector<agreement::Resolution>& resolutions() const { return resolutions_; }
    /// Bytes dropped from a torn tail when the log was opened.
    std::size_t recovered_bytes() const { return recovered_bytes_; }

private:
    void write_line(const nlohmann::json& entry);

    std::filesystem::path path_;
    int fd_ = -1;
    std::vector<agreement::AnnotationRecord> annotations_;
    std::vector<agreement::Resolution> resolutions_;
    std::size_t recovered_bytes_ = 0;
};

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Annotation workflow for two annotators over a fixed sample set. All
/// requests are serialized; the store is the only state.
///
///   GET  /api/session
///   GET  /api/samples/next?annotator=ID
///   POST /api/annotations   {sample_id, annotator_id, labels}
///   GET  /api/conflicts
///   POST /api/resolutions   {sample_id, dimension, pick | value, note}
///   GET  /api/export        JSONL: annotation records, then consensus records
///
/// Errors are JSON bodies {error, field?}: 400 invalid input, 404 unknown
/// sample or no such open conflict, 409 duplicate annotation.
class AnnotationService {
public:
    AnnotationService(corpus::Corpus samples, std::vector<std::string> annotators, std::filesystem::path store_path);

    Response handle(const Request& request);

    std::vector<agreement::Conflict> open_conflicts() const;
    std::vector<agreement::ConsensusRecord> consensus() const;
    std::string export_jsonl() const;

private:
    Response session() const;
    Response next_sample(const Request& request) const;
    Response post_annotation(const Request& request);
    Response conflicts() const;
    Response post_resolution(const Request& request);

    const agreement::AnnotationRecord* find(std::string_view sample_id, std::string_view annotator) const;
    std::vector<agreement::Conflict> all_conflicts() const;

    corpus::Corpus samples_;
    std::vector<std::string> annotators_;
    AnnotationStore store_;
    mutable std::mutex mutex_;
};

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8765;  // 0 picks a free port
    std::optional<std::filesystem::path> static_dir;
};

/// Blocks serving `service` over HTTP until stop_serving() is called or the
/// process receives SIGINT/SIGTERM. `on_listen` receives the bound port.
void serve(AnnotationService& service, const ServeOptions& options,
           const std::function<void(int port)>& on_listen = {});
void stop_serving();

}  // namespace curev::service
