#include <atomic>
#include <csignal>

#include <httplib.h>

#include "curev/service.hpp"

namespace curev::service {

namespace {

std::atomic<httplib::Server*> g_server{nullptr};

extern "C" void on_signal(int) {
    if (auto* s = g_server.load()) s->stop();
}

Request to_request(const httplib::Request& req) {
    Request out{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) out.query.emplace(k, v);
    return out;
}

}  // namespace

void serve(AnnotationService& service, const ServeOptions& options, const std::function<void(int port)>& on_listen) {
    httplib::Server server;
    if (options.static_dir && !server.set_mount_point("/", options.static_dir->string()))
        throw StoreError("static directory " + options.static_dir->string() + " does not exist");

    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        const auto r = service.handle(to_request(req));
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get(R"(/api/.*)", dispatch);
    server.Post(R"(/api/.*)", dispatch);

    int port = options.port;
    if (port == 0) {
        port = server.bind_to_any_port(options.host);
    } else if (!server.bind_to_port(options.host, port)) {
        port = -1;
    }
    if (port < 0) throw StoreError("cannot bind " + options.host + ":" + std::to_string(options.port));

    g_server.store(&server);
    auto old_int = std::signal(SIGINT, on_signal);
    auto old_term = std::signal(SIGTERM, on_signal);
    if (on_listen) on_listen(port);
    server.listen_after_bind();
    std::signal(SIGINT, old_int);
    std::signal(SIGTERM, old_term);
    g_server.store(nullptr);
}

void stop_serving() {
    if (auto* s = g_server.load()) s->stop();
}

}  // namespace curev::service
