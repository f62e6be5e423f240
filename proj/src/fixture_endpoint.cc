#include "kgqa/fixture_endpoint.h"

#include "httplib.h"
#include "kgqa/error.h"

namespace kgqa {

FixtureEndpoint::FixtureEndpoint(TripleStore store, FixtureOptions options)
    : store_(std::move(store)), options_(options) {}

std::shared_ptr<FixtureEndpoint> FixtureEndpoint::load(
    const std::vector<std::filesystem::path>& paths, FixtureOptions options) {
  return std::make_shared<FixtureEndpoint>(TripleStore::load(paths), options);
}

HttpReply FixtureEndpoint::handle(std::string_view query) {
  {
    std::lock_guard lock(mu_);
    log_.emplace_back(query);
  }
  try {
    QueryResult r = run_query(store_, query, options_);
    return HttpReply{200, r.is_ask ? write_ask_result(r.ask_value)
                                   : write_select_results(r.table)};
  } catch (const Error& e) {
    return HttpReply{400, e.what()};
  }
}

std::vector<std::string> FixtureEndpoint::query_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

void FixtureEndpoint::clear_log() {
  std::lock_guard lock(mu_);
  log_.clear();
}

HttpReply FixtureTransport::send(const EndpointConfig&, std::string_view query) {
  return endpoint_->handle(query);
}

struct FixtureServer::Impl {
  std::shared_ptr<FixtureEndpoint> endpoint;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;

  void install() {
    auto respond = [this](const std::string& query, httplib::Response& res) {
      HttpReply reply = endpoint->handle(query);
      res.status = reply.status;
      res.set_content(reply.body, reply.status == 200 ? "application/sparql-results+json"
                                                      : "text/plain");
    };
    server.Get("/sparql", [respond](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("query")) {
        res.status = 400;
        res.set_content("missing query parameter", "text/plain");
        return;
      }
      respond(req.get_param_value("query"), res);
    });
    server.Post("/sparql", [respond](const httplib::Request& req, httplib::Response& res) {
      if (req.get_header_value("Content-Type").starts_with("application/sparql-query")) {
        respond(req.body, res);
        return;
      }
      if (!req.has_param("query")) {
        res.status = 400;
        res.set_content("missing query parameter", "text/plain");
        return;
      }
      respond(req.get_param_value("query"), res);
    });
  }
};

FixtureServer::FixtureServer(std::shared_ptr<FixtureEndpoint> endpoint)
    : impl_(std::make_unique<Impl>()) {
  impl_->endpoint = std::move(endpoint);
  impl_->install();
}

FixtureServer::~FixtureServer() { stop(); }

int FixtureServer::start(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kConfigError,
                "cannot bind fixture endpoint to " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void FixtureServer::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kConfigError,
                "cannot serve fixture endpoint on " + host + ":" + std::to_string(port));
  }
}

void FixtureServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string FixtureServer::url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port) + "/sparql";
}

}  // namespace kgqa
