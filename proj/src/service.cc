#include "kgqa/service.h"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "kgqa/json_io.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Status and body for a failed request.
struct Failure {
  int status;
  json body;
};

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTransport:
    case ErrorCode::kEndpointError:
    case ErrorCode::kMalformedResults:
    case ErrorCode::kProviderUnavailable: return 502;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfigError:
    case ErrorCode::kMalformedBenchmark:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kUnsupportedDialect: return 400;
    default: return 422;
  }
}

Failure failure_from(const Error& e) {
  json err = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (const auto* pe = dynamic_cast<const PipelineError*>(&e)) {
    err["phase"] = std::string(to_string(pe->phase()));
  }
  if (const auto* ee = dynamic_cast<const EndpointError*>(&e)) {
    err["status"] = ee->status();
    err["body"] = ee->body_excerpt();
  }
  if (const auto* le = dynamic_cast<const LineError*>(&e)) err["line"] = le->line();
  return {status_for(e.code()), {{"error", std::move(err)}}};
}

json parse_body(const httplib::Request& req) {
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("body is not JSON: ") + e.what());
  }
}

std::string optional_string(const json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return {};
  if (!body[key].is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be a string");
  }
  return body[key].get<std::string>();
}

bool is_ask_query(std::string_view q) {
  std::string upper;
  for (char c : q) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  auto word_at = [&](std::string_view w) {
    std::size_t pos = 0;
    while ((pos = upper.find(w, pos)) != std::string::npos) {
      bool left = pos == 0 || !text::is_ascii_alpha(upper[pos - 1]);
      bool right = pos + w.size() >= upper.size() || !text::is_ascii_alpha(upper[pos + w.size()]);
      if (left && right) return pos;
      ++pos;
    }
    return std::string::npos;
  };
  return word_at("ASK") < word_at("SELECT");
}

}  // namespace

struct Service::Impl {
  PipelineConfig base_cfg;
  std::shared_ptr<const EmbeddingStore> store;
  std::shared_ptr<Pipeline> base;
  std::ostream* log = nullptr;
  std::mutex log_mu;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;

  std::shared_ptr<SparqlTransport> base_transport() const {
    if (auto f = base->fixture_endpoint()) return std::make_shared<FixtureTransport>(f);
    return nullptr;
  }

  // Pipeline for one request; shares the base one when nothing is overridden.
  std::shared_ptr<const Pipeline> pipeline_for(const json& body) {
    std::string endpoint = optional_string(body, "endpoint_url");
    std::string dialect = optional_string(body, "dialect");
    bool has_overrides = body.contains("overrides") && !body["overrides"].is_null();
    if (endpoint.empty() && dialect.empty() && !has_overrides) return base;

    PipelineConfig cfg = base->config();
    if (has_overrides) {
      const json& o = body["overrides"];
      if (!o.is_object()) throw Error(ErrorCode::kInvalidArgument, "overrides must be an object");
      for (const auto& [key, value] : o.items()) {
        std::string k = text::to_lower(key);
        if (k == "fixture" || k == "embeddings") {
          throw Error(ErrorCode::kInvalidArgument,
                      "override '" + key + "' is not accepted over the API");
        }
      }
      apply_overrides(cfg, o);
    }
    std::shared_ptr<SparqlTransport> transport = base_transport();
    if (!endpoint.empty()) {
      cfg.endpoint.url = endpoint;
      cfg.fixture.clear();
      transport = nullptr;
    }
    if (!dialect.empty()) cfg.endpoint.dialect = parse_dialect(dialect);
    return std::make_shared<Pipeline>(cfg, store, transport);
  }

  void write_log(const httplib::Request& req, int status, double ms) {
    if (!log) return;
    json line = {{"method", req.method}, {"path", req.path}, {"status", status}, {"ms", ms}};
    std::lock_guard lock(log_mu);
    *log << line.dump() << '\n';
    log->flush();
  }

  template <typename F>
  httplib::Server::Handler wrap(F handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      auto start = Clock::now();
      json body;
      int status = 200;
      try {
        body = handler(req);
      } catch (const Error& e) {
        Failure f = failure_from(e);
        status = f.status;
        body = std::move(f.body);
      } catch (const std::exception& e) {
        Failure f = {500, {{"error", {{"code", "internal"}, {"message", e.what()}}}}};
        status = f.status;
        body = std::move(f.body);
      }
      res.status = status;
      res.set_content(body.dump(), "application/json");
      write_log(req, status,
                std::chrono::duration<double, std::milli>(Clock::now() - start).count());
    };
  }

  void install() {
    server.Get("/api/health", wrap([this](const httplib::Request&) {
      return json{{"status", "ok"}, {"endpoint", base->config().endpoint.url}};
    }));
    server.Get("/api/config", wrap([this](const httplib::Request&) {
      return config_to_json(base->config());
    }));
    server.Post("/api/answer", wrap([this](const httplib::Request& req) {
      json body = parse_body(req);
      std::string question = optional_string(body, "question");
      if (text::trim(question).empty()) {
        throw Error(ErrorCode::kInvalidArgument, "question is required");
      }
      auto p = pipeline_for(body);
      return to_json(p->answer(question));
    }));
    server.Post("/api/benchmark", wrap([this](const httplib::Request& req) {
      std::string content;
      if (req.is_multipart_form_data()) {
        if (!req.has_file("file")) {
          throw Error(ErrorCode::kInvalidArgument, "multipart field 'file' is required");
        }
        content = req.get_file_value("file").content;
      } else {
        content = req.body;
      }
      return to_json(base->run_benchmark_text(content));
    }));
    server.Post("/api/execute", wrap([this](const httplib::Request& req) {
      json body = parse_body(req);
      std::string sparql = optional_string(body, "sparql");
      if (text::trim(sparql).empty()) {
        throw Error(ErrorCode::kInvalidArgument, "sparql is required");
      }
      json selector = json::object();
      if (body.contains("endpoint_url")) selector["endpoint_url"] = body["endpoint_url"];
      if (body.contains("dialect")) selector["dialect"] = body["dialect"];
      auto p = pipeline_for(selector);
      if (is_ask_query(sparql)) {
        return json{{"form", "ask"}, {"boolean", p->client().execute_ask(sparql)}};
      }
      json out = json_io::to_json(p->client().execute_select(sparql));
      out["form"] = "select";
      return out;
    }));
  }
};

Service::Service(PipelineConfig base, std::shared_ptr<const EmbeddingStore> store,
                 std::ostream* request_log)
    : impl_(std::make_unique<Impl>()) {
  base_ = std::make_shared<Pipeline>(std::move(base), std::move(store));
  impl_->base = base_;
  impl_->store = base_->store();
  impl_->log = request_log;
  impl_->install();
}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port == 0 ? impl_->server.bind_to_any_port(host)
                          : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (impl_->port < 0) {
    throw Error(ErrorCode::kConfigError, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void Service::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kConfigError, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string Service::url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

}  // namespace kgqa
