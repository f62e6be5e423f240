#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/rdf.h"

namespace kgqa {

enum class Dialect { kVirtuoso, kStardog, kGenericRegex };

std::string_view to_string(Dialect dialect);
// Throws Error(kUnsupportedDialect) for unknown names.
Dialect parse_dialect(std::string_view name);

struct EndpointConfig {
  static constexpr int kMaxRetriesCap = 5;

  std::string url;
  Dialect dialect = Dialect::kVirtuoso;
  std::chrono::milliseconds request_timeout{30000};
  int max_retries = 2;
  std::optional<std::string> default_graph;
  // First backoff delay; doubles on every retry.
  std::chrono::milliseconds retry_backoff{200};
  int connection_limit = 8;

  void validate() const;
};

struct HttpReply {
  int status = 200;
  std::string body;
};

// Carries one SPARQL request to an endpoint. Implementations throw
// Error(kTransport) when no HTTP reply was obtained.
class SparqlTransport {
 public:
  virtual ~SparqlTransport() = default;
  virtual HttpReply send(const EndpointConfig& cfg, std::string_view query) = 0;
};

// SPARQL 1.1 protocol over HTTP: POST with a form-encoded `query`, asking for
// application/sparql-results+json.
std::shared_ptr<SparqlTransport> make_http_transport();

// Endpoints that rejected the virtuoso full-text syntax; shared by every
// client in the process so the downgrade happens once per endpoint.
class TextSearchDowngrades {
 public:
  static TextSearchDowngrades& global();
  bool downgraded(const std::string& url) const;
  void mark(const std::string& url);
  void clear();

 private:
  mutable std::mutex mu_;
  std::set<std::string> urls_;
};

class SparqlClient {
 public:
  explicit SparqlClient(EndpointConfig cfg,
                        std::shared_ptr<SparqlTransport> transport = nullptr,
                        TextSearchDowngrades* downgrades = nullptr);

  BindingsTable execute_select(std::string_view query) const;
  bool execute_ask(std::string_view query) const;

  const EndpointConfig& config() const { return cfg_; }

  // Dialect to use for full-text fragments, after any cached downgrade.
  Dialect text_search_dialect() const;
  void downgrade_text_search() const;

 private:
  std::string execute(std::string_view query) const;

  EndpointConfig cfg_;
  std::shared_ptr<SparqlTransport> transport_;
  TextSearchDowngrades* downgrades_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

BindingsTable execute_select(const EndpointConfig& cfg, std::string_view query);
bool execute_ask(const EndpointConfig& cfg, std::string_view query);

// SPARQL 1.1 JSON results documents.
BindingsTable parse_select_results(std::string_view body);
bool parse_ask_result(std::string_view body);
std::string write_select_results(const BindingsTable& table);
std::string write_ask_result(bool value);

// Full-text constraint binding `var` to literals containing any keyword.
// Double quotes are stripped from keywords before rendering.
std::string render_contains(Dialect dialect, std::string_view var,
                            std::span<const std::string> keywords);

// Text wrapped in a single-quoted SPARQL string.
std::string sparql_single_quoted(std::string_view s);
std::string sparql_double_quoted(std::string_view s);

}  // namespace kgqa
