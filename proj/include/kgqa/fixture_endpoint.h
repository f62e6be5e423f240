#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "kgqa/fixture_query.h"
#include "kgqa/ntriples.h"
#include "kgqa/sparql_client.h"

namespace kgqa {

// In-memory SPARQL endpoint over N-Triples fixtures. Answers with SPARQL JSON
// results, or HTTP 400 with the error text for queries it cannot evaluate.
// Every query received is appended to a log that tests inspect.
class FixtureEndpoint {
 public:
  explicit FixtureEndpoint(TripleStore store, FixtureOptions options = {});

  static std::shared_ptr<FixtureEndpoint> load(
      const std::vector<std::filesystem::path>& paths, FixtureOptions options = {});

  HttpReply handle(std::string_view query);

  std::vector<std::string> query_log() const;
  void clear_log();

  const TripleStore& store() const { return store_; }
  const FixtureOptions& options() const { return options_; }

 private:
  TripleStore store_;
  FixtureOptions options_;
  mutable std::mutex mu_;
  std::vector<std::string> log_;
};

// Routes client requests straight into a FixtureEndpoint, no sockets involved.
class FixtureTransport : public SparqlTransport {
 public:
  explicit FixtureTransport(std::shared_ptr<FixtureEndpoint> endpoint)
      : endpoint_(std::move(endpoint)) {}
  HttpReply send(const EndpointConfig& cfg, std::string_view query) override;

 private:
  std::shared_ptr<FixtureEndpoint> endpoint_;
};

// Serves a FixtureEndpoint over HTTP at /sparql (GET ?query= or POST form /
// application/sparql-query body).
class FixtureServer {
 public:
  explicit FixtureServer(std::shared_ptr<FixtureEndpoint> endpoint);
  ~FixtureServer();
  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Binds and serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  std::string url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kgqa
