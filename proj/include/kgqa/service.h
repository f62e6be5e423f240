#pragma once

#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include "kgqa/pipeline.h"

namespace kgqa {

// REST front end of the pipeline.
//   GET  /api/health
//   GET  /api/config
//   POST /api/answer     {question, endpoint_url?, dialect?, overrides?}
//   POST /api/benchmark  multipart field "file", or the benchmark JSON as body
//   POST /api/execute    {sparql, endpoint_url?, dialect?}
// Errors are JSON {"error": {"code", "message", "phase"?}}.
class Service {
 public:
  // `request_log`, when given, receives one JSON line per request.
  Service(PipelineConfig base, std::shared_ptr<const EmbeddingStore> store = nullptr,
          std::ostream* request_log = nullptr);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds (0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  std::string url() const;
  const Pipeline& pipeline() const { return *base_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<Pipeline> base_;
};

}  // namespace kgqa
