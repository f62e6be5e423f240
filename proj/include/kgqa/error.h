#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgqa {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyInput,
  kDisconnectedGraph,
  kNoUnknown,
  kProviderUnavailable,
  kNoPatternsExtracted,
  kMalformedModelOutput,
  kEmptyAfterNormalization,
  kTransport,
  kEndpointError,
  kMalformedResults,
  kUnsupportedDialect,
  kNoAnchorVertices,
  kNoViableBGP,
  kAllPlansFailed,
  kMalformedBenchmark,
  kConfigError,
  kMalformedData,
};

std::string_view to_string(ErrorCode code);

// Base of every error raised by the library. The code is stable and is what
// the service reports to clients; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class MalformedModelOutput : public Error {
 public:
  MalformedModelOutput(std::size_t offset, const std::string& what)
      : Error(ErrorCode::kMalformedModelOutput,
              "malformed model output at byte " + std::to_string(offset) +
                  ": " + what),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EndpointError : public Error {
 public:
  EndpointError(int status, std::string body_excerpt)
      : Error(ErrorCode::kEndpointError,
              "endpoint returned HTTP " + std::to_string(status) + ": " +
                  body_excerpt),
        status_(status),
        body_excerpt_(std::move(body_excerpt)) {}

  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

// Errors tied to a position in a line-oriented input (benchmark files,
// configuration files, N-Triples).
class LineError : public Error {
 public:
  LineError(ErrorCode code, std::size_t line, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace kgqa
