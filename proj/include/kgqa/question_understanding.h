#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/graph_model.h"

namespace kgqa {

enum class QUProviderKind { kRemoteModel, kOfflineExtractor };

struct QUProviderConfig {
  QUProviderKind kind = QUProviderKind::kOfflineExtractor;
  // Base URL of the remote model; required iff kind == kRemoteModel.
  std::optional<std::string> endpoint_url;
  std::chrono::milliseconds timeout{10000};

  void validate() const;
};

// Text form of a pattern list, one triple per " | "-separated segment:
//   [e1] <termA> [r] <relation> [e2] <termB>
// where a variable term is written "var:<id>".
std::string encode_patterns(std::span<const PhraseTriplePattern> patterns);

// Inverse of encode_patterns. Throws MalformedModelOutput carrying the byte
// offset of the first violation.
std::vector<PhraseTriplePattern> parse_model_output(std::string_view text);

// Rule-based extractor used when no trained model is available. Every label it
// emits is a contiguous phrase of the question once articles are removed.
std::vector<PhraseTriplePattern> extract_offline(std::string_view question);

std::vector<PhraseTriplePattern> extract_triple_patterns(
    std::string_view question, const QUProviderConfig& provider);

DataType predict_data_type(std::string_view question);

// First noun-like token after the question word. Call only for string
// questions.
std::optional<std::string> predict_semantic_type(std::string_view question);

// Data type through the configured provider (remote classifier when the
// provider is remote, rule table otherwise) plus the semantic-type heuristic.
AnswerTypePrediction predict_answer_type(std::string_view question,
                                         const QUProviderConfig& provider);

}  // namespace kgqa
