#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kgqa/linker.h"
#include "kgqa/planner.h"
#include "kgqa/question_understanding.h"
#include "kgqa/sparql_client.h"

namespace kgqa {

struct PipelineConfig {
  EndpointConfig endpoint;
  LinkerParams linker;
  std::size_t max_queries = kDefaultMaxQueries;  // K
  QUProviderConfig qu;
  std::optional<std::filesystem::path> embedding_path;
  double tau = 0.5;
  std::size_t parallelism = 4;
  // N-Triples files served by an in-process fixture endpoint instead of the
  // remote one.
  std::vector<std::filesystem::path> fixture;
  // Whole-label sentence embedding service; replaces word affinity when set.
  std::optional<std::string> sentence_embedder_url;

  // Throws Error(kConfigError).
  void validate() const;
  bool uses_fixture() const { return !fixture.empty(); }
};

// Names accepted by apply_setting, in the spelling used by config files and
// command-line flags (environment variables use KGQA_ plus the upper-cased
// name with '-' replaced by '_').
const std::vector<std::string>& setting_names();

// Throws Error(kConfigError) for unknown keys or unparsable values.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

// Line-oriented "key = value" file; '#' starts a comment. Errors are
// LineError(kConfigError) with the 1-based line number.
void apply_config_text(PipelineConfig& cfg, std::string_view text);
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();
void apply_env(PipelineConfig& cfg, const EnvLookup& env = process_env());

// Request-level overrides: an object whose keys are setting names (hyphens or
// underscores) and whose values are strings, numbers or string arrays.
void apply_overrides(PipelineConfig& cfg, const nlohmann::json& overrides);

nlohmann::json config_to_json(const PipelineConfig& cfg);

}  // namespace kgqa
