#include "kgqa/config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw Error(ErrorCode::kConfigError, "invalid value '" + std::string(value) + "' for " +
                                           std::string(key) + ": expected " +
                                           std::string(expected));
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || out == 0) {
    bad_value(key, value, "a positive integer");
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "an integer");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  std::string s(value);
  char* end = nullptr;
  double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, value, "a number");
  return out;
}

std::string canonical_key(std::string_view key) {
  std::string k = text::to_lower(text::trim(key));
  for (char& c : k) {
    if (c == '_') c = '-';
  }
  return k;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view p) {
  std::filesystem::path path{std::string(p)};
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

void apply(PipelineConfig& cfg, std::string_view raw_key, std::string_view raw_value,
           const std::filesystem::path& base) {
  std::string key = canonical_key(raw_key);
  std::string_view value = text::trim(raw_value);
  if (key == "endpoint") {
    cfg.endpoint.url = std::string(value);
  } else if (key == "dialect") {
    try {
      cfg.endpoint.dialect = parse_dialect(value);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigError, e.what());
    }
  } else if (key == "embeddings") {
    if (value.empty()) {
      cfg.embedding_path.reset();
    } else {
      cfg.embedding_path = resolve(base, value);
    }
  } else if (key == "max-vr") {
    cfg.linker.max_fetched_vertices = parse_count(key, value);
  } else if (key == "k-vertices") {
    cfg.linker.vertices_per_node = parse_count(key, value);
  } else if (key == "k-predicates") {
    cfg.linker.predicates_per_edge = parse_count(key, value);
  } else if (key == "per-vertex-limit") {
    cfg.linker.predicates_per_vertex_limit = parse_count(key, value);
  } else if (key == "max-queries") {
    cfg.max_queries = parse_count(key, value);
  } else if (key == "tau") {
    cfg.tau = parse_real(key, value);
  } else if (key == "qu-url") {
    if (value.empty()) {
      cfg.qu.kind = QUProviderKind::kOfflineExtractor;
      cfg.qu.endpoint_url.reset();
    } else {
      cfg.qu.kind = QUProviderKind::kRemoteModel;
      cfg.qu.endpoint_url = std::string(value);
    }
  } else if (key == "qu-timeout-ms") {
    cfg.qu.timeout = std::chrono::milliseconds(parse_count(key, value));
  } else if (key == "parallelism") {
    cfg.parallelism = parse_count(key, value);
  } else if (key == "fixture") {
    cfg.fixture.clear();
    std::stringstream ss{std::string(value)};
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::string_view t = text::trim(item);
      if (!t.empty()) cfg.fixture.push_back(resolve(base, t));
    }
  } else if (key == "timeout-ms") {
    cfg.endpoint.request_timeout = std::chrono::milliseconds(parse_count(key, value));
  } else if (key == "max-retries") {
    cfg.endpoint.max_retries = parse_int(key, value);
  } else if (key == "default-graph") {
    if (value.empty()) {
      cfg.endpoint.default_graph.reset();
    } else {
      cfg.endpoint.default_graph = std::string(value);
    }
  } else if (key == "connection-limit") {
    cfg.endpoint.connection_limit = static_cast<int>(parse_count(key, value));
  } else if (key == "coarse-url") {
    if (value.empty()) {
      cfg.sentence_embedder_url.reset();
    } else {
      cfg.sentence_embedder_url = std::string(value);
    }
  } else {
    throw Error(ErrorCode::kConfigError, "unknown setting '" + std::string(raw_key) + "'");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!uses_fixture() && endpoint.url.empty()) {
    throw Error(ErrorCode::kConfigError, "no endpoint configured (set endpoint or fixture)");
  }
  if (!endpoint.url.empty()) endpoint.validate();
  if (endpoint.max_retries < 0 || endpoint.max_retries > EndpointConfig::kMaxRetriesCap) {
    throw Error(ErrorCode::kConfigError, "max-retries must be within [0, 5]");
  }
  linker.validate();
  if (max_queries == 0) throw Error(ErrorCode::kConfigError, "max-queries must be positive");
  if (parallelism == 0) throw Error(ErrorCode::kConfigError, "parallelism must be positive");
  if (!(tau >= -1.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "tau must lie within [-1, 1]");
  }
  try {
    qu.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

const std::vector<std::string>& setting_names() {
  static const std::vector<std::string> names = {
      "endpoint",     "dialect",     "embeddings",   "max-vr",        "k-vertices",
      "k-predicates", "per-vertex-limit", "max-queries", "tau",        "qu-url",
      "qu-timeout-ms", "parallelism", "fixture",     "timeout-ms",    "max-retries",
      "default-graph", "connection-limit", "coarse-url"};
  return names;
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  apply(cfg, key, value, {});
}

namespace {

void apply_text(PipelineConfig& cfg, std::string_view text,
                const std::filesystem::path& base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw LineError(ErrorCode::kConfigError, line_no, "expected 'key = value'");
    }
    std::string_view key = text::trim(line.substr(0, eq));
    if (key.empty()) throw LineError(ErrorCode::kConfigError, line_no, "missing key");
    try {
      apply(cfg, key, line.substr(eq + 1), base);
    } catch (const LineError&) {
      throw;
    } catch (const Error& e) {
      throw LineError(ErrorCode::kConfigError, line_no, e.what());
    }
  }
}

}  // namespace

void apply_config_text(PipelineConfig& cfg, std::string_view text) {
  apply_text(cfg, text, {});
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    apply_text(cfg, ss.str(), path.parent_path());
  } catch (const LineError& e) {
    throw LineError(ErrorCode::kConfigError, e.line(), path.string() + ": " + e.what());
  }
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

void apply_env(PipelineConfig& cfg, const EnvLookup& env) {
  for (const auto& name : setting_names()) {
    std::string var = "KGQA_";
    for (char c : name) {
      var.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    if (auto v = env(var)) {
      try {
        apply_setting(cfg, name, *v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kConfigError, var + ": " + e.what());
      }
    }
  }
}

void apply_overrides(PipelineConfig& cfg, const nlohmann::json& overrides) {
  if (overrides.is_null()) return;
  if (!overrides.is_object()) {
    throw Error(ErrorCode::kConfigError, "overrides must be a JSON object");
  }
  for (const auto& [key, value] : overrides.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<long long>());
    } else if (value.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << value.get<double>();
      text = os.str();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!item.is_string()) {
          throw Error(ErrorCode::kConfigError, "override '" + key + "' must list strings");
        }
        if (!text.empty()) text += ",";
        text += item.get<std::string>();
      }
    } else if (value.is_null()) {
      text.clear();
    } else {
      throw Error(ErrorCode::kConfigError, "unsupported value for override '" + key + "'");
    }
    apply_setting(cfg, key, text);
  }
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["endpoint"] = cfg.endpoint.url;
  j["dialect"] = std::string(to_string(cfg.endpoint.dialect));
  j["timeout_ms"] = cfg.endpoint.request_timeout.count();
  j["max_retries"] = cfg.endpoint.max_retries;
  j["default_graph"] = cfg.endpoint.default_graph ? nlohmann::json(*cfg.endpoint.default_graph)
                                                  : nlohmann::json(nullptr);
  j["connection_limit"] = cfg.endpoint.connection_limit;
  j["max_vr"] = cfg.linker.max_fetched_vertices;
  j["k_vertices"] = cfg.linker.vertices_per_node;
  j["k_predicates"] = cfg.linker.predicates_per_edge;
  j["per_vertex_limit"] = cfg.linker.predicates_per_vertex_limit;
  j["max_queries"] = cfg.max_queries;
  j["tau"] = cfg.tau;
  j["parallelism"] = cfg.parallelism;
  j["qu_provider"] = cfg.qu.kind == QUProviderKind::kRemoteModel ? "remote_model"
                                                                 : "offline_extractor";
  j["qu_url"] = cfg.qu.endpoint_url ? nlohmann::json(*cfg.qu.endpoint_url)
                                    : nlohmann::json(nullptr);
  j["embeddings"] = cfg.embedding_path ? nlohmann::json(cfg.embedding_path->string())
                                       : nlohmann::json(nullptr);
  nlohmann::json fixture = nlohmann::json::array();
  for (const auto& p : cfg.fixture) fixture.push_back(p.string());
  j["fixture"] = std::move(fixture);
  j["coarse_url"] = cfg.sentence_embedder_url ? nlohmann::json(*cfg.sentence_embedder_url)
                                              : nlohmann::json(nullptr);
  return j;
}

}  // namespace kgqa
