#include "kgqa/sparql_client.h"

#include <algorithm>
#include <thread>

#include "http_util.h"
#include "json.hpp"
#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

using nlohmann::json;

std::string_view to_string(Dialect dialect) {
  switch (dialect) {
    case Dialect::kVirtuoso: return "virtuoso";
    case Dialect::kStardog: return "stardog";
    case Dialect::kGenericRegex: return "generic_regex";
  }
  return "virtuoso";
}

Dialect parse_dialect(std::string_view name) {
  std::string lower = text::to_lower(text::trim(name));
  if (lower == "virtuoso") return Dialect::kVirtuoso;
  if (lower == "stardog") return Dialect::kStardog;
  if (lower == "generic_regex" || lower == "generic" || lower == "regex") {
    return Dialect::kGenericRegex;
  }
  throw Error(ErrorCode::kUnsupportedDialect,
              "unsupported SPARQL dialect '" + std::string(name) + "'");
}

void EndpointConfig::validate() const {
  if (url.empty()) throw Error(ErrorCode::kConfigError, "endpoint URL is empty");
  // "fixture:" names an in-process endpoint; anything else must be http(s).
  if (!url.starts_with("fixture:")) {
    try {
      internal::split_url(url);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigError, "bad endpoint URL: " + std::string(e.what()));
    }
  }
  if (max_retries < 0 || max_retries > kMaxRetriesCap) {
    throw Error(ErrorCode::kConfigError,
                "max_retries must be within [0, " + std::to_string(kMaxRetriesCap) + "]");
  }
  if (request_timeout.count() <= 0) {
    throw Error(ErrorCode::kConfigError, "request timeout must be positive");
  }
  if (connection_limit < 1) {
    throw Error(ErrorCode::kConfigError, "connection limit must be positive");
  }
}

// ---------------------------------------------------------------------------

namespace {

class HttpTransport : public SparqlTransport {
 public:
  HttpReply send(const EndpointConfig& cfg, std::string_view query) override {
    internal::SplitUrl url;
    try {
      url = internal::split_url(cfg.url);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigError, e.what());
    }
    auto client = internal::make_client(url.origin, cfg.request_timeout);
    httplib::Headers headers = {{"Accept", "application/sparql-results+json"}};
    httplib::Params params;
    params.emplace("query", std::string(query));
    if (cfg.default_graph) params.emplace("default-graph-uri", *cfg.default_graph);
    auto res = client->Post(url.path, headers, params);
    if (!res) {
      throw Error(ErrorCode::kTransport, "request to " + cfg.url +
                                             " failed: " + httplib::to_string(res.error()));
    }
    return HttpReply{res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<SparqlTransport> make_http_transport() {
  return std::make_shared<HttpTransport>();
}

TextSearchDowngrades& TextSearchDowngrades::global() {
  static TextSearchDowngrades instance;
  return instance;
}

bool TextSearchDowngrades::downgraded(const std::string& url) const {
  std::lock_guard lock(mu_);
  return urls_.contains(url);
}

void TextSearchDowngrades::mark(const std::string& url) {
  std::lock_guard lock(mu_);
  urls_.insert(url);
}

void TextSearchDowngrades::clear() {
  std::lock_guard lock(mu_);
  urls_.clear();
}

SparqlClient::SparqlClient(EndpointConfig cfg,
                           std::shared_ptr<SparqlTransport> transport,
                           TextSearchDowngrades* downgrades)
    : cfg_(std::move(cfg)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      downgrades_(downgrades ? downgrades : &TextSearchDowngrades::global()) {
  cfg_.validate();
  slots_ = std::make_unique<std::counting_semaphore<>>(cfg_.connection_limit);
}

Dialect SparqlClient::text_search_dialect() const {
  if (cfg_.dialect == Dialect::kVirtuoso && downgrades_->downgraded(cfg_.url)) {
    return Dialect::kGenericRegex;
  }
  return cfg_.dialect;
}

void SparqlClient::downgrade_text_search() const { downgrades_->mark(cfg_.url); }

std::string SparqlClient::execute(std::string_view query) const {
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{slots_.get()};

  auto delay = cfg_.retry_backoff;
  for (int attempt = 0;; ++attempt) {
    HttpReply reply;
    try {
      reply = transport_->send(cfg_, query);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransport) throw;
      if (attempt >= cfg_.max_retries) {
        throw Error(ErrorCode::kTransport,
                    std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                        " attempts)");
      }
      std::this_thread::sleep_for(delay);
      delay *= 2;
      continue;
    }
    if (reply.status < 200 || reply.status >= 300) {
      std::string excerpt = reply.body.substr(0, 300);
      throw EndpointError(reply.status, excerpt);
    }
    return std::move(reply.body);
  }
}

BindingsTable SparqlClient::execute_select(std::string_view query) const {
  return parse_select_results(execute(query));
}

bool SparqlClient::execute_ask(std::string_view query) const {
  return parse_ask_result(execute(query));
}

BindingsTable execute_select(const EndpointConfig& cfg, std::string_view query) {
  return SparqlClient(cfg).execute_select(query);
}

bool execute_ask(const EndpointConfig& cfg, std::string_view query) {
  return SparqlClient(cfg).execute_ask(query);
}

// ---------------------------------------------------------------------------
// Results documents.

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedResults, "malformed SPARQL results: " + what);
}

json parse_document(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

RDFTerm term_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.contains("value") ||
      !j["type"].is_string() || !j["value"].is_string()) {
    malformed("binding lacks type/value");
  }
  const std::string& type = j["type"].get_ref<const std::string&>();
  std::string value = j["value"].get<std::string>();
  if (type == "uri") return RDFTerm::iri(std::move(value));
  if (type == "bnode") return RDFTerm::blank(std::move(value));
  if (type == "literal" || type == "typed-literal") {
    std::optional<std::string> datatype, lang;
    if (j.contains("xml:lang") && j["xml:lang"].is_string()) {
      lang = j["xml:lang"].get<std::string>();
    }
    if (j.contains("datatype") && j["datatype"].is_string()) {
      datatype = j["datatype"].get<std::string>();
    }
    if (lang && datatype && *datatype != vocab::kRdfLangString) {
      malformed("literal carries both a language and a datatype");
    }
    return RDFTerm::literal(std::move(value), std::move(datatype), std::move(lang));
  }
  malformed("unknown term type '" + type + "'");
}

json term_to_json(const RDFTerm& t) {
  json j;
  switch (t.kind) {
    case TermKind::kIri: j["type"] = "uri"; break;
    case TermKind::kBlankNode: j["type"] = "bnode"; break;
    case TermKind::kLiteral: j["type"] = "literal"; break;
  }
  j["value"] = t.value;
  if (t.lang) j["xml:lang"] = *t.lang;
  if (t.datatype) j["datatype"] = *t.datatype;
  return j;
}

}  // namespace

BindingsTable parse_select_results(std::string_view body) {
  json doc = parse_document(body);
  if (!doc.is_object() || !doc.contains("head") || !doc["head"].is_object()) {
    malformed("missing head");
  }
  BindingsTable table;
  if (doc["head"].contains("vars")) {
    if (!doc["head"]["vars"].is_array()) malformed("head.vars is not an array");
    for (const auto& v : doc["head"]["vars"]) {
      if (!v.is_string()) malformed("variable name is not a string");
      table.variables.push_back(v.get<std::string>());
    }
  }
  if (!doc.contains("results") || !doc["results"].is_object() ||
      !doc["results"].contains("bindings") || !doc["results"]["bindings"].is_array()) {
    malformed("missing results.bindings");
  }
  for (const auto& b : doc["results"]["bindings"]) {
    if (!b.is_object()) malformed("binding row is not an object");
    std::map<std::string, RDFTerm> row;
    for (const auto& [name, value] : b.items()) {
      if (std::find(table.variables.begin(), table.variables.end(), name) ==
          table.variables.end()) {
        malformed("row binds undeclared variable '" + name + "'");
      }
      row.emplace(name, term_from_json(value));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

bool parse_ask_result(std::string_view body) {
  json doc = parse_document(body);
  if (!doc.is_object() || !doc.contains("boolean") || !doc["boolean"].is_boolean()) {
    malformed("ASK document lacks a boolean");
  }
  return doc["boolean"].get<bool>();
}

std::string write_select_results(const BindingsTable& table) {
  json doc;
  doc["head"]["vars"] = table.variables;
  json bindings = json::array();
  for (const auto& row : table.rows) {
    json b = json::object();
    for (const auto& [name, term] : row) b[name] = term_to_json(term);
    bindings.push_back(std::move(b));
  }
  doc["results"]["bindings"] = std::move(bindings);
  return doc.dump();
}

std::string write_ask_result(bool value) {
  json doc;
  doc["head"] = json::object();
  doc["boolean"] = value;
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Full-text fragments.

std::string sparql_single_quoted(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string sparql_double_quoted(std::string_view s) {
  return "\"" + escape_literal(s) + "\"";
}

namespace {

std::string regex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) {
      out.push_back('\\');
    }
    out.push_back(c);
  }
  return out;
}

void check_variable(std::string_view var) {
  if (var.empty() ||
      !std::all_of(var.begin(), var.end(), [](char c) {
        return text::is_ascii_alpha(c) || text::is_ascii_digit(c) || c == '_';
      })) {
    throw Error(ErrorCode::kInvalidArgument,
                "'" + std::string(var) + "' is not a valid SPARQL variable name");
  }
}

}  // namespace

std::string render_contains(Dialect dialect, std::string_view var,
                            std::span<const std::string> keywords) {
  check_variable(var);
  if (keywords.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no keywords for the text search");
  }
  std::vector<std::string> cleaned;
  for (const auto& k : keywords) {
    std::string c;
    for (char ch : k) {
      if (ch != '"') c.push_back(ch);
    }
    c = std::string(text::trim(c));
    if (c.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "keyword '" + k + "' is empty after escaping");
    }
    cleaned.push_back(std::move(c));
  }

  switch (dialect) {
    case Dialect::kVirtuoso: {
      std::string expr = "(";
      for (std::size_t i = 0; i < cleaned.size(); ++i) {
        if (i > 0) expr += " OR ";
        expr += "\"" + cleaned[i] + "\"";
      }
      expr += ")";
      return "?" + std::string(var) + " <bif:contains> " + sparql_single_quoted(expr);
    }
    case Dialect::kStardog: {
      std::string expr;
      for (std::size_t i = 0; i < cleaned.size(); ++i) {
        if (i > 0) expr += " OR ";
        expr += "\"" + cleaned[i] + "\"";
      }
      return "SERVICE <tag:stardog:api:search:textMatch> { [] "
             "<tag:stardog:api:search:query> " +
             sparql_double_quoted(expr) + " ; <tag:stardog:api:search:result> ?" +
             std::string(var) + " . }";
    }
    case Dialect::kGenericRegex: {
      std::string pattern;
      for (std::size_t i = 0; i < cleaned.size(); ++i) {
        if (i > 0) pattern += "|";
        pattern += regex_escape(cleaned[i]);
      }
      return "FILTER(regex(str(?" + std::string(var) + "), " +
             sparql_double_quoted(pattern) + ", \"i\"))";
    }
  }
  throw Error(ErrorCode::kUnsupportedDialect, "unsupported SPARQL dialect");
}

}  // namespace kgqa
