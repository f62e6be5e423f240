#include "kgqa/question_understanding.h"

#include <algorithm>
#include <array>
#include <charconv>

#include "http_util.h"
#include "json.hpp"
#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

using nlohmann::json;

void QUProviderConfig::validate() const {
  if (kind == QUProviderKind::kRemoteModel &&
      (!endpoint_url || endpoint_url->empty())) {
    throw Error(ErrorCode::kConfigError,
                "remote question-understanding provider needs an endpoint URL");
  }
  if (kind == QUProviderKind::kOfflineExtractor && endpoint_url) {
    throw Error(ErrorCode::kConfigError,
                "offline extractor does not take an endpoint URL");
  }
}

// ---------------------------------------------------------------------------
// Pattern text codec.

namespace {

constexpr std::string_view kMarkA = "[e1] ";
constexpr std::string_view kMarkRelation = " [r] ";
constexpr std::string_view kMarkB = " [e2] ";
constexpr std::string_view kTripleSeparator = " | ";
constexpr std::string_view kVarPrefix = "var:";

bool looks_like_variable(std::string_view s) { return s.starts_with(kVarPrefix); }

void check_label(std::string_view label, std::string_view what) {
  if (label.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is empty");
  }
  if (label.find('[') != std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " '" + std::string(label) +
                    "' contains the reserved character '['");
  }
  if (label.find(kTripleSeparator) != std::string_view::npos ||
      text::is_space(label.front()) || text::is_space(label.back())) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " '" + std::string(label) +
                    "' cannot be encoded unambiguously");
  }
}

std::string encode_term(const PhraseTerm& term) {
  if (term.is_variable()) return std::string(kVarPrefix) + std::to_string(*term.var_id);
  if (looks_like_variable(term.label)) {
    throw Error(ErrorCode::kInvalidArgument,
                "entity label '" + term.label + "' collides with variable syntax");
  }
  check_label(term.label, "entity label");
  return term.label;
}

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  std::vector<PhraseTriplePattern> parse() {
    std::vector<PhraseTriplePattern> out;
    if (text_.empty()) fail(0, "empty model output");
    while (true) {
      out.push_back(parse_triple());
      if (pos_ == text_.size()) break;
      expect(kTripleSeparator, "expected ' | ' between triples");
    }
    return out;
  }

 private:
  PhraseTriplePattern parse_triple() {
    expect(kMarkA, "expected '[e1] '");
    std::size_t a_start = pos_;
    std::string_view a = take_until(kMarkRelation, "missing ' [r] ' marker");
    std::size_t r_start = pos_;
    std::string_view relation = take_until(kMarkB, "missing ' [e2] ' marker");
    std::size_t b_start = pos_;
    std::string_view b = take_object();

    PhraseTriplePattern pattern;
    pattern.subject = term(a, a_start);
    if (relation.empty()) fail(r_start, "empty relation label");
    pattern.relation_label = std::string(relation);
    pattern.object = term(b, b_start);
    if (pattern.subject.is_variable() && pattern.object.is_variable() &&
        pattern.subject.var_id == pattern.object.var_id) {
      fail(b_start, "triple uses the same variable on both sides");
    }
    return pattern;
  }

  PhraseTerm term(std::string_view raw, std::size_t at) {
    if (raw.empty()) fail(at, "empty term");
    if (raw.ends_with(" |")) fail(at + raw.size() - 2, "dangling triple separator");
    if (raw.find('[') != std::string_view::npos) {
      fail(at + raw.find('['), "unexpected '['");
    }
    if (raw.starts_with(kVarPrefix)) {
      std::string_view digits = raw.substr(kVarPrefix.size());
      int id = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || id < 1 ||
          digits.empty()) {
        fail(at, "bad variable id");
      }
      return PhraseTerm::variable(id);
    }
    return PhraseTerm::entity(std::string(raw));
  }

  // Text up to `marker`, consuming the marker. Stops at the first '[' so that
  // a missing marker is reported where the grammar actually broke.
  std::string_view take_until(std::string_view marker, const char* message) {
    std::size_t found = text_.find(marker, pos_);
    std::size_t bracket = text_.find('[', pos_);
    if (found == std::string_view::npos ||
        (bracket != std::string_view::npos && bracket < found + 1)) {
      fail(bracket == std::string_view::npos ? text_.size() : bracket, message);
    }
    std::string_view out = text_.substr(pos_, found - pos_);
    pos_ = found + marker.size();
    return out;
  }

  // The object runs to the next triple separator or the end of the input.
  std::string_view take_object() {
    std::size_t end = text_.size();
    std::size_t search = pos_;
    while (true) {
      std::size_t sep = text_.find(kTripleSeparator, search);
      if (sep == std::string_view::npos) break;
      if (text_.substr(sep + kTripleSeparator.size()).starts_with("[")) {
        end = sep;
        break;
      }
      search = sep + 1;
    }
    std::string_view out = text_.substr(pos_, end - pos_);
    pos_ = end;
    return out;
  }

  void expect(std::string_view token, const char* message) {
    if (text_.substr(pos_).starts_with(token)) {
      pos_ += token.size();
      return;
    }
    fail(pos_, message);
  }

  [[noreturn]] void fail(std::size_t at, const std::string& message) {
    throw MalformedModelOutput(at, message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_patterns(std::span<const PhraseTriplePattern> patterns) {
  std::string out;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& p = patterns[i];
    validate(p);
    check_label(p.relation_label, "relation label");
    if (i > 0) out.append(kTripleSeparator);
    out.append(kMarkA);
    out.append(encode_term(p.subject));
    out.append(kMarkRelation);
    out.append(p.relation_label);
    out.append(kMarkB);
    out.append(encode_term(p.object));
  }
  return out;
}

std::vector<PhraseTriplePattern> parse_model_output(std::string_view text) {
  return PatternParser(text).parse();
}

// ---------------------------------------------------------------------------
// Offline extractor.

namespace {

template <std::size_t N>
bool in(const std::array<std::string_view, N>& set, std::string_view word) {
  return std::find(set.begin(), set.end(), word) != set.end();
}

constexpr std::array<std::string_view, 14> kQuestionWords = {
    "who",  "whom", "whose", "what", "which", "where", "when",
    "how",  "name", "give",  "list", "show",  "tell",  "count"};
constexpr std::array<std::string_view, 7> kRelativeWords = {
    "which", "who", "whom", "whose", "that", "where", "what"};
constexpr std::array<std::string_view, 7> kBooleanAux = {
    "is", "are", "was", "were", "did", "does", "do"};
constexpr std::array<std::string_view, 17> kAuxiliaries = {
    "is",  "are",  "was", "were", "did",   "does", "do",   "has",  "have",
    "had", "be",   "been", "being", "can", "could", "will", "would"};
constexpr std::array<std::string_view, 3> kArticles = {"the", "a", "an"};
constexpr std::array<std::string_view, 10> kLeadingNoise = {
    "as", "one", "of", "me", "all", "also", "that", "which", "who", "and"};
constexpr std::array<std::string_view, 3> kTrailingNoise = {"and", "that", "which"};
constexpr std::array<std::string_view, 12> kEntityConnectors = {
    "of", "de", "del", "da", "di", "du", "von", "van", "der", "la", "le", "the"};
constexpr std::array<std::string_view, 20> kSentenceStarters = {
    "in",    "on",    "at",    "for",   "from",  "to",    "by",
    "with",  "since", "during", "of",   "about", "please", "and",
    "into",  "onto",  "over",  "under", "after", "before"};
constexpr std::array<std::string_view, 6> kQuantityWords = {
    "many", "much", "long", "old", "big", "large"};

struct Token {
  std::string text;
  bool quoted = false;
  bool punctuation = false;
};

bool is_punct(char c) {
  return c == ',' || c == ';' || c == ':' || c == '(' || c == ')' ||
         c == '?' || c == '!' || c == '.';
}

std::vector<Token> tokenize(std::string_view question) {
  std::string q = text::normalize_whitespace(question);
  while (!q.empty() && (q.back() == '?' || q.back() == '.' || q.back() == '!')) {
    q.pop_back();
  }
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < q.size()) {
    char c = q[i];
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (c == '"') {
      std::size_t close = q.find('"', i + 1);
      if (close != std::string::npos && close > i + 1) {
        out.push_back({std::string(text::trim(q.substr(i + 1, close - i - 1))), true, false});
        i = close + 1;
        continue;
      }
      ++i;
      continue;
    }
    if (is_punct(c)) {
      out.push_back({std::string(1, c), false, true});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < q.size() && !text::is_space(q[i]) && !is_punct(q[i]) && q[i] != '"') ++i;
    std::string word = q.substr(start, i - start);
    // Possessive clitic becomes its own token.
    if (word.size() > 2 && (word.ends_with("'s") || word.ends_with("’s"))) {
      std::size_t cut = word.ends_with("'s") ? 2 : 4;
      out.push_back({word.substr(0, word.size() - cut), false, false});
      out.push_back({"'s", false, false});
    } else {
      out.push_back({std::move(word), false, false});
    }
  }
  return out;
}

bool capitalized(const Token& t) {
  return !t.text.empty() && text::is_ascii_upper(t.text.front());
}

// An item of a clause: either a merged entity span or a single word.
struct Item {
  std::string text;
  bool entity = false;
  bool punctuation = false;
};

std::vector<Item> group_entities(const std::vector<Token>& tokens) {
  std::vector<Item> items;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const Token& t = tokens[i];
    if (t.quoted) {
      items.push_back({t.text, true, false});
      ++i;
      continue;
    }
    std::string lower = text::to_lower(t.text);
    bool starter = i == 0 && (in(kQuestionWords, lower) || in(kAuxiliaries, lower) ||
                              in(kSentenceStarters, lower) || in(kArticles, lower));
    if (!t.punctuation && capitalized(t) && !starter) {
      std::vector<std::string> span{t.text};
      std::size_t j = i + 1;
      while (j < tokens.size()) {
        const Token& n = tokens[j];
        if (n.punctuation || n.quoted) break;
        if (capitalized(n)) {
          span.push_back(n.text);
          ++j;
          continue;
        }
        // "Bank of America": a connector survives only between capitals.
        std::string nl = text::to_lower(n.text);
        std::size_t k = j;
        std::vector<std::string> connectors;
        while (k < tokens.size() && !tokens[k].punctuation && !tokens[k].quoted &&
               in(kEntityConnectors, text::to_lower(tokens[k].text))) {
          connectors.push_back(tokens[k].text);
          ++k;
        }
        if (!connectors.empty() && k < tokens.size() && !tokens[k].punctuation &&
            !tokens[k].quoted && capitalized(tokens[k])) {
          span.insert(span.end(), connectors.begin(), connectors.end());
          j = k;
          continue;
        }
        break;
      }
      items.push_back({text::join(span, " "), true, false});
      i = j;
      continue;
    }
    items.push_back({t.text, false, t.punctuation});
    ++i;
  }
  return items;
}

std::string lower_of(const Item& item) { return text::to_lower(item.text); }

// Removes articles, strips leading auxiliaries/noise and trailing noise.
std::vector<std::string> clean_relation(const std::vector<Item>& words,
                                        bool strip_leading_noise) {
  std::vector<std::string> kept;
  for (const auto& w : words) {
    if (w.punctuation || w.entity) continue;
    if (in(kArticles, lower_of(w))) continue;
    kept.push_back(w.text);
  }
  std::size_t begin = 0;
  while (begin < kept.size()) {
    std::string l = text::to_lower(kept[begin]);
    if (in(kAuxiliaries, l) || in(kRelativeWords, l) ||
        (strip_leading_noise && in(kLeadingNoise, l))) {
      ++begin;
      continue;
    }
    break;
  }
  std::size_t end = kept.size();
  while (end > begin) {
    std::string l = text::to_lower(kept[end - 1]);
    if (in(kAuxiliaries, l) || in(kTrailingNoise, l) || l == "'s") {
      --end;
      continue;
    }
    break;
  }
  return {kept.begin() + static_cast<std::ptrdiff_t>(begin),
          kept.begin() + static_cast<std::ptrdiff_t>(end)};
}

// Suffix table for third-person verb forms.
std::string lemmatize(const std::string& word) {
  std::string l = text::to_lower(word);
  auto strip = [&](std::size_t n, std::string_view add = "") {
    return word.substr(0, word.size() - n) + std::string(add);
  };
  if (l.size() > 4 && l.ends_with("ies")) return strip(3, "y");
  if (l.size() > 4 && (l.ends_with("sses") || l.ends_with("shes") ||
                       l.ends_with("ches") || l.ends_with("xes") ||
                       l.ends_with("zes"))) {
    return strip(2);
  }
  if (l.size() > 3 && l.ends_with("s") && !l.ends_with("ss") &&
      !l.ends_with("us") && !l.ends_with("is")) {
    return strip(1);
  }
  return word;
}

struct Clause {
  std::vector<Item> items;
};

std::vector<Clause> split_clauses(const std::vector<Item>& items, bool split) {
  std::vector<Clause> out(1);
  for (const auto& item : items) {
    if (split && !item.entity && (lower_of(item) == "and" || item.text == ";")) {
      if (!out.back().items.empty()) out.emplace_back();
      continue;
    }
    out.back().items.push_back(item);
  }
  if (out.back().items.empty()) out.pop_back();
  return out;
}

// Number of leading items of the first clause that belong to the question
// frame ("Name the sea into which", "In which city", "How many pages").
std::size_t frame_length(const std::vector<Item>& items,
                         std::vector<std::string>& frame_nouns) {
  std::size_t first_entity = items.size();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].entity) {
      first_entity = i;
      break;
    }
  }
  std::size_t end = 0;
  bool found = false;
  for (std::size_t i = 0; i < first_entity; ++i) {
    std::string l = lower_of(items[i]);
    if (in(kQuestionWords, l) || in(kRelativeWords, l)) {
      end = i + 1;
      found = true;
      // "which city is", "how many pages does": the determiner's noun stays
      // in the frame until the next auxiliary or entity.
      if (l == "which" || l == "what" || l == "how" || l == "whose") {
        std::size_t j = i + 1;
        while (j < first_entity) {
          std::string nl = lower_of(items[j]);
          if (in(kAuxiliaries, nl) || in(kRelativeWords, nl) || items[j].punctuation) break;
          ++j;
        }
        if (j < first_entity || j == items.size()) end = j;
      }
    }
  }
  if (!found) return 0;
  frame_nouns.clear();
  for (std::size_t i = 0; i < end; ++i) {
    std::string l = lower_of(items[i]);
    if (items[i].punctuation || in(kQuestionWords, l) || in(kRelativeWords, l) ||
        in(kArticles, l) || in(kQuantityWords, l) || in(kSentenceStarters, l) ||
        in(kLeadingNoise, l) || in(kAuxiliaries, l)) {
      continue;
    }
    frame_nouns.push_back(items[i].text);
  }
  return end;
}

std::string relation_for(const std::vector<Item>& before,
                         const std::vector<Item>& after,
                         const std::vector<std::string>& frame_nouns) {
  std::vector<std::string> words = clean_relation(before, false);
  if (words.empty()) words = clean_relation(after, true);
  if (!words.empty()) {
    if (words.size() == 1) words[0] = lemmatize(words[0]);
    return text::join(words, " ");
  }
  return text::join(frame_nouns, " ");
}

}  // namespace

std::vector<PhraseTriplePattern> extract_offline(std::string_view question) {
  if (text::trim(question).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "question is empty");
  }
  std::vector<Token> tokens = tokenize(question);
  std::vector<Item> items = group_entities(tokens);
  if (items.empty()) {
    throw Error(ErrorCode::kNoPatternsExtracted, "question has no words");
  }

  bool boolean = !items.front().entity && in(kBooleanAux, lower_of(items.front()));
  std::vector<PhraseTriplePattern> patterns;

  if (boolean) {
    std::vector<std::size_t> entity_pos;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].entity) entity_pos.push_back(i);
    }
    std::vector<std::string> no_frame;
    auto slice = [&](std::size_t from, std::size_t to) {
      return std::vector<Item>(items.begin() + static_cast<std::ptrdiff_t>(from),
                               items.begin() + static_cast<std::ptrdiff_t>(to));
    };
    if (entity_pos.size() >= 2) {
      for (std::size_t k = 0; k + 1 < entity_pos.size(); ++k) {
        std::string rel = relation_for(slice(entity_pos[k] + 1, entity_pos[k + 1]),
                                       {}, no_frame);
        if (rel.empty()) continue;
        patterns.push_back({PhraseTerm::entity(items[entity_pos[k]].text), rel,
                            PhraseTerm::entity(items[entity_pos[k + 1]].text)});
      }
    } else if (entity_pos.size() == 1) {
      std::size_t e = entity_pos[0];
      std::string rel = relation_for(slice(1, e), slice(e + 1, items.size()), no_frame);
      if (!rel.empty()) {
        patterns.push_back({PhraseTerm::entity(items[e].text), rel,
                            PhraseTerm::variable(1)});
      }
    }
  } else {
    std::vector<Clause> clauses = split_clauses(items, true);
    std::vector<std::string> frame_nouns;
    bool first = true;
    for (auto& clause : clauses) {
      std::size_t skip = first ? frame_length(clause.items, frame_nouns) : 0;
      first = false;
      std::vector<Item> body(clause.items.begin() + static_cast<std::ptrdiff_t>(skip),
                             clause.items.end());
      std::vector<std::size_t> entity_pos;
      for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i].entity) entity_pos.push_back(i);
      }
      for (std::size_t k = 0; k < entity_pos.size(); ++k) {
        std::size_t lo = k == 0 ? 0 : entity_pos[k - 1] + 1;
        std::size_t hi = k + 1 < entity_pos.size() ? entity_pos[k + 1] : body.size();
        std::vector<Item> before(body.begin() + static_cast<std::ptrdiff_t>(lo),
                                 body.begin() + static_cast<std::ptrdiff_t>(entity_pos[k]));
        std::vector<Item> after(body.begin() + static_cast<std::ptrdiff_t>(entity_pos[k] + 1),
                                body.begin() + static_cast<std::ptrdiff_t>(hi));
        std::string rel = relation_for(before, after, frame_nouns);
        if (rel.empty()) continue;
        patterns.push_back({PhraseTerm::variable(1), rel,
                            PhraseTerm::entity(body[entity_pos[k]].text)});
      }
    }
  }

  if (patterns.empty()) {
    throw Error(ErrorCode::kNoPatternsExtracted,
                "no entity/relation pair found in '" + std::string(question) + "'");
  }
  return patterns;
}

// ---------------------------------------------------------------------------
// Remote model.

namespace {

json post_json(const QUProviderConfig& provider, std::string_view route,
               const json& body) {
  auto url = internal::split_url(*provider.endpoint_url);
  auto client = internal::make_client(url.origin, provider.timeout);
  auto res = client->Post(internal::join_path(url.path, route), body.dump(),
                          "application/json");
  if (!res) {
    throw Error(ErrorCode::kProviderUnavailable,
                "question-understanding model unreachable: " +
                    httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderUnavailable,
                "question-understanding model answered HTTP " +
                    std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw MalformedModelOutput(0, std::string("response is not JSON: ") + e.what());
  }
}

PhraseTerm term_from_json(const json& j) {
  if (!j.is_object()) throw MalformedModelOutput(0, "term is not an object");
  std::string category = j.value("category", "entity");
  std::string label = j.value("label", "");
  if (category == "variable") {
    if (!j.contains("var_id") || !j["var_id"].is_number_integer()) {
      throw MalformedModelOutput(0, "variable term without integer var_id");
    }
    return PhraseTerm::variable(j["var_id"].get<int>(), label);
  }
  if (category != "entity") {
    throw MalformedModelOutput(0, "unknown term category '" + category + "'");
  }
  return PhraseTerm::entity(label);
}

}  // namespace

std::vector<PhraseTriplePattern> extract_triple_patterns(
    std::string_view question, const QUProviderConfig& provider) {
  if (text::trim(question).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "question is empty");
  }
  provider.validate();
  if (provider.kind == QUProviderKind::kOfflineExtractor) {
    return extract_offline(question);
  }
  json reply = post_json(provider, "/extract", {{"question", question}});
  if (!reply.contains("patterns") || !reply["patterns"].is_array()) {
    throw MalformedModelOutput(0, "response lacks a 'patterns' array");
  }
  std::vector<PhraseTriplePattern> out;
  for (const auto& p : reply["patterns"]) {
    PhraseTriplePattern pattern;
    try {
      pattern.subject = term_from_json(p.at("subject"));
      pattern.relation_label = p.value("relation", "");
      pattern.object = term_from_json(p.at("object"));
    } catch (const json::exception& e) {
      throw MalformedModelOutput(0, std::string("bad pattern: ") + e.what());
    }
    try {
      validate(pattern);
    } catch (const Error& e) {
      throw MalformedModelOutput(0, e.what());
    }
    out.push_back(std::move(pattern));
  }
  if (out.empty()) {
    throw Error(ErrorCode::kNoPatternsExtracted, "model returned no patterns");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Answer type prediction.

namespace {

std::vector<std::string> lower_words(std::string_view question) {
  std::vector<std::string> words;
  for (const auto& t : tokenize(question)) {
    if (t.punctuation) continue;
    for (auto& w : text::split_whitespace(text::to_lower(t.text))) {
      words.push_back(std::move(w));
    }
  }
  return words;
}

bool has_bigram(const std::vector<std::string>& w, std::string_view a,
                std::string_view b) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] == a && w[i + 1] == b) return true;
  }
  return false;
}

constexpr std::array<std::string_view, 12> kTypeStopwords = {
    "me", "us", "all", "of", "some", "any", "many", "much",
    "kind", "type", "sort", "'s"};

}  // namespace

DataType predict_data_type(std::string_view question) {
  std::vector<std::string> w = lower_words(question);
  if (w.empty()) return DataType::kString;
  if (in(kBooleanAux, w.front())) return DataType::kBoolean;
  bool date = std::find(w.begin(), w.end(), "when") != w.end() ||
              has_bigram(w, "what", "year") || has_bigram(w, "which", "year") ||
              has_bigram(w, "what", "date") || has_bigram(w, "which", "date");
  if (date) return DataType::kDate;
  if (has_bigram(w, "how", "many") || has_bigram(w, "how", "much") ||
      w.front() == "count") {
    return DataType::kNumeric;
  }
  return DataType::kString;
}

std::optional<std::string> predict_semantic_type(std::string_view question) {
  std::vector<std::string> w = lower_words(question);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!in(kQuestionWords, w[i])) continue;
    // Pronoun question words carry their type implicitly.
    if (w[i] == "who" || w[i] == "whom") return "person";
    if (w[i] == "where") return "place";
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const std::string& cand = w[j];
      if (in(kArticles, cand) || in(kAuxiliaries, cand) || in(kTypeStopwords, cand) ||
          in(kQuestionWords, cand) || in(kRelativeWords, cand)) {
        continue;
      }
      return cand;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

AnswerTypePrediction predict_answer_type(std::string_view question,
                                         const QUProviderConfig& provider) {
  AnswerTypePrediction out;
  if (provider.kind == QUProviderKind::kRemoteModel) {
    provider.validate();
    json reply = post_json(provider, "/datatype", {{"question", question}});
    try {
      out.data_type = parse_data_type(reply.at("data_type").get<std::string>());
    } catch (const json::exception& e) {
      throw MalformedModelOutput(0, std::string("bad data_type reply: ") + e.what());
    } catch (const Error& e) {
      throw MalformedModelOutput(0, e.what());
    }
  } else {
    out.data_type = predict_data_type(question);
  }
  if (out.data_type == DataType::kString) {
    out.semantic_type = predict_semantic_type(question);
  }
  return out;
}

}  // namespace kgqa
