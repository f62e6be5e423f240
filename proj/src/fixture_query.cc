#include "kgqa/fixture_query.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <regex>
#include <set>
#include <variant>

#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

constexpr std::string_view kBifContains = "bif:contains";
constexpr std::string_view kTextMatch = "tag:stardog:api:search:textMatch";
constexpr std::string_view kTextQuery = "tag:stardog:api:search:query";
constexpr std::string_view kTextResult = "tag:stardog:api:search:result";

[[noreturn]] void syntax_error(std::size_t offset, const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument,
              "SPARQL syntax error at offset " + std::to_string(offset) + ": " + what);
}

// ---------------------------------------------------------------------------
// Full-text expressions.

class TextExpr {
 public:
  explicit TextExpr(std::string_view s) : s_(s) {}

  bool matches(std::string_view literal) {
    lowered_ = text::to_lower(literal);
    pos_ = 0;
    bool r = disjunction();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected text");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kInvalidArgument,
                "malformed text search expression '" + std::string(s_) + "': " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && text::is_space(s_[pos_])) ++pos_;
  }

  bool keyword(std::string_view kw) {
    skip_ws();
    if (s_.size() - pos_ < kw.size()) return false;
    if (!text::iequals(s_.substr(pos_, kw.size()), kw)) return false;
    std::size_t end = pos_ + kw.size();
    if (end < s_.size() && !text::is_space(s_[end]) && s_[end] != '(' && s_[end] != '"') {
      return false;
    }
    pos_ = end;
    return true;
  }

  bool disjunction() {
    bool r = conjunction();
    while (keyword("OR")) r = conjunction() || r;
    return r;
  }

  bool conjunction() {
    bool r = primary();
    while (true) {
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] == ')') break;
      std::size_t save = pos_;
      if (keyword("OR")) {
        pos_ = save;
        break;
      }
      keyword("AND");
      r = primary() && r;
    }
    return r;
  }

  bool primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a term");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      bool r = disjunction();
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return r;
    }
    std::string phrase;
    if (c == '"') {
      auto end = s_.find('"', pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated phrase");
      phrase = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
    } else {
      std::size_t start = pos_;
      while (pos_ < s_.size() && !text::is_space(s_[pos_]) && s_[pos_] != '(' &&
             s_[pos_] != ')' && s_[pos_] != '"') {
        ++pos_;
      }
      phrase = std::string(s_.substr(start, pos_ - start));
    }
    while (!phrase.empty() && phrase.back() == '*') phrase.pop_back();
    phrase = text::normalize_whitespace(phrase);
    if (phrase.empty()) fail("empty phrase");
    return lowered_.find(text::to_lower(phrase)) != std::string::npos;
  }

  std::string_view s_;
  std::string lowered_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Tokens.

enum class Tok { kIri, kPName, kVar, kString, kLang, kNumber, kWord, kPunct, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::size_t offset = 0;
};

bool word_char(char c) {
  return text::is_ascii_alpha(c) || text::is_ascii_digit(c) || c == '_' || c == '-' ||
         c == '.' || c == ':' || c == '%' || static_cast<unsigned char>(c) >= 0x80;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string t, std::size_t at) { out.push_back({k, std::move(t), at}); };
  while (i < s.size()) {
    char c = s[i];
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    std::size_t at = i;
    if (c == '<') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '>' && !text::is_space(s[j]) && s[j] != '<' &&
             s[j] != '"' && s[j] != '{' && s[j] != '}') {
        ++j;
      }
      if (j < s.size() && s[j] == '>') {
        push(Tok::kIri, std::string(s.substr(i + 1, j - i - 1)), at);
        i = j + 1;
        continue;
      }
      if (i + 1 < s.size() && s[i + 1] == '=') {
        push(Tok::kPunct, "<=", at);
        i += 2;
      } else {
        push(Tok::kPunct, "<", at);
        ++i;
      }
      continue;
    }
    if (c == '?' || c == '$') {
      std::size_t j = i + 1;
      while (j < s.size() && (text::is_ascii_alpha(s[j]) || text::is_ascii_digit(s[j]) ||
                              s[j] == '_')) {
        ++j;
      }
      if (j == i + 1) syntax_error(at, "empty variable name");
      push(Tok::kVar, std::string(s.substr(i + 1, j - i - 1)), at);
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::string value;
      std::size_t j = i + 1;
      while (true) {
        if (j >= s.size()) syntax_error(at, "unterminated string");
        char d = s[j++];
        if (d == c) break;
        if (d == '\n') syntax_error(at, "newline in string");
        if (d != '\\') {
          value.push_back(d);
          continue;
        }
        if (j >= s.size()) syntax_error(at, "dangling escape");
        char e = s[j++];
        switch (e) {
          case 't': value.push_back('\t'); break;
          case 'n': value.push_back('\n'); break;
          case 'r': value.push_back('\r'); break;
          case 'b': value.push_back('\b'); break;
          case 'f': value.push_back('\f'); break;
          case '"': value.push_back('"'); break;
          case '\'': value.push_back('\''); break;
          case '\\': value.push_back('\\'); break;
          default: syntax_error(j - 2, std::string("unknown escape '\\") + e + "'");
        }
      }
      push(Tok::kString, std::move(value), at);
      i = j;
      continue;
    }
    if (c == '@') {
      std::size_t j = i + 1;
      while (j < s.size() && (text::is_ascii_alpha(s[j]) || text::is_ascii_digit(s[j]) ||
                              s[j] == '-')) {
        ++j;
      }
      if (j == i + 1) syntax_error(at, "empty language tag");
      push(Tok::kLang, text::to_lower(s.substr(i + 1, j - i - 1)), at);
      i = j;
      continue;
    }
    if (text::is_ascii_digit(c)) {
      std::size_t j = i;
      while (j < s.size() && text::is_ascii_digit(s[j])) ++j;
      if (j + 1 < s.size() && s[j] == '.' && text::is_ascii_digit(s[j + 1])) {
        ++j;
        while (j < s.size() && text::is_ascii_digit(s[j])) ++j;
      }
      push(Tok::kNumber, std::string(s.substr(i, j - i)), at);
      i = j;
      continue;
    }
    if (text::is_ascii_alpha(c) || c == '_' || c == ':' ||
        static_cast<unsigned char>(c) >= 0x80) {
      std::size_t j = i;
      while (j < s.size() && word_char(s[j])) ++j;
      while (j > i + 1 && s[j - 1] == '.') --j;
      std::string w(s.substr(i, j - i));
      Tok kind = w.find(':') != std::string::npos ? Tok::kPName : Tok::kWord;
      push(kind, std::move(w), at);
      i = j;
      continue;
    }
    static const std::string_view two[] = {"^^", "!=", ">=", "&&", "||"};
    bool matched = false;
    for (auto t : two) {
      if (s.substr(i, 2) == t) {
        push(Tok::kPunct, std::string(t), at);
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("{}().;,[]*!=>").find(c) != std::string_view::npos) {
      push(Tok::kPunct, std::string(1, c), at);
      ++i;
      continue;
    }
    syntax_error(at, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Query model.

struct Slot {
  bool is_var = false;
  std::string var;
  RDFTerm term;
};

struct TriplePattern {
  Slot s, p, o;
};

struct TextConstraint {
  std::string var;
  std::string expr;
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
  enum class Op { kVar, kConst, kOr, kAnd, kNot, kEq, kNe, kLt, kGt, kLe, kGe, kCall };
  Op op = Op::kConst;
  std::string name;
  RDFTerm value;
  std::vector<ExprPtr> args;
};

struct Group;

struct OptionalElem {
  std::shared_ptr<Group> group;
};

struct UnionElem {
  std::vector<std::shared_ptr<Group>> branches;
};

using Element = std::variant<TriplePattern, TextConstraint, OptionalElem, UnionElem>;

struct Group {
  std::vector<Element> elements;
  std::vector<ExprPtr> filters;
};

struct OrderKey {
  std::string var;
  bool descending = false;
};

struct Query {
  bool ask = false;
  bool distinct = false;
  bool star = false;
  std::vector<std::string> projection;
  std::vector<std::string> mentioned;  // user variables in order of appearance
  Group where;
  std::vector<OrderKey> order;
  std::optional<std::size_t> limit;
  std::size_t offset = 0;
};

bool hidden_var(std::string_view v) { return !v.empty() && v[0] == ' '; }

// ---------------------------------------------------------------------------
// Parser.

class Parser {
 public:
  Parser(std::string_view text, const FixtureOptions& options)
      : toks_(tokenize(text)), options_(options) {}

  Query parse() {
    prologue();
    if (accept_word("SELECT")) {
      select_clause();
    } else if (accept_word("ASK")) {
      q_.ask = true;
    } else {
      fail("expected SELECT or ASK");
    }
    while (accept_word("FROM")) {
      accept_word("NAMED");
      if (peek().kind != Tok::kIri && peek().kind != Tok::kPName) fail("expected an IRI");
      ++pos_;
    }
    accept_word("WHERE");
    q_.where = group();
    modifiers();
    if (peek().kind != Tok::kEnd) fail("unexpected trailing input");
    return std::move(q_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    syntax_error(t.offset, what + (t.kind == Tok::kEnd ? " at end of query"
                                                        : " near '" + t.text + "'"));
  }

  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kWord && text::iequals(t.text, w);
  }

  bool accept_word(std::string_view w) {
    if (!is_word(w)) return false;
    ++pos_;
    return true;
  }

  bool is_punct(std::string_view p) const {
    return peek().kind == Tok::kPunct && peek().text == p;
  }

  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    ++pos_;
    return true;
  }

  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }

  void mention(const std::string& v) {
    if (hidden_var(v)) return;
    if (std::find(q_.mentioned.begin(), q_.mentioned.end(), v) == q_.mentioned.end()) {
      q_.mentioned.push_back(v);
    }
  }

  void prologue() {
    while (true) {
      if (accept_word("PREFIX")) {
        const Token& t = peek();
        if (t.kind != Tok::kPName || t.text.back() != ':' ||
            t.text.find(':') != t.text.size() - 1) {
          fail("expected a prefix name");
        }
        std::string prefix = t.text.substr(0, t.text.size() - 1);
        ++pos_;
        if (peek().kind != Tok::kIri) fail("expected an IRI");
        prefixes_[prefix] = peek().text;
        ++pos_;
      } else if (accept_word("BASE")) {
        if (peek().kind != Tok::kIri) fail("expected an IRI");
        ++pos_;
      } else {
        return;
      }
    }
  }

  void select_clause() {
    if (accept_word("DISTINCT")) {
      q_.distinct = true;
    } else {
      accept_word("REDUCED");
    }
    if (accept("*")) {
      q_.star = true;
      return;
    }
    while (peek().kind == Tok::kVar) {
      q_.projection.push_back(peek().text);
      mention(peek().text);
      ++pos_;
    }
    if (q_.projection.empty()) fail("expected projection variables");
  }

  void modifiers() {
    while (true) {
      if (accept_word("ORDER")) {
        if (!accept_word("BY")) fail("expected BY");
        bool any = false;
        while (true) {
          if (peek().kind == Tok::kVar) {
            q_.order.push_back({peek().text, false});
            ++pos_;
          } else if (is_word("ASC") || is_word("DESC")) {
            bool desc = is_word("DESC");
            ++pos_;
            expect("(");
            if (peek().kind != Tok::kVar) fail("expected a variable");
            q_.order.push_back({peek().text, desc});
            ++pos_;
            expect(")");
          } else {
            break;
          }
          any = true;
        }
        if (!any) fail("expected an ordering key");
      } else if (accept_word("LIMIT")) {
        q_.limit = number();
      } else if (accept_word("OFFSET")) {
        q_.offset = number();
      } else {
        return;
      }
    }
  }

  std::size_t number() {
    if (peek().kind != Tok::kNumber || peek().text.find('.') != std::string::npos) {
      fail("expected an integer");
    }
    std::size_t n = std::stoull(peek().text);
    ++pos_;
    return n;
  }

  std::string expand(const Token& t) {
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      if (prefix == "bif") return t.text;
      syntax_error(t.offset, "undeclared prefix '" + prefix + "'");
    }
    std::string local;
    std::string_view rest = std::string_view(t.text).substr(colon + 1);
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == '\\' && i + 1 < rest.size()) ++i;
      local.push_back(rest[i]);
    }
    return it->second + local;
  }

  std::string iri_token() {
    const Token& t = peek();
    if (t.kind == Tok::kIri) {
      ++pos_;
      return t.text;
    }
    if (t.kind == Tok::kPName) {
      ++pos_;
      return expand(t);
    }
    fail("expected an IRI");
  }

  std::string fresh_blank() { return " b" + std::to_string(blank_counter_++); }

  RDFTerm literal_token() {
    std::string value = peek().text;
    ++pos_;
    if (peek().kind == Tok::kLang) {
      std::string lang = peek().text;
      ++pos_;
      return RDFTerm::literal(std::move(value), std::nullopt, std::move(lang));
    }
    if (accept("^^")) return RDFTerm::literal(std::move(value), iri_token());
    return RDFTerm::literal(std::move(value));
  }

  RDFTerm number_token() {
    std::string v = peek().text;
    ++pos_;
    bool decimal = v.find('.') != std::string::npos;
    return RDFTerm::literal(v, std::string(vocab::kXsd) + (decimal ? "decimal" : "integer"));
  }

  Slot term(Group& g) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kVar: {
        ++pos_;
        mention(t.text);
        return Slot{true, t.text, {}};
      }
      case Tok::kIri:
      case Tok::kPName: return Slot{false, {}, RDFTerm::iri(iri_token())};
      case Tok::kString: return Slot{false, {}, literal_token()};
      case Tok::kNumber: return Slot{false, {}, number_token()};
      case Tok::kWord:
        if (text::iequals(t.text, "true") || text::iequals(t.text, "false")) {
          ++pos_;
          return Slot{false, {},
                      RDFTerm::literal(text::to_lower(t.text), std::string(vocab::kXsdBoolean))};
        }
        break;
      case Tok::kPunct:
        if (t.text == "[") {
          ++pos_;
          Slot blank{true, fresh_blank(), {}};
          if (!accept("]")) {
            property_list(g, blank);
            expect("]");
          }
          return blank;
        }
        break;
      default: break;
    }
    fail("expected an RDF term");
  }

  Slot verb() {
    if (is_word("a")) {
      ++pos_;
      return Slot{false, {}, RDFTerm::iri(std::string(vocab::kRdfType))};
    }
    if (peek().kind == Tok::kVar) {
      mention(peek().text);
      Slot s{true, peek().text, {}};
      ++pos_;
      return s;
    }
    return Slot{false, {}, RDFTerm::iri(iri_token())};
  }

  void add_triple(Group& g, const Slot& s, const Slot& p, const Slot& o) {
    if (!p.is_var && p.term.value == kBifContains) {
      if (!options_.bif_contains) {
        throw Error(ErrorCode::kInvalidArgument,
                    "SPARQL compiler error: unknown predicate bif:contains");
      }
      if (!s.is_var) fail("bif:contains needs a variable subject");
      if (o.is_var || !o.term.is_literal()) fail("bif:contains needs a literal expression");
      g.elements.emplace_back(TextConstraint{s.var, o.term.value});
      return;
    }
    g.elements.emplace_back(TriplePattern{s, p, o});
  }

  void property_list(Group& g, const Slot& subject) {
    while (true) {
      Slot p = verb();
      while (true) {
        Slot o = term(g);
        add_triple(g, subject, p, o);
        if (!accept(",")) break;
      }
      if (!accept(";")) return;
      while (accept(";")) {
      }
      if (is_punct(".") || is_punct("}") || is_punct("]")) return;
    }
  }

  Group group() {
    expect("{");
    Group g;
    while (!accept("}")) {
      if (peek().kind == Tok::kEnd) fail("unterminated group");
      if (accept(".")) continue;
      if (accept_word("OPTIONAL")) {
        g.elements.emplace_back(OptionalElem{std::make_shared<Group>(group())});
      } else if (accept_word("FILTER")) {
        g.filters.push_back(constraint());
      } else if (accept_word("SERVICE")) {
        accept_word("SILENT");
        std::size_t at = peek().offset;
        std::string iri = iri_token();
        Group inner = group();
        service(g, iri, inner, at);
      } else if (is_punct("{")) {
        UnionElem u;
        u.branches.push_back(std::make_shared<Group>(group()));
        while (accept_word("UNION")) u.branches.push_back(std::make_shared<Group>(group()));
        g.elements.emplace_back(std::move(u));
      } else {
        Slot s = term(g);
        if (s.is_var && hidden_var(s.var) && (is_punct(".") || is_punct("}"))) continue;
        property_list(g, s);
      }
    }
    return g;
  }

  void service(Group& g, const std::string& iri, const Group& inner, std::size_t at) {
    if (iri != kTextMatch) syntax_error(at, "SERVICE <" + iri + "> is not supported");
    if (!options_.stardog_text_match) {
      throw Error(ErrorCode::kInvalidArgument, "unknown service <" + iri + ">");
    }
    std::optional<std::string> expr, var;
    for (const auto& e : inner.elements) {
      const auto* tp = std::get_if<TriplePattern>(&e);
      if (!tp || tp->p.is_var) syntax_error(at, "unexpected pattern in textMatch service");
      if (tp->p.term.value == kTextQuery && !tp->o.is_var) {
        expr = tp->o.term.value;
      } else if (tp->p.term.value == kTextResult && tp->o.is_var) {
        var = tp->o.var;
      } else {
        syntax_error(at, "unexpected pattern in textMatch service");
      }
    }
    if (!expr || !var) syntax_error(at, "textMatch service needs a query and a result");
    g.elements.emplace_back(TextConstraint{*var, *expr});
  }

  // FILTER argument: bracketted expression or a bare function call.
  ExprPtr constraint() {
    if (is_punct("(")) {
      ++pos_;
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    if (peek().kind == Tok::kWord) return primary();
    fail("expected a constraint");
  }

  ExprPtr make(Expr::Op op, std::vector<ExprPtr> args, std::string name = {}) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->args = std::move(args);
    e->name = std::move(name);
    return e;
  }

  ExprPtr expression() {
    ExprPtr lhs = conjunction();
    while (accept("||")) lhs = make(Expr::Op::kOr, {lhs, conjunction()});
    return lhs;
  }

  ExprPtr conjunction() {
    ExprPtr lhs = relational();
    while (accept("&&")) lhs = make(Expr::Op::kAnd, {lhs, relational()});
    return lhs;
  }

  ExprPtr relational() {
    ExprPtr lhs = unary();
    static const std::pair<std::string_view, Expr::Op> ops[] = {
        {"=", Expr::Op::kEq},  {"!=", Expr::Op::kNe}, {"<", Expr::Op::kLt},
        {">", Expr::Op::kGt},  {"<=", Expr::Op::kLe}, {">=", Expr::Op::kGe}};
    for (auto [text, op] : ops) {
      if (accept(text)) return make(op, {lhs, unary()});
    }
    return lhs;
  }

  ExprPtr unary() {
    if (accept("!")) return make(Expr::Op::kNot, {unary()});
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    if (accept("(")) {
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    if (t.kind == Tok::kVar) {
      ++pos_;
      return make(Expr::Op::kVar, {}, t.text);
    }
    if (t.kind == Tok::kWord && !text::iequals(t.text, "true") &&
        !text::iequals(t.text, "false")) {
      std::string name = text::to_lower(t.text);
      ++pos_;
      expect("(");
      std::vector<ExprPtr> args;
      if (!accept(")")) {
        args.push_back(expression());
        while (accept(",")) args.push_back(expression());
        expect(")");
      }
      return make(Expr::Op::kCall, std::move(args), std::move(name));
    }
    Group scratch;
    Slot s = term(scratch);
    if (s.is_var) fail("unexpected blank node in expression");
    auto e = make(Expr::Op::kConst, {});
    e->value = std::move(s.term);
    return e;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const FixtureOptions& options_;
  std::map<std::string, std::string> prefixes_;
  std::size_t blank_counter_ = 0;
  Query q_;
};

// ---------------------------------------------------------------------------
// Evaluation.

using Binding = std::map<std::string, RDFTerm>;

const RDFTerm* lookup(const Binding& b, const std::string& var) {
  auto it = b.find(var);
  return it == b.end() ? nullptr : &it->second;
}

bool numeric_datatype(const std::optional<std::string>& dt) {
  if (!dt || !dt->starts_with(vocab::kXsd)) return false;
  std::string_view local = std::string_view(*dt).substr(vocab::kXsd.size());
  static const std::set<std::string_view> kNumeric = {
      "integer", "decimal", "double", "float", "long", "int", "short", "byte",
      "nonNegativeInteger", "positiveInteger", "negativeInteger", "nonPositiveInteger",
      "unsignedLong", "unsignedInt", "unsignedShort", "unsignedByte"};
  return kNumeric.contains(local);
}

std::optional<double> numeric_value(const RDFTerm& t) {
  if (!t.is_literal() || !numeric_datatype(t.datatype)) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(t.value.c_str(), &end);
  if (end == t.value.c_str()) return std::nullopt;
  return v;
}

RDFTerm boolean(bool v) {
  return RDFTerm::literal(v ? "true" : "false", std::string(vocab::kXsdBoolean));
}

RDFTerm plain(std::string v) { return RDFTerm::literal(std::move(v)); }

// Effective boolean value; nullopt is a type error.
std::optional<bool> ebv(const std::optional<RDFTerm>& t) {
  if (!t || !t->is_literal()) return std::nullopt;
  if (t->datatype && *t->datatype == vocab::kXsdBoolean) {
    return t->value == "true" || t->value == "1";
  }
  if (auto n = numeric_value(*t)) return *n != 0.0;
  if (t->is_string_literal()) return !t->value.empty();
  return std::nullopt;
}

bool same_term(const RDFTerm& a, const RDFTerm& b) {
  if (a.is_literal() && b.is_literal()) {
    auto na = numeric_value(a), nb = numeric_value(b);
    if (na && nb) return *na == *nb;
    if (a.is_string_literal() && b.is_string_literal() && !a.lang && !b.lang) {
      return a.value == b.value;
    }
  }
  return a == b;
}

class Evaluator {
 public:
  Evaluator(const TripleStore& store) : store_(store) {}

  std::vector<Binding> group(const Group& g, std::vector<Binding> input) {
    std::vector<Binding> current = std::move(input);
    std::vector<const Element*> chunk;
    auto flush = [&] {
      if (chunk.empty()) return;
      current = join(chunk, current);
      chunk.clear();
    };
    for (const auto& e : g.elements) {
      if (std::holds_alternative<TriplePattern>(e) ||
          std::holds_alternative<TextConstraint>(e)) {
        chunk.push_back(&e);
        continue;
      }
      flush();
      if (const auto* opt = std::get_if<OptionalElem>(&e)) {
        std::vector<Binding> next;
        for (const auto& b : current) {
          auto ext = group(*opt->group, {b});
          if (ext.empty()) {
            next.push_back(b);
          } else {
            for (auto& x : ext) next.push_back(std::move(x));
          }
        }
        current = std::move(next);
      } else if (const auto* u = std::get_if<UnionElem>(&e)) {
        std::vector<Binding> next;
        for (const auto& branch : u->branches) {
          for (auto& x : group(*branch, current)) next.push_back(std::move(x));
        }
        current = std::move(next);
      }
    }
    flush();
    if (g.filters.empty()) return current;
    std::vector<Binding> kept;
    for (auto& b : current) {
      bool ok = true;
      for (const auto& f : g.filters) {
        if (ebv(eval(*f, b)) != std::optional<bool>(true)) {
          ok = false;
          break;
        }
      }
      if (ok) kept.push_back(std::move(b));
    }
    return kept;
  }

 private:
  std::vector<Binding> join(const std::vector<const Element*>& atoms,
                            const std::vector<Binding>& input) {
    std::vector<Binding> out;
    std::vector<bool> done(atoms.size(), false);
    for (const auto& b : input) {
      Binding work = b;
      solve(atoms, done, atoms.size(), work, out);
    }
    return out;
  }

  // Higher means cheaper to evaluate next.
  double priority(const Element& e, const Binding& b) const {
    if (const auto* tc = std::get_if<TextConstraint>(&e)) {
      return lookup(b, tc->var) ? 10.0 : 0.5;
    }
    const auto& tp = std::get<TriplePattern>(e);
    double bound = 0;
    for (const Slot* s : {&tp.s, &tp.p, &tp.o}) {
      if (!s->is_var || lookup(b, s->var)) bound += 1;
    }
    return bound;
  }

  void solve(const std::vector<const Element*>& atoms, std::vector<bool>& done,
             std::size_t remaining, Binding& b, std::vector<Binding>& out) {
    if (remaining == 0) {
      out.push_back(b);
      return;
    }
    std::size_t best = atoms.size();
    double best_p = -1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (done[i]) continue;
      double p = priority(*atoms[i], b);
      if (p > best_p) {
        best_p = p;
        best = i;
      }
    }
    done[best] = true;
    if (const auto* tc = std::get_if<TextConstraint>(atoms[best])) {
      TextExpr expr(tc->expr);
      if (const RDFTerm* v = lookup(b, tc->var)) {
        if (v->is_literal() && expr.matches(v->value)) solve(atoms, done, remaining - 1, b, out);
      } else {
        for (const RDFTerm* lit : literals()) {
          if (!expr.matches(lit->value)) continue;
          b[tc->var] = *lit;
          solve(atoms, done, remaining - 1, b, out);
          b.erase(tc->var);
        }
      }
    } else {
      const auto& tp = std::get<TriplePattern>(*atoms[best]);
      auto resolve = [&](const Slot& s) -> const RDFTerm* {
        return s.is_var ? lookup(b, s.var) : &s.term;
      };
      const RDFTerm* s = resolve(tp.s);
      const RDFTerm* p = resolve(tp.p);
      const RDFTerm* o = resolve(tp.o);
      // Copies: the binding map may rehash below.
      std::optional<RDFTerm> sc, pc, oc;
      if (s) sc = *s;
      if (p) pc = *p;
      if (o) oc = *o;
      for (const Triple* t : store_.match(sc ? &*sc : nullptr, pc ? &*pc : nullptr,
                                          oc ? &*oc : nullptr)) {
        std::vector<std::string> added;
        bool ok = true;
        auto bind = [&](const Slot& slot, const RDFTerm& value) {
          if (!slot.is_var || !ok) return;
          if (const RDFTerm* cur = lookup(b, slot.var)) {
            if (!(*cur == value)) ok = false;
            return;
          }
          b[slot.var] = value;
          added.push_back(slot.var);
        };
        bind(tp.s, t->subject);
        bind(tp.p, t->predicate);
        bind(tp.o, t->object);
        if (ok) solve(atoms, done, remaining - 1, b, out);
        for (const auto& v : added) b.erase(v);
      }
    }
    done[best] = false;
  }

  const std::vector<const RDFTerm*>& literals() {
    if (!literals_) {
      literals_.emplace();
      std::set<std::string> seen;
      for (const auto& t : store_.triples()) {
        if (t.object.is_literal() && seen.insert(t.object.to_ntriples()).second) {
          literals_->push_back(&t.object);
        }
      }
    }
    return *literals_;
  }

  std::optional<RDFTerm> eval(const Expr& e, const Binding& b) {
    using Op = Expr::Op;
    switch (e.op) {
      case Op::kVar: {
        const RDFTerm* t = lookup(b, e.name);
        if (!t) return std::nullopt;
        return *t;
      }
      case Op::kConst: return e.value;
      case Op::kOr: {
        auto l = ebv(eval(*e.args[0], b));
        auto r = ebv(eval(*e.args[1], b));
        if ((l && *l) || (r && *r)) return boolean(true);
        if (l && r) return boolean(false);
        return std::nullopt;
      }
      case Op::kAnd: {
        auto l = ebv(eval(*e.args[0], b));
        auto r = ebv(eval(*e.args[1], b));
        if ((l && !*l) || (r && !*r)) return boolean(false);
        if (l && r) return boolean(true);
        return std::nullopt;
      }
      case Op::kNot: {
        auto v = ebv(eval(*e.args[0], b));
        if (!v) return std::nullopt;
        return boolean(!*v);
      }
      case Op::kEq:
      case Op::kNe: {
        auto l = eval(*e.args[0], b);
        auto r = eval(*e.args[1], b);
        if (!l || !r) return std::nullopt;
        bool eq = same_term(*l, *r);
        return boolean(e.op == Op::kEq ? eq : !eq);
      }
      case Op::kLt:
      case Op::kGt:
      case Op::kLe:
      case Op::kGe: {
        auto l = eval(*e.args[0], b);
        auto r = eval(*e.args[1], b);
        if (!l || !r || !l->is_literal() || !r->is_literal()) return std::nullopt;
        int cmp;
        auto nl = numeric_value(*l), nr = numeric_value(*r);
        if (nl && nr) {
          cmp = *nl < *nr ? -1 : (*nl > *nr ? 1 : 0);
        } else if (!nl && !nr) {
          cmp = l->value.compare(r->value);
          cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
        } else {
          return std::nullopt;
        }
        switch (e.op) {
          case Op::kLt: return boolean(cmp < 0);
          case Op::kGt: return boolean(cmp > 0);
          case Op::kLe: return boolean(cmp <= 0);
          default: return boolean(cmp >= 0);
        }
      }
      case Op::kCall: return call(e, b);
    }
    return std::nullopt;
  }

  std::optional<RDFTerm> call(const Expr& e, const Binding& b) {
    const std::string& f = e.name;
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (e.args.size() < lo || e.args.size() > hi) {
        throw Error(ErrorCode::kInvalidArgument,
                    "wrong number of arguments to " + f + "()");
      }
    };
    if (f == "bound") {
      arity(1, 1);
      if (e.args[0]->op != Expr::Op::kVar) {
        throw Error(ErrorCode::kInvalidArgument, "bound() expects a variable");
      }
      return boolean(lookup(b, e.args[0]->name) != nullptr);
    }
    std::vector<std::optional<RDFTerm>> args;
    for (const auto& a : e.args) args.push_back(eval(*a, b));
    auto string_arg = [&](std::size_t i) -> const std::string* {
      if (!args[i] || !args[i]->is_literal()) return nullptr;
      return &args[i]->value;
    };
    if (f == "str") {
      arity(1, 1);
      if (!args[0] || args[0]->is_blank()) return std::nullopt;
      return plain(args[0]->value);
    }
    if (f == "lang") {
      arity(1, 1);
      if (!args[0] || !args[0]->is_literal()) return std::nullopt;
      return plain(args[0]->lang.value_or(""));
    }
    if (f == "datatype") {
      arity(1, 1);
      if (!args[0] || !args[0]->is_literal()) return std::nullopt;
      if (args[0]->lang) return RDFTerm::iri(std::string(vocab::kRdfLangString));
      return RDFTerm::iri(args[0]->datatype.value_or(std::string(vocab::kXsdString)));
    }
    if (f == "isiri" || f == "isuri") {
      arity(1, 1);
      if (!args[0]) return std::nullopt;
      return boolean(args[0]->is_iri());
    }
    if (f == "isliteral") {
      arity(1, 1);
      if (!args[0]) return std::nullopt;
      return boolean(args[0]->is_literal());
    }
    if (f == "isblank") {
      arity(1, 1);
      if (!args[0]) return std::nullopt;
      return boolean(args[0]->is_blank());
    }
    if (f == "lcase" || f == "ucase") {
      arity(1, 1);
      const std::string* s = string_arg(0);
      if (!s) return std::nullopt;
      std::string v = *s;
      for (char& c : v) {
        if (f == "lcase" && text::is_ascii_upper(c)) c = static_cast<char>(c + 32);
        if (f == "ucase" && text::is_ascii_lower(c)) c = static_cast<char>(c - 32);
      }
      return plain(std::move(v));
    }
    if (f == "contains" || f == "strstarts" || f == "strends") {
      arity(2, 2);
      const std::string* s = string_arg(0);
      const std::string* n = string_arg(1);
      if (!s || !n) return std::nullopt;
      if (f == "contains") return boolean(s->find(*n) != std::string::npos);
      if (f == "strstarts") return boolean(s->starts_with(*n));
      return boolean(s->ends_with(*n));
    }
    if (f == "langmatches") {
      arity(2, 2);
      const std::string* tag = string_arg(0);
      const std::string* range = string_arg(1);
      if (!tag || !range) return std::nullopt;
      if (*range == "*") return boolean(!tag->empty());
      std::string t = text::to_lower(*tag), r = text::to_lower(*range);
      return boolean(t == r || t.starts_with(r + "-"));
    }
    if (f == "regex") {
      arity(2, 3);
      const std::string* s = string_arg(0);
      const std::string* pattern = string_arg(1);
      if (!s || !pattern) return std::nullopt;
      auto flags = std::regex::ECMAScript;
      if (args.size() == 3) {
        const std::string* fl = string_arg(2);
        if (fl && fl->find('i') != std::string::npos) flags |= std::regex::icase;
      }
      return boolean(std::regex_search(*s, compiled(*pattern, flags)));
    }
    throw Error(ErrorCode::kInvalidArgument, "unsupported function " + f + "()");
  }

  const std::regex& compiled(const std::string& pattern, std::regex::flag_type flags) {
    auto key = std::make_pair(pattern, static_cast<int>(flags));
    auto it = regex_cache_.find(key);
    if (it != regex_cache_.end()) return it->second;
    try {
      return regex_cache_.emplace(key, std::regex(pattern, flags)).first->second;
    } catch (const std::regex_error& err) {
      throw Error(ErrorCode::kInvalidArgument,
                  "invalid regular expression '" + pattern + "': " + err.what());
    }
  }

  const TripleStore& store_;
  std::optional<std::vector<const RDFTerm*>> literals_;
  std::map<std::pair<std::string, int>, std::regex> regex_cache_;
};

}  // namespace

bool text_search_matches(std::string_view expression, std::string_view literal) {
  return TextExpr(expression).matches(literal);
}

QueryResult run_query(const TripleStore& store, std::string_view query,
                      const FixtureOptions& options) {
  Query q = Parser(query, options).parse();
  Evaluator ev(store);
  std::vector<Binding> solutions = ev.group(q.where, {Binding{}});

  QueryResult result;
  if (q.ask) {
    result.is_ask = true;
    result.ask_value = !solutions.empty();
    return result;
  }

  if (!q.order.empty()) {
    std::stable_sort(solutions.begin(), solutions.end(),
                     [&](const Binding& a, const Binding& b) {
                       for (const auto& key : q.order) {
                         const RDFTerm* x = lookup(a, key.var);
                         const RDFTerm* y = lookup(b, key.var);
                         if (!x && !y) continue;
                         if (!x || !y) return key.descending ? x != nullptr : x == nullptr;
                         auto nx = numeric_value(*x), ny = numeric_value(*y);
                         int cmp;
                         if (nx && ny) {
                           cmp = *nx < *ny ? -1 : (*nx > *ny ? 1 : 0);
                         } else {
                           auto c = x->value <=> y->value;
                           cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
                         }
                         if (cmp != 0) return key.descending ? cmp > 0 : cmp < 0;
                       }
                       return false;
                     });
  }

  result.table.variables = q.star ? q.mentioned : q.projection;
  std::set<std::vector<std::string>> seen;
  std::size_t skipped = 0;
  for (const auto& s : solutions) {
    std::map<std::string, RDFTerm> row;
    std::vector<std::string> key;
    for (const auto& v : result.table.variables) {
      const RDFTerm* t = lookup(s, v);
      if (t) row.emplace(v, *t);
      key.push_back(t ? t->to_ntriples() : std::string());
    }
    if (q.distinct && !seen.insert(std::move(key)).second) continue;
    if (skipped < q.offset) {
      ++skipped;
      continue;
    }
    if (q.limit && result.table.rows.size() >= *q.limit) break;
    result.table.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace kgqa
