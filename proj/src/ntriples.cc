#include "kgqa/ntriples.h"

#include <fstream>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : s_(line), line_no_(line_no) {}

  // Empty when the line holds only whitespace or a comment.
  std::optional<Triple> parse() {
    skip_ws();
    if (done() || peek() == '#') return std::nullopt;
    Triple t;
    t.subject = subject();
    skip_ws();
    t.predicate = iri();
    skip_ws();
    t.object = object();
    skip_ws();
    expect('.');
    skip_ws();
    if (!done() && peek() != '#') fail("trailing content after '.'");
    return t;
  }

 private:
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw LineError(ErrorCode::kMalformedData, line_no_,
                    what + " (column " + std::to_string(pos_ + 1) + ")");
  }

  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void expect(char c) {
    if (done() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char32_t hex(int digits) {
    if (pos_ + digits > s_.size()) fail("truncated unicode escape");
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char c = s_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= c - '0';
      else if (c >= 'a' && c <= 'f') cp |= c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') cp |= c - 'A' + 10;
      else fail("bad hex digit in unicode escape");
    }
    return cp;
  }

  void unicode_escape(std::string& out) {
    char kind = s_[pos_++];
    text::append_utf8(out, hex(kind == 'u' ? 4 : 8));
  }

  RDFTerm subject() {
    if (done()) fail("missing subject");
    if (peek() == '_') return blank();
    return iri();
  }

  RDFTerm object() {
    if (done()) fail("missing object");
    if (peek() == '_') return blank();
    if (peek() == '"') return literal();
    return iri();
  }

  std::string iri_text() {
    expect('<');
    std::string out;
    while (true) {
      if (done()) fail("unterminated IRI");
      char c = s_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        if (done() || (peek() != 'u' && peek() != 'U')) fail("bad escape in IRI");
        unicode_escape(out);
        continue;
      }
      if (c == ' ' || c == '<' || c == '"') fail("illegal character in IRI");
      out.push_back(c);
    }
    if (out.empty()) fail("empty IRI");
    return out;
  }

  RDFTerm iri() { return RDFTerm::iri(iri_text()); }

  RDFTerm blank() {
    expect('_');
    expect(':');
    std::size_t start = pos_;
    while (!done() && (text::is_ascii_alpha(peek()) || text::is_ascii_digit(peek()) ||
                       peek() == '_' || peek() == '-' || peek() == '.')) {
      ++pos_;
    }
    // A blank label never ends with '.'; that dot terminates the statement.
    while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    return RDFTerm::blank(std::string(s_.substr(start, pos_ - start)));
  }

  RDFTerm literal() {
    expect('"');
    std::string value;
    while (true) {
      if (done()) fail("unterminated literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        value.push_back(c);
        continue;
      }
      if (done()) fail("dangling escape");
      char e = peek();
      switch (e) {
        case 't': value.push_back('\t'); ++pos_; break;
        case 'b': value.push_back('\b'); ++pos_; break;
        case 'n': value.push_back('\n'); ++pos_; break;
        case 'r': value.push_back('\r'); ++pos_; break;
        case 'f': value.push_back('\f'); ++pos_; break;
        case '"': value.push_back('"'); ++pos_; break;
        case '\'': value.push_back('\''); ++pos_; break;
        case '\\': value.push_back('\\'); ++pos_; break;
        case 'u':
        case 'U': unicode_escape(value); break;
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
    if (!done() && peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!done() && (text::is_ascii_alpha(peek()) || text::is_ascii_digit(peek()) ||
                         peek() == '-')) {
        ++pos_;
      }
      if (pos_ == start) fail("empty language tag");
      return RDFTerm::literal(std::move(value), std::nullopt,
                              text::to_lower(s_.substr(start, pos_ - start)));
    }
    if (pos_ + 1 < s_.size() && peek() == '^' && s_[pos_ + 1] == '^') {
      pos_ += 2;
      return RDFTerm::literal(std::move(value), iri_text());
    }
    return RDFTerm::literal(std::move(value));
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Triple> parse_ntriples(std::istream& in) {
  std::vector<Triple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto t = LineParser(line, line_no).parse()) out.push_back(std::move(*t));
  }
  return out;
}

std::vector<Triple> parse_ntriples(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in);
}

std::vector<Triple> load_ntriples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kConfigError, "cannot open N-Triples file " + path.string());
  }
  try {
    return parse_ntriples(in);
  } catch (const LineError& e) {
    throw LineError(ErrorCode::kMalformedData, e.line(),
                    path.string() + ": " + e.what());
  }
}

std::string to_ntriples(const Triple& t) {
  return t.subject.to_ntriples() + " " + t.predicate.to_ntriples() + " " +
         t.object.to_ntriples() + " .";
}

TripleStore::TripleStore(std::vector<Triple> triples) : triples_(std::move(triples)) {}

TripleStore TripleStore::load(const std::vector<std::filesystem::path>& paths) {
  TripleStore store;
  for (const auto& p : paths) {
    for (auto& t : load_ntriples(p)) store.add(std::move(t));
  }
  return store;
}

void TripleStore::add(Triple t) { triples_.push_back(std::move(t)); }

std::vector<const Triple*> TripleStore::match(const RDFTerm* s, const RDFTerm* p,
                                              const RDFTerm* o) const {
  std::vector<const Triple*> out;
  for (const auto& t : triples_) {
    if (s && !(t.subject == *s)) continue;
    if (p && !(t.predicate == *p)) continue;
    if (o && !(t.object == *o)) continue;
    out.push_back(&t);
  }
  return out;
}

}  // namespace kgqa
