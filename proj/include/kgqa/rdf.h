#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

namespace vocab {
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
inline constexpr std::string_view kRdfsLabel =
    "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kXsdString =
    "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdBoolean =
    "http://www.w3.org/2001/XMLSchema#boolean";
}  // namespace vocab

enum class TermKind { kIri, kLiteral, kBlankNode };

struct RDFTerm {
  TermKind kind = TermKind::kIri;
  std::string value;
  std::optional<std::string> datatype;
  std::optional<std::string> lang;

  static RDFTerm iri(std::string value);
  static RDFTerm literal(std::string value,
                         std::optional<std::string> datatype = std::nullopt,
                         std::optional<std::string> lang = std::nullopt);
  static RDFTerm blank(std::string id);

  bool is_iri() const { return kind == TermKind::kIri; }
  bool is_literal() const { return kind == TermKind::kLiteral; }
  bool is_blank() const { return kind == TermKind::kBlankNode; }
  // Plain, xsd:string or language-tagged literal.
  bool is_string_literal() const;

  // N-Triples rendering, also used as a stable ordering key.
  std::string to_ntriples() const;

  friend bool operator==(const RDFTerm&, const RDFTerm&) = default;
  friend auto operator<=>(const RDFTerm& a, const RDFTerm& b) {
    return a.to_ntriples() <=> b.to_ntriples();
  }
};

struct BindingsTable {
  std::vector<std::string> variables;
  std::vector<std::map<std::string, RDFTerm>> rows;

  // Null when the row leaves the variable unbound.
  const RDFTerm* get(std::size_t row, std::string_view variable) const;
};

// Escapes a string for use inside a double-quoted N-Triples/SPARQL literal.
std::string escape_literal(std::string_view s);

}  // namespace kgqa
