#include "kgqa/rdf.h"

#include <cstdio>

namespace kgqa {

RDFTerm RDFTerm::iri(std::string value) {
  return RDFTerm{TermKind::kIri, std::move(value), std::nullopt, std::nullopt};
}

RDFTerm RDFTerm::literal(std::string value, std::optional<std::string> datatype,
                         std::optional<std::string> lang) {
  if (lang) datatype.reset();
  return RDFTerm{TermKind::kLiteral, std::move(value), std::move(datatype),
                 std::move(lang)};
}

RDFTerm RDFTerm::blank(std::string id) {
  return RDFTerm{TermKind::kBlankNode, std::move(id), std::nullopt, std::nullopt};
}

bool RDFTerm::is_string_literal() const {
  if (kind != TermKind::kLiteral) return false;
  if (lang || !datatype) return true;
  return *datatype == vocab::kXsdString || *datatype == vocab::kRdfLangString;
}

std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string RDFTerm::to_ntriples() const {
  switch (kind) {
    case TermKind::kIri: return "<" + value + ">";
    case TermKind::kBlankNode: return "_:" + value;
    case TermKind::kLiteral: {
      std::string out = "\"" + escape_literal(value) + "\"";
      if (lang) {
        out += "@" + *lang;
      } else if (datatype) {
        out += "^^<" + *datatype + ">";
      }
      return out;
    }
  }
  return value;
}

const RDFTerm* BindingsTable::get(std::size_t row, std::string_view variable) const {
  if (row >= rows.size()) return nullptr;
  auto it = rows[row].find(std::string(variable));
  return it == rows[row].end() ? nullptr : &it->second;
}

}  // namespace kgqa
