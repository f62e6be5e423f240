#pragma once

#include <string_view>

#include "kgqa/ntriples.h"
#include "kgqa/rdf.h"

namespace kgqa {

// Text-search extensions recognised by the fixture engine. Disabling one makes
// queries using it fail the way a real endpoint without that extension would.
struct FixtureOptions {
  bool bif_contains = true;
  bool stardog_text_match = true;
};

struct QueryResult {
  bool is_ask = false;
  bool ask_value = false;
  BindingsTable table;
};

// Evaluates a SPARQL query over an in-memory store. Supported: PREFIX/BASE,
// SELECT [DISTINCT] vars|*, ASK, triple blocks with ';' ',' 'a' and [] terms,
// OPTIONAL, UNION, FILTER (logical and comparison operators, regex, str, lang,
// langMatches, datatype, bound, isIRI, isLiteral, isBlank, contains, lcase,
// ucase, strstarts), ORDER BY, LIMIT, OFFSET, Virtuoso `bif:contains` and the
// Stardog textMatch service. Text search is a case-insensitive substring test
// driven by an AND/OR expression over quoted phrases or bare words.
//
// Throws Error(kInvalidArgument) on syntax errors and on disabled extensions.
QueryResult run_query(const TripleStore& store, std::string_view query,
                      const FixtureOptions& options = {});

// Evaluates a full-text expression such as ("Danish" OR "Straits") against a
// literal. Throws Error(kInvalidArgument) when the expression is malformed.
bool text_search_matches(std::string_view expression, std::string_view literal);

}  // namespace kgqa
