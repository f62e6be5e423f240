#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/rdf.h"

namespace kgqa {

struct Triple {
  RDFTerm subject;
  RDFTerm predicate;
  RDFTerm object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// Parses N-Triples. Throws LineError(kMalformedData) naming the offending line.
std::vector<Triple> parse_ntriples(std::istream& in);
std::vector<Triple> parse_ntriples(std::string_view text);
std::vector<Triple> load_ntriples(const std::filesystem::path& path);

std::string to_ntriples(const Triple& t);

// Append-only list of triples in load order. Matching preserves that order, so
// query results over a store are deterministic.
class TripleStore {
 public:
  TripleStore() = default;
  explicit TripleStore(std::vector<Triple> triples);

  static TripleStore load(const std::vector<std::filesystem::path>& paths);

  void add(Triple t);
  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }

  // Triples agreeing with every given position.
  std::vector<const Triple*> match(const RDFTerm* s, const RDFTerm* p,
                                   const RDFTerm* o) const;

 private:
  std::vector<Triple> triples_;
};

}  // namespace kgqa
