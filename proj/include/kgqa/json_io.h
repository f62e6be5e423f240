#pragma once

// Canonical JSON forms shared by the service, the CLI and the Python module.
// Field names follow the C++ types in lower_snake_case.

#include "json.hpp"
#include "kgqa/execution.h"
#include "kgqa/graph_model.h"
#include "kgqa/planner.h"
#include "kgqa/rdf.h"

namespace kgqa::json_io {

using Json = nlohmann::json;

Json to_json(const PhraseTerm& term);
Json to_json(const PhraseTriplePattern& pattern);
Json to_json(const AnswerTypePrediction& prediction);
Json to_json(const RelevantVertex& vertex);
Json to_json(const RelevantPredicate& predicate);
Json to_json(const PGP& pgp);
Json to_json(const BGPTerm& term);
Json to_json(const BGP& bgp);
Json to_json(const QueryPlan& plan);
Json to_json(const RDFTerm& term);
Json to_json(const BindingsTable& table);
Json to_json(const RawAnswer& answer);
Json to_json(const DroppedAnswer& dropped);
Json to_json(const Prf& prf);

// Inverses. Throw Error(kInvalidArgument) on shape violations.
PhraseTerm term_from_json(const Json& j);
PhraseTriplePattern pattern_from_json(const Json& j);
AnswerTypePrediction prediction_from_json(const Json& j);
PGP pgp_from_json(const Json& j);
BGP bgp_from_json(const Json& j);
RDFTerm rdf_term_from_json(const Json& j);

}  // namespace kgqa::json_io
