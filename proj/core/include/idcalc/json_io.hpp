#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "idcalc/coloring.hpp"
#include "idcalc/forcing.hpp"
#include "idcalc/ground.hpp"
#include "idcalc/identity.hpp"

namespace idcalc::io {

using nlohmann::json;

/// Bumped on any change to the formats below.
inline constexpr const char* kSchemaVersion = "1.0.0";

// Readers throw InputError on malformed or inconsistent documents.

json leaf_to_json(const TreeDomain& d, int leaf);
int leaf_from_json(const TreeDomain& d, const json& j);

json to_json(const Identity& s);
Identity identity_from_json(const json& j);

json to_json(const PairColoring& p);
PairColoring coloring_from_json(const json& j);

json to_json(const Gamma& gamma);
Gamma gamma_from_json(const json& j);

json to_json(const ArrowResult& r);
json to_json(const ValidationReport& r);
json to_json(const NicenessReport& r);

json to_json(const CaseWitness& w);
CaseWitness witness_from_json(int case_index, const json& j);
json to_json(const Derivation& d);
Derivation derivation_from_json(const json& j);
json to_json(const CaseReport& r);

json to_json(const GenerationBounds& b);
GenerationBounds bounds_from_json(const json& j);

json to_json(const GradedGround& g);
json to_json(const TrivialGround& g);
/// Either {"kind":"trivial","N":n} or a graded ground with its tables.
std::unique_ptr<GroundModel> ground_from_json(const json& j);

json to_json(const GroundReport& r);
json to_json(const SuitabilityWitness& w);
SuitabilityWitness suitability_witness_from_json(const json& j);

/// Parses text; syntax errors become InputError.
json parse(const std::string& text);
/// Reads and parses a file; an unreadable file is an InputError.
json read_file(const std::string& path);
/// Compact canonical rendering followed by a newline.
std::string dump(const json& j);

}  // namespace idcalc::io
