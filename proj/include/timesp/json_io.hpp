#pragma once

#include <json.hpp>

#include <string>

#include "timesp/measures1d.hpp"
#include "timesp/sequences.hpp"
#include "timesp/toral.hpp"

namespace timesp::json_io {

using json = nlohmann::json;

// Canonical certificate form: keys sorted (nlohmann's default object is
// ordered by key), every integer a decimal string, rationals "num/den".
// Identical inputs always serialize to identical bytes.

json to_json(const sequences::SequenceSpec& spec);
sequences::SequenceSpec sequence_from_json(const json& j);

json to_json(const sequences::HCertificate& cert);
sequences::HCertificate hcert_from_json(const json& j);

json to_json(const toral::ToralCertificate& cert);
toral::ToralCertificate toral_from_json(const json& j);

json to_json(const measures1d::MeasureExpr& expr);
measures1d::MeasureExprPtr measure_from_json(const json& j);

std::string canonical_dump(const json& j);

exactint::Int int_from_string(const std::string& s);
mpq_class rat_from_string(const std::string& s);

} // namespace timesp::json_io
