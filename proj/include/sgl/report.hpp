#pragma once

#include <string>

#include "json.hpp"
#include "sgl/bounds.hpp"
#include "sgl/config.hpp"
#include "sgl/mc.hpp"
#include "sgl/verify.hpp"

namespace sgl {

// {"value": <double or null when it overflows double>, "log10": <double or
// null for nonpositive>}; log10 survives values far beyond double range.
nlohmann::json big_json(const BigFloat& v);

nlohmann::json vec_json(const Vec& v);

// Full resolved configuration, embedded in every report for auditability.
nlohmann::json config_json(const Config& c);

nlohmann::json mc_json(const McEstimate& e);

// {"terms": {name: big, ...}, "total": big}.
nlohmann::json bound_report_json(const BoundReport& r);

nlohmann::json lemma_check_json(const LemmaCheck& c);

nlohmann::json table1_budget_json(const Table1Budget& b);

nlohmann::json table2_budget_json(const Table2Budget& b);

// dump(2) plus a trailing newline, written atomically enough for tests to
// byte-compare reruns.
void write_json(const nlohmann::json& j, const std::string& path);

}  // namespace sgl
