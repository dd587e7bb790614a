#pragma once

#include "dyncenter/decision_engine.hpp"
#include "dyncenter/io_core.hpp"
#include "dyncenter/linkage.hpp"
#include "dyncenter/merger_screen.hpp"
#include "dyncenter/structure.hpp"
#include "dyncenter/tech_assessment.hpp"

#include <json.hpp>

#include <vector>

// JSON wire formats. Readers throw ValidationError with one entry per bad
// field (dotted paths such as "technology_profile.beta[2]"). Doubles are
// written at full precision; NaN and missing values become null.
namespace dyncenter::json {

using nlohmann::json;

json to_json(const tech::TechnologyProfile& p);
tech::TechnologyProfile profile_from_json(const json& j);

json to_json(const merger::MergerScenario& s);
merger::MergerScenario scenario_from_json(const json& j);
json to_json(const merger::HhiVerdict& v);
/// Just the "shares" array of a scenario-shaped object, for HHI without a merger.
std::vector<double> market_shares_from_json(const json& j);

json to_json(const decision::ProductionPlan& p);
decision::ProductionPlan plan_from_json(const json& j);
json to_json(const decision::Evaluation& e);
decision::Evaluation evaluation_from_json(const json& j);

json to_json(const io::IoTable& t);
io::IoTable table_from_json(const json& j);

json to_json(const linkage::LinkageReport& r);
json to_json(const structure::StructureReport& r);
json to_json(const std::vector<decision::ImportCandidate>& candidates);

/// Output of the tcc tool: TCC, TCA and the four component elasticities.
json tcc_summary(const tech::TechnologyProfile& p);

}  // namespace dyncenter::json
