#pragma once

#include "dyncenter/io_core.hpp"
#include "dyncenter/linkage.hpp"
#include "dyncenter/merger_screen.hpp"
#include "dyncenter/tech_assessment.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dyncenter::decision {

inline constexpr int kSchemaVersion = 1;

/// The claimed kind of new combination; fixes the evaluation group 1..4.
enum class Novelty { NewGood = 1, NewMethod = 2, NewMarket = 3, NewOrganization = 4 };

enum class MarketCase { GovernmentProcurement, DomesticGrowthPrediction, GlobalGrowthPrediction };

enum class Instrument {
    CreditCreationWithProductiveMeansCollateral,
    CreditAtMinimumInterest,
    TariffByContractTimeLimited,
    GovernmentProcurementContract,
    ExportSubsidyOrGuaranteeFund,
    BilateralTradeAgreementFacilitation,
    DirectSubsidy,
    TaxRelief,
    Reject,
};

enum class GateOutcome { Pass, Fail, NotApplicable };

std::string_view to_string(Novelty n);
std::string_view to_string(MarketCase m);
std::string_view to_string(Instrument i);
std::string_view to_string(GateOutcome g);
Novelty parse_novelty(std::string_view text);
MarketCase parse_market_case(std::string_view text);
Instrument parse_instrument(std::string_view text);
GateOutcome parse_gate_outcome(std::string_view text);

/// Every protective tariff is bound to a contract and a time limit.
struct TariffTerms {
    std::string contract_reference;
    int time_limit_months = 0;
    bool world_price_convergence_clause = true;
};

struct ProductionPlan {
    std::string id;
    std::string title;
    /// Applicant identity. Stored and echoed, never read by any rule.
    nlohmann::json applicant_metadata = nlohmann::json::object();
    Novelty claimed_novelty = Novelty::NewGood;
    /// New source of supply; accepted only under NewGood or NewMethod.
    bool claims_new_supply_source = false;
    std::optional<tech::TechnologyProfile> technology_profile;
    std::optional<tech::TechClass> tech_class;
    /// TCC of the incumbent method, for the TCA delta.
    std::optional<double> baseline_tcc;
    bool foreign_investment = false;
    std::optional<MarketCase> market_case;
    std::optional<merger::MergerScenario> merger;
    std::optional<TariffTerms> tariff_terms;
    bool claimed_objectives_verified = false;
    bool feasibility_confirmed = false;
    bool demand_probable_at_mass_production = false;
    bool price_reduction_expected = false;
    bool is_established_industry = false;
    bool involves_modernization_or_restructuring = false;

    /// Class declared on the plan, else the one carried by the profile.
    std::optional<tech::TechClass> effective_tech_class() const;
};

struct GateResult {
    std::string gate;
    GateOutcome outcome = GateOutcome::NotApplicable;
    std::string evidence;
};

struct AuditEntry {
    std::string rule;
    std::string basis;   // the policy rule being applied
    std::string detail;  // what this plan triggered
};

struct InstrumentGrant {
    Instrument instrument = Instrument::Reject;
    std::vector<std::string> justified_by;  // gate names
    std::optional<TariffTerms> terms;
};

struct TechnologyEvidence {
    double tcc = 0.0;
    double tca = 0.0;
    std::optional<double> baseline_tca;
    std::optional<double> tca_delta;
    tech::TechClass tech_class = tech::TechClass::Base;
};

struct Evaluation {
    std::string id;
    std::string plan_id;
    std::optional<std::string> supersedes;
    std::string timestamp;
    int schema_version = kSchemaVersion;
    int group = 1;
    std::vector<GateResult> gates;
    std::vector<InstrumentGrant> instruments;
    std::vector<AuditEntry> audit;
    std::optional<TechnologyEvidence> technology;
    std::optional<merger::HhiVerdict> merger_verdict;

    bool rejected() const;
    bool has_instrument(Instrument i) const;
    const GateResult* find_gate(std::string_view name) const;
};

/// Identity and provenance stamped onto an evaluation.
struct EvaluationContext {
    std::string evaluation_id;
    std::string timestamp;
    std::optional<std::string> supersedes;
};

namespace gates {
inline constexpr std::string_view kFeasibility = "technology_assessment.feasibility";
inline constexpr std::string_view kMassDemand = "economic_core.probable_mass_demand";
inline constexpr std::string_view kTechnologyContent = "technology_assessment.technology_content";
inline constexpr std::string_view kForeignInvestment = "economic_core.foreign_investment_technology";
inline constexpr std::string_view kAdvancedClass = "economic_core.advanced_technology_class";
inline constexpr std::string_view kPriceReduction = "economic_core.final_price_reduction";
inline constexpr std::string_view kMarketCase = "economic_core.market_case";
inline constexpr std::string_view kObjectivesVerified = "technology_assessment.merger_objectives";
inline constexpr std::string_view kConcentration = "economic_core.market_concentration";
inline constexpr std::string_view kEstablishedIndustry = "guardrail.established_industry";
}  // namespace gates

/// Structural check: the fields the claimed group needs are present.
void validate_plan(const ProductionPlan& p);

/// Group 1..4 from the claimed novelty. Validates the plan first.
int classify_plan(const ProductionPlan& p);

/// New good: credit against productive means iff feasibility and probable
/// mass demand are both attested.
Evaluation evaluate_group1(const ProductionPlan& p);

/// New method: pacing/emerging supported unconditionally, base/key only with
/// an expected final-price reduction, foreign investment only with
/// pacing/emerging. TCA delta is reported, never gated on.
Evaluation evaluate_group2(const ProductionPlan& p);

/// New market: instruments follow the market case.
Evaluation evaluate_group3(const ProductionPlan& p);

/// Merger: subsidies and tax relief iff objectives are verified and the
/// HHI screen does not presume enhanced market power.
Evaluation evaluate_group4(const ProductionPlan& p);

/// Established industries without modernization or restructuring are rejected.
Evaluation apply_guardrails(const ProductionPlan& p, Evaluation e);

/// classify -> group evaluation -> guardrails, then stamps the context.
Evaluation evaluate_plan(const ProductionPlan& p, const EvaluationContext& ctx = {});

struct ImportCandidate {
    std::size_t sector = 0;
    std::string label;
    double import_share = 0.0;
    double u_backward = 0.0;
    double score = 0.0;
    double gi = 0.0;
};

/// Default, non-normative scoring: import_share_i * U_backward_i. Sectors with
/// zero score are dropped; the rest are sorted by descending score (ties by
/// sector order).
std::vector<ImportCandidate> import_substitution_candidates(const io::IoTable& table,
                                                            const std::vector<double>& import_share,
                                                            const linkage::LinkageReport& linkage,
                                                            const std::vector<double>& gi);

}  // namespace dyncenter::decision
