#include "dyncenter/decision_engine.hpp"

#include "dyncenter/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <array>
#include <numeric>

namespace dyncenter::decision {

namespace {

constexpr std::array<std::pair<Instrument, std::string_view>, 9> kInstrumentNames{{
    {Instrument::CreditCreationWithProductiveMeansCollateral,
     "CreditCreationWithProductiveMeansCollateral"},
    {Instrument::CreditAtMinimumInterest, "CreditAtMinimumInterest"},
    {Instrument::TariffByContractTimeLimited, "TariffByContractTimeLimited"},
    {Instrument::GovernmentProcurementContract, "GovernmentProcurementContract"},
    {Instrument::ExportSubsidyOrGuaranteeFund, "ExportSubsidyOrGuaranteeFund"},
    {Instrument::BilateralTradeAgreementFacilitation, "BilateralTradeAgreementFacilitation"},
    {Instrument::DirectSubsidy, "DirectSubsidy"},
    {Instrument::TaxRelief, "TaxRelief"},
    {Instrument::Reject, "Reject"},
}};

std::string pass_fail(bool ok) { return ok ? "attested" : "not attested"; }

void add_gate(Evaluation& e, std::string_view gate, GateOutcome outcome, std::string evidence) {
    e.gates.push_back({std::string(gate), outcome, std::move(evidence)});
}

void add_audit(Evaluation& e, std::string rule, std::string basis, std::string detail) {
    e.audit.push_back({std::move(rule), std::move(basis), std::move(detail)});
}

void grant(Evaluation& e, Instrument i, std::vector<std::string> justified_by,
           std::optional<TariffTerms> terms = std::nullopt) {
    e.instruments.push_back({i, std::move(justified_by), std::move(terms)});
}

// Replaces every instrument with Reject; gates cited by an earlier Reject are kept.
void reject(Evaluation& e, const std::vector<std::string>& failed_gates, std::string detail) {
    std::vector<std::string> cited;
    for (const auto& g : e.instruments) {
        if (g.instrument == Instrument::Reject) cited = g.justified_by;
    }
    cited.insert(cited.end(), failed_gates.begin(), failed_gates.end());
    e.instruments.clear();
    add_audit(e, "reject", "a failed gate withholds every supportive instrument", std::move(detail));
    grant(e, Instrument::Reject, std::move(cited));
}

Evaluation start(const ProductionPlan& p, int group) {
    Evaluation e;
    e.plan_id = p.id;
    e.group = group;
    return e;
}

void require_group(const ProductionPlan& p, Novelty expected) {
    if (p.claimed_novelty != expected) {
        throw ValidationError("claimed_novelty",
                              fmt::format("plan claims {}, evaluator expects {}",
                                          to_string(p.claimed_novelty), to_string(expected)));
    }
}

}  // namespace

std::string_view to_string(Novelty n) {
    switch (n) {
        case Novelty::NewGood: return "NewGood";
        case Novelty::NewMethod: return "NewMethod";
        case Novelty::NewMarket: return "NewMarket";
        case Novelty::NewOrganization: return "NewOrganization";
    }
    return "NewGood";
}

std::string_view to_string(MarketCase m) {
    switch (m) {
        case MarketCase::GovernmentProcurement: return "GovernmentProcurement";
        case MarketCase::DomesticGrowthPrediction: return "DomesticGrowthPrediction";
        case MarketCase::GlobalGrowthPrediction: return "GlobalGrowthPrediction";
    }
    return "GovernmentProcurement";
}

std::string_view to_string(Instrument i) {
    for (const auto& [inst, name] : kInstrumentNames) {
        if (inst == i) return name;
    }
    return "Reject";
}

std::string_view to_string(GateOutcome g) {
    switch (g) {
        case GateOutcome::Pass: return "pass";
        case GateOutcome::Fail: return "fail";
        case GateOutcome::NotApplicable: return "not-applicable";
    }
    return "not-applicable";
}

Novelty parse_novelty(std::string_view text) {
    for (auto n : {Novelty::NewGood, Novelty::NewMethod, Novelty::NewMarket,
                   Novelty::NewOrganization}) {
        if (text == to_string(n)) return n;
    }
    throw ValidationError("claimed_novelty",
                          fmt::format("unknown novelty '{}' (NewGood, NewMethod, NewMarket, "
                                      "NewOrganization)",
                                      text));
}

MarketCase parse_market_case(std::string_view text) {
    for (auto m : {MarketCase::GovernmentProcurement, MarketCase::DomesticGrowthPrediction,
                   MarketCase::GlobalGrowthPrediction}) {
        if (text == to_string(m)) return m;
    }
    throw ValidationError("market_case", fmt::format("unknown market case '{}'", text));
}

Instrument parse_instrument(std::string_view text) {
    for (const auto& [inst, name] : kInstrumentNames) {
        if (name == text) return inst;
    }
    throw ValidationError("instrument", fmt::format("unknown instrument '{}'", text));
}

GateOutcome parse_gate_outcome(std::string_view text) {
    for (auto g : {GateOutcome::Pass, GateOutcome::Fail, GateOutcome::NotApplicable}) {
        if (text == to_string(g)) return g;
    }
    throw ValidationError("outcome", fmt::format("unknown gate outcome '{}'", text));
}

std::optional<tech::TechClass> ProductionPlan::effective_tech_class() const {
    if (tech_class) return tech_class;
    if (technology_profile) return technology_profile->tech_class;
    return std::nullopt;
}

bool Evaluation::rejected() const { return has_instrument(Instrument::Reject); }

bool Evaluation::has_instrument(Instrument i) const {
    return std::any_of(instruments.begin(), instruments.end(),
                       [i](const InstrumentGrant& g) { return g.instrument == i; });
}

const GateResult* Evaluation::find_gate(std::string_view name) const {
    const auto it = std::find_if(gates.begin(), gates.end(),
                                 [name](const GateResult& g) { return g.gate == name; });
    return it == gates.end() ? nullptr : &*it;
}

void validate_plan(const ProductionPlan& p) {
    ErrorCollector errors;
    if (p.id.empty()) errors.add("id", "plan id is required");
    if (p.claims_new_supply_source && p.claimed_novelty != Novelty::NewGood &&
        p.claimed_novelty != Novelty::NewMethod) {
        errors.add("claims_new_supply_source",
                   "a new source of supply is evaluated under NewGood or NewMethod only");
    }
    switch (p.claimed_novelty) {
        case Novelty::NewGood: break;
        case Novelty::NewMethod:
            if (!p.technology_profile) {
                errors.add("technology_profile", "required for a NewMethod plan");
            }
            if (!p.effective_tech_class()) errors.add("tech_class", "required for a NewMethod plan");
            break;
        case Novelty::NewMarket:
            if (!p.market_case) {
                errors.add("market_case", "required for a NewMarket plan");
            } else if (*p.market_case != MarketCase::GlobalGrowthPrediction && !p.tariff_terms) {
                errors.add("tariff_terms",
                           "a tariff instrument needs a contract reference and time limit");
            }
            break;
        case Novelty::NewOrganization:
            if (!p.merger) errors.add("merger", "required for a NewOrganization plan");
            break;
    }
    if (p.tariff_terms) {
        if (p.tariff_terms->contract_reference.empty()) {
            errors.add("tariff_terms.contract_reference", "must not be empty");
        }
        if (p.tariff_terms->time_limit_months <= 0) {
            errors.add("tariff_terms.time_limit_months", "must be a positive number of months");
        }
    }
    if (p.baseline_tcc && !(*p.baseline_tcc >= 0.0 && *p.baseline_tcc <= tech::kMaxScore)) {
        errors.add("baseline_tcc", fmt::format("must lie in [0, 9], got {}", *p.baseline_tcc));
    }
    errors.throw_if_any();
    if (p.technology_profile) tech::validate(*p.technology_profile);
    if (p.merger) merger::validate(*p.merger);
}

int classify_plan(const ProductionPlan& p) {
    validate_plan(p);
    return static_cast<int>(p.claimed_novelty);
}

Evaluation evaluate_group1(const ProductionPlan& p) {
    require_group(p, Novelty::NewGood);
    Evaluation e = start(p, 1);
    add_gate(e, gates::kFeasibility, p.feasibility_confirmed ? GateOutcome::Pass : GateOutcome::Fail,
             fmt::format("engineering feasibility {}", pass_fail(p.feasibility_confirmed)));
    add_gate(e, gates::kMassDemand,
             p.demand_probable_at_mass_production ? GateOutcome::Pass : GateOutcome::Fail,
             fmt::format("probable demand at mass production {}",
                         pass_fail(p.demand_probable_at_mass_production)));

    std::vector<std::string> failed;
    if (!p.feasibility_confirmed) failed.emplace_back(gates::kFeasibility);
    if (!p.demand_probable_at_mass_production) failed.emplace_back(gates::kMassDemand);
    if (!failed.empty()) {
        reject(e, failed,
               fmt::format("new good not supported: failing gate(s) {}", fmt::join(failed, ", ")));
        return e;
    }
    add_audit(e, "group1.credit",
              "a new good with feasible engineering and probable mass demand is financed by bank "
              "credit against productive means or future output as collateral",
              "both attestations present");
    grant(e, Instrument::CreditCreationWithProductiveMeansCollateral,
          {std::string(gates::kFeasibility), std::string(gates::kMassDemand)});
    return e;
}

Evaluation evaluate_group2(const ProductionPlan& p) {
    require_group(p, Novelty::NewMethod);
    if (!p.technology_profile) throw ValidationError("technology_profile", "missing");
    const auto cls = p.effective_tech_class();
    if (!cls) throw ValidationError("tech_class", "missing");
    Evaluation e = start(p, 2);

    TechnologyEvidence ev;
    ev.tech_class = *cls;
    ev.tcc = tech::tcc(*p.technology_profile);
    ev.tca = tech::tca(ev.tcc, p.technology_profile->eva);
    if (p.baseline_tcc) {
        ev.baseline_tca = tech::tca(*p.baseline_tcc, p.technology_profile->eva);
        ev.tca_delta = ev.tca - *ev.baseline_tca;
    }
    std::string tech_evidence = fmt::format("TCC={:.6f} TCA={:.6f} class={}", ev.tcc, ev.tca,
                                            tech::to_string(*cls));
    if (ev.tca_delta) tech_evidence += fmt::format(" TCA_delta={:.6f}", *ev.tca_delta);
    add_gate(e, gates::kTechnologyContent, GateOutcome::Pass, tech_evidence);
    add_audit(e, "group2.technology_content",
              "technology content added is measured and recorded as evidence; it is not a gate",
              tech_evidence);
    e.technology = ev;

    const bool advanced = tech::is_advanced(*cls);
    if (!p.foreign_investment) {
        add_gate(e, gates::kForeignInvestment, GateOutcome::NotApplicable, "domestic investment");
    } else {
        add_gate(e, gates::kForeignInvestment, advanced ? GateOutcome::Pass : GateOutcome::Fail,
                 fmt::format("foreign investment with {} technology", tech::to_string(*cls)));
        add_audit(e, "group2.foreign_investment",
                  "foreign investment is supported only when its production technology is pacing "
                  "or emerging",
                  advanced ? "advanced class present" : "class below pacing");
    }
    add_gate(e, gates::kAdvancedClass, advanced ? GateOutcome::Pass : GateOutcome::Fail,
             fmt::format("technology class {}", tech::to_string(*cls)));
    if (advanced) {
        add_gate(e, gates::kPriceReduction, GateOutcome::NotApplicable,
                 "pacing/emerging technology is supported regardless of price effect");
    } else {
        add_gate(e, gates::kPriceReduction,
                 p.price_reduction_expected ? GateOutcome::Pass : GateOutcome::Fail,
                 fmt::format("final-price reduction {}", pass_fail(p.price_reduction_expected)));
    }

    if (p.foreign_investment && !advanced) {
        reject(e, {std::string(gates::kForeignInvestment)},
               "foreign investment with base or key technology");
        return e;
    }
    if (advanced) {
        add_audit(e, "group2.advanced_class",
                  "pacing and emerging technologies are supported in any case",
                  fmt::format("class {}", tech::to_string(*cls)));
        grant(e, Instrument::CreditCreationWithProductiveMeansCollateral,
              {std::string(gates::kAdvancedClass)});
        return e;
    }
    if (!p.price_reduction_expected) {
        reject(e, {std::string(gates::kPriceReduction)},
               "base or key technology without an expected reduction of the final price");
        return e;
    }
    add_audit(e, "group2.price_reduction",
              "base and key technologies are supported for the benefit of a lower final price",
              fmt::format("class {}", tech::to_string(*cls)));
    grant(e, Instrument::CreditCreationWithProductiveMeansCollateral,
          {std::string(gates::kPriceReduction)});
    return e;
}

Evaluation evaluate_group3(const ProductionPlan& p) {
    require_group(p, Novelty::NewMarket);
    if (!p.market_case) throw ValidationError("market_case", "missing");
    Evaluation e = start(p, 3);
    const MarketCase mc = *p.market_case;
    add_gate(e, gates::kMarketCase, GateOutcome::Pass,
             fmt::format("market case {}", to_string(mc)));
    add_audit(e, "group3.investment_monitoring",
              "shortage and excess (lumpy) investment monitoring has no operational criterion",
              "not modeled; excluded from gating");
    const std::vector<std::string> why{std::string(gates::kMarketCase)};

    auto tariff_terms = [&]() {
        if (!p.tariff_terms) {
            throw ValidationError("tariff_terms",
                                  "a tariff instrument needs a contract reference and time limit");
        }
        TariffTerms t = *p.tariff_terms;
        t.world_price_convergence_clause = true;
        return t;
    };

    switch (mc) {
        case MarketCase::GovernmentProcurement:
            add_audit(e, "group3.procurement",
                      "committed government purchases are a commitment, not a prediction: "
                      "procurement contract, minimum-interest credit and a time-limited tariff",
                      "government procurement case");
            grant(e, Instrument::GovernmentProcurementContract, why);
            grant(e, Instrument::CreditAtMinimumInterest, why);
            grant(e, Instrument::TariffByContractTimeLimited, why, tariff_terms());
            break;
        case MarketCase::DomesticGrowthPrediction:
            add_audit(e, "group3.domestic_growth",
                      "predicted domestic market growth is protected by a time-limited tariff "
                      "under a mutual contract with convergence to the world price",
                      "domestic growth prediction case");
            grant(e, Instrument::TariffByContractTimeLimited, why, tariff_terms());
            break;
        case MarketCase::GlobalGrowthPrediction:
            add_audit(e, "group3.global_growth",
                      "predicted global market growth is supported by export subsidy or guarantee "
                      "fund and bilateral trade agreements",
                      "global growth prediction case");
            grant(e, Instrument::ExportSubsidyOrGuaranteeFund, why);
            grant(e, Instrument::BilateralTradeAgreementFacilitation, why);
            break;
    }
    return e;
}

Evaluation evaluate_group4(const ProductionPlan& p) {
    require_group(p, Novelty::NewOrganization);
    if (!p.merger) throw ValidationError("merger", "missing");
    Evaluation e = start(p, 4);
    const merger::HhiVerdict verdict = merger::screen(*p.merger);
    e.merger_verdict = verdict;

    add_gate(e, gates::kObjectivesVerified,
             p.claimed_objectives_verified ? GateOutcome::Pass : GateOutcome::Fail,
             fmt::format("claimed merger objectives {}",
                         p.claimed_objectives_verified ? "verified" : "not verified"));
    const bool concentration_ok = verdict.action != merger::Action::PresumedEnhancesMarketPower;
    const std::string hhi_evidence =
        fmt::format("pre={:.6f} delta={:.6f} post={:.6f} class={} action={}", verdict.pre_hhi,
                    verdict.delta_hhi, verdict.post_hhi, merger::to_string(verdict.market_class),
                    merger::to_string(verdict.action));
    add_gate(e, gates::kConcentration, concentration_ok ? GateOutcome::Pass : GateOutcome::Fail,
             hhi_evidence);
    add_audit(e, "group4.hhi_screen",
              "merger guideline bands: 1500/2500 on post-merger HHI, 100/200 on the increase",
              verdict.rule);
    if (verdict.projected_shares) {
        add_audit(e, "group4.projected_shares",
                  "projected shares for a potential entrant are analyst input",
                  "shares flagged as projections");
    }

    std::vector<std::string> failed;
    if (!p.claimed_objectives_verified) failed.emplace_back(gates::kObjectivesVerified);
    if (!concentration_ok) failed.emplace_back(gates::kConcentration);
    if (!failed.empty()) {
        reject(e, failed,
               fmt::format("merger not supported: failing gate(s) {}", fmt::join(failed, ", ")));
        return e;
    }
    add_audit(e, "group4.support",
              "a verified merger that does not enhance market power receives direct subsidies and "
              "tax relief",
              hhi_evidence);
    const std::vector<std::string> why{std::string(gates::kObjectivesVerified),
                                       std::string(gates::kConcentration)};
    grant(e, Instrument::DirectSubsidy, why);
    grant(e, Instrument::TaxRelief, why);
    return e;
}

Evaluation apply_guardrails(const ProductionPlan& p, Evaluation e) {
    if (!p.is_established_industry) {
        add_gate(e, gates::kEstablishedIndustry, GateOutcome::NotApplicable,
                 "not an established industry");
        return e;
    }
    if (p.involves_modernization_or_restructuring) {
        add_gate(e, gates::kEstablishedIndustry, GateOutcome::Pass,
                 "established industry with modernization or restructuring");
        return e;
    }
    add_gate(e, gates::kEstablishedIndustry, GateOutcome::Fail,
             "established industry without modernization or restructuring");
    add_audit(e, "guardrail.established_industry",
              "established industries are supported only with production modernization or "
              "organizational reconstruction",
              e.rejected() ? "plan already rejected" : "overrides the group outcome");
    reject(e, {std::string(gates::kEstablishedIndustry)}, "established-industry guardrail");
    return e;
}

Evaluation evaluate_plan(const ProductionPlan& p, const EvaluationContext& ctx) {
    const int group = classify_plan(p);
    Evaluation e;
    switch (group) {
        case 1: e = evaluate_group1(p); break;
        case 2: e = evaluate_group2(p); break;
        case 3: e = evaluate_group3(p); break;
        default: e = evaluate_group4(p); break;
    }
    e.audit.insert(e.audit.begin(),
                   AuditEntry{"classify", "the claimed new combination fixes the group",
                              fmt::format("{} -> group {}", to_string(p.claimed_novelty), group)});
    if (p.claims_new_supply_source) {
        e.audit.insert(e.audit.begin() + 1,
                       AuditEntry{"classify.new_supply_source",
                                  "a new source of supply is evaluated as a new good or new method",
                                  fmt::format("accepted under group {}", group)});
    }
    e = apply_guardrails(p, std::move(e));
    e.id = ctx.evaluation_id;
    e.timestamp = ctx.timestamp;
    e.supersedes = ctx.supersedes;
    return e;
}

std::vector<ImportCandidate> import_substitution_candidates(const io::IoTable& table,
                                                            const std::vector<double>& import_share,
                                                            const linkage::LinkageReport& linkage,
                                                            const std::vector<double>& gi) {
    const auto n = static_cast<std::size_t>(table.size());
    ErrorCollector errors;
    if (import_share.size() != n) {
        errors.add("import_share", fmt::format("expected {} entries, got {}", n, import_share.size()));
    }
    if (static_cast<std::size_t>(linkage.u_backward.size()) != n) {
        errors.add("linkage", fmt::format("expected {} sectors, got {}", n, linkage.u_backward.size()));
    }
    if (gi.size() != n) errors.add("gi", fmt::format("expected {} entries, got {}", n, gi.size()));
    errors.throw_if_any();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(import_share[i] >= 0.0 && import_share[i] <= 1.0)) {
            errors.add(fmt::format("import_share[{}]", i),
                       fmt::format("must lie in [0, 1], got {}", import_share[i]));
        }
    }
    errors.throw_if_any();

    std::vector<ImportCandidate> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = linkage.u_backward(static_cast<Eigen::Index>(i));
        const double score = import_share[i] * u;
        if (!(score > 0.0)) continue;
        out.push_back({i, table.sector_labels()[i], import_share[i], u, score, gi[i]});
    }
    std::stable_sort(out.begin(), out.end(), [](const ImportCandidate& a, const ImportCandidate& b) {
        return a.score > b.score;
    });
    return out;
}

}  // namespace dyncenter::decision
