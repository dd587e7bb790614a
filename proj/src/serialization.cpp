#include "dyncenter/serialization.hpp"

#include "dyncenter/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>

namespace dyncenter::json {

namespace {

// Field-by-field reader that records every problem before throwing.
class Reader {
public:
    Reader(const json& j, std::string prefix, ErrorCollector& errors)
        : j_(j), prefix_(std::move(prefix)), errors_(errors) {
        if (!j_.is_object()) {
            errors_.add(prefix_.empty() ? "$" : prefix_, "expected a JSON object");
            ok_ = false;
        }
    }

    bool ok() const { return ok_; }
    std::string path(std::string_view key) const {
        return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
    }
    bool has(std::string_view key) const {
        return ok_ && j_.contains(key) && !j_.at(std::string(key)).is_null();
    }
    const json& at(std::string_view key) const { return j_.at(std::string(key)); }

    double number(std::string_view key, double fallback, bool required = true) {
        if (!has(key)) {
            if (required && ok_) errors_.add(path(key), "required number is missing");
            return fallback;
        }
        const json& v = at(key);
        if (!v.is_number()) {
            errors_.add(path(key), "must be a number");
            return fallback;
        }
        return v.get<double>();
    }

    std::optional<double> optional_number(std::string_view key) {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    bool boolean(std::string_view key, bool fallback = false) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_boolean()) {
            errors_.add(path(key), "must be true or false");
            return fallback;
        }
        return v.get<bool>();
    }

    std::string string(std::string_view key, std::string fallback = {}, bool required = false) {
        if (!has(key)) {
            if (required && ok_) errors_.add(path(key), "required string is missing");
            return fallback;
        }
        const json& v = at(key);
        if (!v.is_string()) {
            errors_.add(path(key), "must be a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(std::string_view key, bool required = true) {
        std::vector<double> out;
        if (!has(key)) {
            if (required && ok_) errors_.add(path(key), "required array is missing");
            return out;
        }
        const json& v = at(key);
        if (!v.is_array()) {
            errors_.add(path(key), "must be an array of numbers");
            return out;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                errors_.add(fmt::format("{}[{}]", path(key), i), "must be a number");
                out.push_back(0.0);
            } else {
                out.push_back(v[i].get<double>());
            }
        }
        return out;
    }

    // Parses an enum-valued string, recording the parser's message on failure.
    template <typename T>
    std::optional<T> enumeration(std::string_view key, const std::function<T(std::string_view)>& parse,
                                 bool required = false) {
        if (!has(key)) {
            if (required && ok_) errors_.add(path(key), "required field is missing");
            return std::nullopt;
        }
        const json& v = at(key);
        if (!v.is_string()) {
            errors_.add(path(key), "must be a string");
            return std::nullopt;
        }
        try {
            return parse(v.get<std::string>());
        } catch (const ValidationError& e) {
            for (const auto& fe : e.errors()) errors_.add(path(key), fe.message);
            return std::nullopt;
        }
    }

    ErrorCollector& errors() { return errors_; }

private:
    const json& j_;
    std::string prefix_;
    ErrorCollector& errors_;
    bool ok_ = true;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_array(const std::vector<std::optional<double>>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x ? number_or_null(*x) : json(nullptr));
    return out;
}

json vector_array(const io::Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v(i)));
    return out;
}

json double_array(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number_or_null(x));
    return out;
}

tech::TechnologyProfile read_profile(Reader& r) {
    tech::TechnologyProfile p;
    p.technoware = r.number("T", 0.0);
    p.inforware = r.number("I", 0.0);
    p.humanware = r.number("H", 0.0);
    p.orgaware = r.number("O", 0.0);
    const auto betas = r.numbers("beta");
    if (r.has("beta") && betas.size() != 4) {
        r.errors().add(r.path("beta"), fmt::format("expected 4 intensities, got {}", betas.size()));
    }
    for (std::size_t k = 0; k < std::min<std::size_t>(4, betas.size()); ++k) p.betas[k] = betas[k];
    p.alpha_climate = r.number("alpha", 0.0);
    p.eva = r.number("eva", 0.0);
    p.tech_class = r.enumeration<tech::TechClass>("tech_class", tech::parse_tech_class);
    p.provenance = r.string("provenance");
    return p;
}

// Collects the profile's own invariant violations under a path prefix.
void check_profile(const tech::TechnologyProfile& p, const std::string& prefix,
                   ErrorCollector& errors) {
    try {
        tech::validate(p);
    } catch (const ValidationError& e) {
        for (const auto& fe : e.errors()) {
            errors.add(prefix.empty() ? fe.field : prefix + "." + fe.field, fe.message);
        }
    }
}

merger::MergerScenario read_scenario(Reader& r) {
    merger::MergerScenario s;
    s.shares = r.numbers("shares");
    s.projected_shares = r.boolean("projected_shares");
    if (!r.has("merging")) {
        if (r.ok()) r.errors().add(r.path("merging"), "required pair of firm indices is missing");
        return s;
    }
    const json& m = r.at("merging");
    if (!m.is_array() || m.size() != 2 || !m[0].is_number_unsigned() || !m[1].is_number_unsigned()) {
        r.errors().add(r.path("merging"), "must be a pair of non-negative integer indices");
        return s;
    }
    s.merging = {m[0].get<std::size_t>(), m[1].get<std::size_t>()};
    return s;
}

void check_scenario(const merger::MergerScenario& s, const std::string& prefix,
                    ErrorCollector& errors) {
    try {
        merger::validate(s);
    } catch (const ValidationError& e) {
        for (const auto& fe : e.errors()) {
            errors.add(prefix.empty() ? fe.field : prefix + "." + fe.field, fe.message);
        }
    }
}

json terms_json(const decision::TariffTerms& t) {
    return {{"contract_reference", t.contract_reference},
            {"time_limit_months", t.time_limit_months},
            {"world_price_convergence_clause", t.world_price_convergence_clause}};
}

decision::TariffTerms read_terms(Reader& r) {
    decision::TariffTerms t;
    t.contract_reference = r.string("contract_reference", {}, true);
    const double months = r.number("time_limit_months", 0.0);
    if (months != std::floor(months)) {
        r.errors().add(r.path("time_limit_months"), "must be a whole number of months");
    }
    t.time_limit_months = static_cast<int>(months);
    t.world_price_convergence_clause = r.boolean("world_price_convergence_clause", true);
    return t;
}

}  // namespace

json to_json(const tech::TechnologyProfile& p) {
    json j = {{"T", p.technoware},
              {"I", p.inforware},
              {"H", p.humanware},
              {"O", p.orgaware},
              {"beta", {p.betas[0], p.betas[1], p.betas[2], p.betas[3]}},
              {"alpha", p.alpha_climate},
              {"eva", p.eva}};
    j["tech_class"] = p.tech_class ? json(tech::to_string(*p.tech_class)) : json(nullptr);
    if (!p.provenance.empty()) j["provenance"] = p.provenance;
    return j;
}

tech::TechnologyProfile profile_from_json(const json& j) {
    ErrorCollector errors;
    Reader r(j, "", errors);
    auto p = read_profile(r);
    if (errors.empty()) check_profile(p, "", errors);
    errors.throw_if_any();
    return p;
}

json to_json(const merger::MergerScenario& s) {
    return {{"shares", s.shares},
            {"merging", {s.merging.first, s.merging.second}},
            {"projected_shares", s.projected_shares}};
}

merger::MergerScenario scenario_from_json(const json& j) {
    ErrorCollector errors;
    Reader r(j, "", errors);
    auto s = read_scenario(r);
    if (errors.empty()) check_scenario(s, "", errors);
    errors.throw_if_any();
    return s;
}

std::vector<double> market_shares_from_json(const json& j) {
    ErrorCollector errors;
    Reader r(j, "", errors);
    auto shares = r.numbers("shares");
    errors.throw_if_any();
    return shares;
}

json to_json(const merger::HhiVerdict& v) {
    return {{"pre_hhi", v.pre_hhi},
            {"delta_hhi", v.delta_hhi},
            {"post_hhi", v.post_hhi},
            {"coverage", v.coverage},
            {"market_class", merger::to_string(v.market_class)},
            {"action", merger::to_string(v.action)},
            {"rule", v.rule},
            {"boundary_note", v.boundary_note},
            {"projected_shares", v.projected_shares}};
}

json to_json(const decision::ProductionPlan& p) {
    json j = {{"schema_version", decision::kSchemaVersion},
              {"id", p.id},
              {"title", p.title},
              {"applicant_metadata", p.applicant_metadata},
              {"claimed_novelty", decision::to_string(p.claimed_novelty)},
              {"claims_new_supply_source", p.claims_new_supply_source},
              {"foreign_investment", p.foreign_investment},
              {"claimed_objectives_verified", p.claimed_objectives_verified},
              {"feasibility_confirmed", p.feasibility_confirmed},
              {"demand_probable_at_mass_production", p.demand_probable_at_mass_production},
              {"price_reduction_expected", p.price_reduction_expected},
              {"is_established_industry", p.is_established_industry},
              {"involves_modernization_or_restructuring", p.involves_modernization_or_restructuring}};
    j["technology_profile"] = p.technology_profile ? to_json(*p.technology_profile) : json(nullptr);
    j["tech_class"] = p.tech_class ? json(tech::to_string(*p.tech_class)) : json(nullptr);
    j["baseline_tcc"] = p.baseline_tcc ? json(*p.baseline_tcc) : json(nullptr);
    j["market_case"] = p.market_case ? json(decision::to_string(*p.market_case)) : json(nullptr);
    j["merger"] = p.merger ? to_json(*p.merger) : json(nullptr);
    j["tariff_terms"] = p.tariff_terms ? terms_json(*p.tariff_terms) : json(nullptr);
    return j;
}

decision::ProductionPlan plan_from_json(const json& j) {
    ErrorCollector errors;
    Reader r(j, "", errors);
    decision::ProductionPlan p;
    if (r.has("schema_version")) {
        const double v = r.number("schema_version", decision::kSchemaVersion);
        if (v != decision::kSchemaVersion) {
            errors.add("schema_version",
                       fmt::format("unsupported schema version {} (expected {})", v,
                                   decision::kSchemaVersion));
        }
    }
    p.id = r.string("id");
    p.title = r.string("title");
    if (r.has("applicant_metadata")) p.applicant_metadata = r.at("applicant_metadata");
    if (auto n = r.enumeration<decision::Novelty>("claimed_novelty", decision::parse_novelty, true)) {
        p.claimed_novelty = *n;
    }
    p.claims_new_supply_source = r.boolean("claims_new_supply_source");
    if (r.has("technology_profile")) {
        Reader sub(r.at("technology_profile"), "technology_profile", errors);
        if (sub.ok()) {
            p.technology_profile = read_profile(sub);
            check_profile(*p.technology_profile, "technology_profile", errors);
        }
    }
    p.tech_class = r.enumeration<tech::TechClass>("tech_class", tech::parse_tech_class);
    p.baseline_tcc = r.optional_number("baseline_tcc");
    p.foreign_investment = r.boolean("foreign_investment");
    p.market_case =
        r.enumeration<decision::MarketCase>("market_case", decision::parse_market_case);
    if (r.has("merger")) {
        Reader sub(r.at("merger"), "merger", errors);
        if (sub.ok()) {
            p.merger = read_scenario(sub);
            check_scenario(*p.merger, "merger", errors);
        }
    }
    if (r.has("tariff_terms")) {
        Reader sub(r.at("tariff_terms"), "tariff_terms", errors);
        if (sub.ok()) p.tariff_terms = read_terms(sub);
    }
    p.claimed_objectives_verified = r.boolean("claimed_objectives_verified");
    p.feasibility_confirmed = r.boolean("feasibility_confirmed");
    p.demand_probable_at_mass_production = r.boolean("demand_probable_at_mass_production");
    p.price_reduction_expected = r.boolean("price_reduction_expected");
    p.is_established_industry = r.boolean("is_established_industry");
    p.involves_modernization_or_restructuring =
        r.boolean("involves_modernization_or_restructuring");
    errors.throw_if_any();
    return p;
}

json to_json(const decision::Evaluation& e) {
    json gates = json::array();
    for (const auto& g : e.gates) {
        gates.push_back(
            {{"gate", g.gate}, {"outcome", decision::to_string(g.outcome)}, {"evidence", g.evidence}});
    }
    json instruments = json::array();
    for (const auto& i : e.instruments) {
        json item = {{"instrument", decision::to_string(i.instrument)},
                     {"justified_by", i.justified_by}};
        item["terms"] = i.terms ? terms_json(*i.terms) : json(nullptr);
        instruments.push_back(std::move(item));
    }
    json audit = json::array();
    for (const auto& a : e.audit) {
        audit.push_back({{"rule", a.rule}, {"basis", a.basis}, {"detail", a.detail}});
    }
    json j = {{"schema_version", e.schema_version},
              {"id", e.id},
              {"plan_id", e.plan_id},
              {"timestamp", e.timestamp},
              {"group", e.group},
              {"gates", std::move(gates)},
              {"instruments", std::move(instruments)},
              {"audit", std::move(audit)}};
    j["supersedes"] = e.supersedes ? json(*e.supersedes) : json(nullptr);
    if (e.technology) {
        const auto& t = *e.technology;
        j["technology"] = {{"tcc", t.tcc},
                           {"tca", t.tca},
                           {"baseline_tca", t.baseline_tca ? json(*t.baseline_tca) : json(nullptr)},
                           {"tca_delta", t.tca_delta ? json(*t.tca_delta) : json(nullptr)},
                           {"tech_class", tech::to_string(t.tech_class)}};
    } else {
        j["technology"] = nullptr;
    }
    j["merger_verdict"] = e.merger_verdict ? to_json(*e.merger_verdict) : json(nullptr);
    return j;
}

decision::Evaluation evaluation_from_json(const json& j) {
    // Evaluations are produced by this library; a malformed record is a
    // storage problem, so nlohmann's own exceptions are translated once here.
    try {
        decision::Evaluation e;
        e.schema_version = j.at("schema_version").get<int>();
        e.id = j.at("id").get<std::string>();
        e.plan_id = j.at("plan_id").get<std::string>();
        e.timestamp = j.at("timestamp").get<std::string>();
        e.group = j.at("group").get<int>();
        if (!j.at("supersedes").is_null()) e.supersedes = j.at("supersedes").get<std::string>();
        for (const auto& g : j.at("gates")) {
            e.gates.push_back({g.at("gate").get<std::string>(),
                               decision::parse_gate_outcome(g.at("outcome").get<std::string>()),
                               g.at("evidence").get<std::string>()});
        }
        for (const auto& i : j.at("instruments")) {
            decision::InstrumentGrant grant;
            grant.instrument = decision::parse_instrument(i.at("instrument").get<std::string>());
            grant.justified_by = i.at("justified_by").get<std::vector<std::string>>();
            if (!i.at("terms").is_null()) {
                const auto& t = i.at("terms");
                grant.terms = decision::TariffTerms{
                    t.at("contract_reference").get<std::string>(),
                    t.at("time_limit_months").get<int>(),
                    t.at("world_price_convergence_clause").get<bool>()};
            }
            e.instruments.push_back(std::move(grant));
        }
        for (const auto& a : j.at("audit")) {
            e.audit.push_back({a.at("rule").get<std::string>(), a.at("basis").get<std::string>(),
                               a.at("detail").get<std::string>()});
        }
        if (!j.at("technology").is_null()) {
            const auto& t = j.at("technology");
            decision::TechnologyEvidence ev;
            ev.tcc = t.at("tcc").get<double>();
            ev.tca = t.at("tca").get<double>();
            if (!t.at("baseline_tca").is_null()) ev.baseline_tca = t.at("baseline_tca").get<double>();
            if (!t.at("tca_delta").is_null()) ev.tca_delta = t.at("tca_delta").get<double>();
            ev.tech_class = tech::parse_tech_class(t.at("tech_class").get<std::string>());
            e.technology = ev;
        }
        if (!j.at("merger_verdict").is_null()) {
            const auto& v = j.at("merger_verdict");
            merger::HhiVerdict verdict;
            verdict.pre_hhi = v.at("pre_hhi").get<double>();
            verdict.delta_hhi = v.at("delta_hhi").get<double>();
            verdict.post_hhi = v.at("post_hhi").get<double>();
            verdict.coverage = v.at("coverage").get<double>();
            verdict.market_class = merger::classify_market(verdict.post_hhi);
            verdict.action = merger::guideline_action(verdict.market_class, verdict.delta_hhi);
            verdict.rule = v.at("rule").get<std::string>();
            verdict.boundary_note = v.at("boundary_note").get<std::string>();
            verdict.projected_shares = v.at("projected_shares").get<bool>();
            e.merger_verdict = verdict;
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError("evaluation", ex.what());
    }
}

json to_json(const io::IoTable& t) {
    json flows = json::array();
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < t.size(); ++k) row.push_back(t.flows()(i, k));
        flows.push_back(std::move(row));
    }
    return {{"sector_labels", t.sector_labels()},
            {"flows", std::move(flows)},
            {"final_demand", vector_array(t.final_demand())},
            {"gross_output", vector_array(t.gross_output())}};
}

io::IoTable table_from_json(const json& j) {
    ErrorCollector errors;
    Reader r(j, "", errors);
    std::vector<std::string> labels;
    if (r.has("sector_labels")) {
        const json& l = r.at("sector_labels");
        if (!l.is_array()) {
            errors.add("sector_labels", "must be an array of strings");
        } else {
            for (std::size_t i = 0; i < l.size(); ++i) {
                if (!l[i].is_string()) {
                    errors.add(fmt::format("sector_labels[{}]", i), "must be a string");
                } else {
                    labels.push_back(l[i].get<std::string>());
                }
            }
        }
    }
    const auto fd = r.numbers("final_demand");
    const auto go = r.numbers("gross_output");
    io::Matrix flows;
    if (!r.has("flows") || !r.at("flows").is_array()) {
        if (r.ok()) errors.add("flows", "required matrix (array of rows) is missing");
    } else {
        const json& rows = r.at("flows");
        const auto n = static_cast<Eigen::Index>(rows.size());
        flows = io::Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const json& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
                errors.add(fmt::format("flows[{}]", i), fmt::format("must hold {} numbers", n));
                continue;
            }
            for (Eigen::Index k = 0; k < n; ++k) {
                const json& v = row[static_cast<std::size_t>(k)];
                if (!v.is_number()) {
                    errors.add(fmt::format("flows[{}][{}]", i, k), "must be a number");
                } else {
                    flows(i, k) = v.get<double>();
                }
            }
        }
    }
    errors.throw_if_any();
    return io::IoTable::create(std::move(labels), std::move(flows),
                               Eigen::Map<const io::Vector>(fd.data(), static_cast<Eigen::Index>(fd.size())),
                               Eigen::Map<const io::Vector>(go.data(), static_cast<Eigen::Index>(go.size())));
}

json to_json(const linkage::LinkageReport& r) {
    return {{"sector_labels", r.sector_labels},
            {"u_backward", vector_array(r.u_backward)},
            {"u_forward", vector_array(r.u_forward)},
            {"v_backward", vector_array(r.v_backward)},
            {"v_forward", vector_array(r.v_forward)},
            {"key_sector", r.key_sector},
            {"v_threshold_backward", r.v_threshold_backward},
            {"v_threshold_forward", r.v_threshold_forward}};
}

json to_json(const structure::StructureReport& r) {
    auto gi = [](const structure::GeneralIndex& g) {
        return json{{"ranks_u", double_array(g.ranks_u)},
                    {"ranks_g", double_array(g.ranks_g)},
                    {"gi", double_array(g.gi)}};
    };
    return {{"sector_labels", r.sector_labels},
            {"g_row", optional_array(r.g_row)},
            {"g_col", optional_array(r.g_col)},
            {"h_row", optional_array(r.h_row)},
            {"h_col", optional_array(r.h_col)},
            {"entropy_units", "nats"},
            {"entropy_variant", structure::to_string(r.entropy_variant)},
            {"share_source", structure::to_string(r.source)},
            {"alpha_rank_weight", r.alpha_rank_weight},
            {"backward", gi(r.backward)},
            {"forward", gi(r.forward)}};
}

json to_json(const std::vector<decision::ImportCandidate>& candidates) {
    json out = json::array();
    for (const auto& c : candidates) {
        out.push_back({{"sector", c.sector},
                       {"label", c.label},
                       {"import_share", c.import_share},
                       {"u_backward", c.u_backward},
                       {"score", c.score},
                       {"gi", c.gi}});
    }
    return {{"scoring", "import_share * u_backward (non-normative)"}, {"candidates", out}};
}

json tcc_summary(const tech::TechnologyProfile& p) {
    const double value = tech::tcc(p);
    json elasticities = json::object();
    for (auto c : {tech::Component::Technoware, tech::Component::Inforware,
                   tech::Component::Humanware, tech::Component::Orgaware}) {
        elasticities[std::string(tech::to_string(c))] = tech::component_elasticity(p, c);
    }
    return {{"tcc", value},
            {"tca", tech::tca(value, p.eva)},
            {"eva", p.eva},
            {"elasticities", elasticities},
            {"profile", to_json(p)}};
}

}  // namespace dyncenter::json
