#include "dyncenter/tech_assessment.hpp"

#include "dyncenter/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace dyncenter::tech {

namespace {

constexpr std::array<const char*, 4> kComponentFields = {"T", "I", "H", "O"};

bool in_score_range(double x) { return x >= kMinScore && x <= kMaxScore; }

}  // namespace

std::string_view to_string(TechClass c) {
    switch (c) {
        case TechClass::Base: return "base";
        case TechClass::Key: return "key";
        case TechClass::Pacing: return "pacing";
        case TechClass::Emerging: return "emerging";
    }
    return "base";
}

TechClass parse_tech_class(std::string_view text) {
    if (text == "base") return TechClass::Base;
    if (text == "key") return TechClass::Key;
    if (text == "pacing") return TechClass::Pacing;
    if (text == "emerging") return TechClass::Emerging;
    throw ValidationError("tech_class",
                          fmt::format("unknown class '{}' (base, key, pacing, emerging)", text));
}

std::string_view to_string(Component c) {
    return kComponentFields[static_cast<std::size_t>(c)];
}

Component parse_component(std::string_view text) {
    for (std::size_t k = 0; k < kComponentFields.size(); ++k) {
        if (text == kComponentFields[k]) return static_cast<Component>(k);
    }
    if (text == "technoware") return Component::Technoware;
    if (text == "inforware") return Component::Inforware;
    if (text == "humanware") return Component::Humanware;
    if (text == "orgaware") return Component::Orgaware;
    throw ValidationError("component", fmt::format("unknown component '{}'", text));
}

double TechnologyProfile::score(Component c) const noexcept {
    switch (c) {
        case Component::Technoware: return technoware;
        case Component::Inforware: return inforware;
        case Component::Humanware: return humanware;
        case Component::Orgaware: return orgaware;
    }
    return technoware;
}

TechnologyProfile TechnologyProfile::with_score(Component c, double value) const {
    TechnologyProfile out = *this;
    switch (c) {
        case Component::Technoware: out.technoware = value; break;
        case Component::Inforware: out.inforware = value; break;
        case Component::Humanware: out.humanware = value; break;
        case Component::Orgaware: out.orgaware = value; break;
    }
    return out;
}

void validate(const TechnologyProfile& p) {
    ErrorCollector errors;
    for (std::size_t k = 0; k < 4; ++k) {
        const double s = p.score(static_cast<Component>(k));
        if (!in_score_range(s)) {
            errors.add(kComponentFields[k], fmt::format("score must lie in [1, 9], got {}", s));
        }
    }
    double beta_sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double b = p.betas[k];
        if (!(b >= kBetaMargin && b < 1.0)) {
            errors.add(fmt::format("beta[{}]", k), fmt::format("must lie in (0, 1), got {}", b));
        }
        beta_sum += b;
    }
    if (!(beta_sum <= 1.0 - kBetaMargin)) {
        errors.add("beta", fmt::format("sum must be below 1, got {}", beta_sum));
    }
    if (!(p.alpha_climate >= 0.0 && p.alpha_climate <= 1.0)) {
        errors.add("alpha", fmt::format("climate factor must lie in [0, 1], got {}", p.alpha_climate));
    }
    if (!(p.eva >= 0.0) || !std::isfinite(p.eva)) {
        errors.add("eva", fmt::format("must be non-negative, got {}", p.eva));
    }
    errors.throw_if_any();
}

double tcc(const TechnologyProfile& p) {
    validate(p);
    return p.alpha_climate * std::pow(p.technoware, p.betas[0]) *
           std::pow(p.inforware, p.betas[1]) * std::pow(p.humanware, p.betas[2]) *
           std::pow(p.orgaware, p.betas[3]);
}

double tca(double tcc_value, double eva) {
    ErrorCollector errors;
    if (!(tcc_value >= 0.0 && tcc_value <= kMaxScore)) {
        errors.add("tcc", fmt::format("must lie in [0, 9], got {}", tcc_value));
    }
    if (!(eva >= 0.0) || !std::isfinite(eva)) {
        errors.add("eva", fmt::format("must be non-negative, got {}", eva));
    }
    errors.throw_if_any();
    return tcc_value / kMaxScore * eva;
}

double component_elasticity(const TechnologyProfile& p, Component c) {
    const double value = tcc(p);
    return p.betas[static_cast<std::size_t>(c)] * value / p.score(c);
}

ScalingReport validate_scaling_property(const TechnologyProfile& p, double k) {
    validate(p);
    const double factor = 1.0 + k;
    ErrorCollector errors;
    TechnologyProfile scaled = p;
    for (std::size_t c = 0; c < 4; ++c) {
        const auto comp = static_cast<Component>(c);
        const double s = p.score(comp) * factor;
        if (!in_score_range(s)) {
            errors.add(kComponentFields[c],
                       fmt::format("scaled score {} leaves [1, 9] at k = {}", s, k));
        }
        scaled = scaled.with_score(comp, s);
    }
    errors.throw_if_any();

    ScalingReport r;
    r.k = k;
    r.tcc_before = tcc(p);
    r.tcc_after = tcc(scaled);
    r.relative_change = r.tcc_before > 0.0 ? (r.tcc_after - r.tcc_before) / r.tcc_before : 0.0;
    r.predicted = k * std::accumulate(p.betas.begin(), p.betas.end(), 0.0);
    return r;
}

}  // namespace dyncenter::tech
