#include "dyncenter/merger_screen.hpp"

#include "dyncenter/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace dyncenter::merger {

std::string_view to_string(MarketClass c) {
    switch (c) {
        case MarketClass::Unconcentrated: return "Unconcentrated";
        case MarketClass::ModeratelyConcentrated: return "ModeratelyConcentrated";
        case MarketClass::HighlyConcentrated: return "HighlyConcentrated";
    }
    return "Unconcentrated";
}

std::string_view to_string(Action a) {
    switch (a) {
        case Action::NoFurtherAnalysis: return "NoFurtherAnalysis";
        case Action::PotentialConcernScrutiny: return "PotentialConcernScrutiny";
        case Action::PresumedEnhancesMarketPower: return "PresumedEnhancesMarketPower";
    }
    return "NoFurtherAnalysis";
}

namespace {

void check_shares(std::span<const double> shares, ErrorCollector& errors) {
    if (shares.empty()) errors.add("shares", "at least one market share is required");
    double total = 0.0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        if (!std::isfinite(shares[i]) || shares[i] < 0.0) {
            errors.add(fmt::format("shares[{}]", i),
                       fmt::format("share must be a non-negative percentage, got {}", shares[i]));
        } else {
            total += shares[i];
        }
    }
    if (total > 100.0 + kShareSumSlack) {
        errors.add("shares", fmt::format("shares sum to {} percent, above 100", total));
    }
}

}  // namespace

void validate(const MergerScenario& s) {
    ErrorCollector errors;
    check_shares(s.shares, errors);
    const auto [a, b] = s.merging;
    if (a >= s.shares.size()) {
        errors.add("merging[0]", fmt::format("index {} out of range for {} firms", a, s.shares.size()));
    }
    if (b >= s.shares.size()) {
        errors.add("merging[1]", fmt::format("index {} out of range for {} firms", b, s.shares.size()));
    }
    if (a == b) errors.add("merging", "merging firms must be distinct");
    errors.throw_if_any();
}

double hhi(std::span<const double> shares) {
    ErrorCollector errors;
    check_shares(shares, errors);
    errors.throw_if_any();
    return std::accumulate(shares.begin(), shares.end(), 0.0,
                           [](double acc, double s) { return acc + s * s; });
}

double delta_hhi(double share_a, double share_b) {
    ErrorCollector errors;
    if (!(share_a >= 0.0)) errors.add("s_a", fmt::format("must be non-negative, got {}", share_a));
    if (!(share_b >= 0.0)) errors.add("s_b", fmt::format("must be non-negative, got {}", share_b));
    errors.throw_if_any();
    return 2.0 * share_a * share_b;
}

MarketClass classify_market(double post_hhi) {
    if (post_hhi < kUnconcentratedBelow) return MarketClass::Unconcentrated;
    if (post_hhi > kHighlyConcentratedAbove) return MarketClass::HighlyConcentrated;
    return MarketClass::ModeratelyConcentrated;
}

Action guideline_action(MarketClass post_class, double delta) {
    if (delta < kSmallChangeBelow) return Action::NoFurtherAnalysis;
    switch (post_class) {
        case MarketClass::Unconcentrated: return Action::NoFurtherAnalysis;
        case MarketClass::ModeratelyConcentrated: return Action::PotentialConcernScrutiny;
        case MarketClass::HighlyConcentrated:
            return delta > kPresumptionAbove ? Action::PresumedEnhancesMarketPower
                                             : Action::PotentialConcernScrutiny;
    }
    return Action::NoFurtherAnalysis;
}

std::vector<double> merged_shares(const MergerScenario& scenario) {
    validate(scenario);
    const auto [a, b] = scenario.merging;
    std::vector<double> out;
    out.reserve(scenario.shares.size() - 1);
    for (std::size_t i = 0; i < scenario.shares.size(); ++i) {
        if (i == b) continue;
        out.push_back(i == a ? scenario.shares[a] + scenario.shares[b] : scenario.shares[i]);
    }
    return out;
}

HhiVerdict screen(const MergerScenario& scenario) {
    validate(scenario);
    const auto [a, b] = scenario.merging;
    HhiVerdict v;
    v.pre_hhi = hhi(scenario.shares);
    v.delta_hhi = delta_hhi(scenario.shares[a], scenario.shares[b]);
    v.post_hhi = v.pre_hhi + v.delta_hhi;
    v.coverage = std::accumulate(scenario.shares.begin(), scenario.shares.end(), 0.0);
    v.market_class = classify_market(v.post_hhi);
    v.action = guideline_action(v.market_class, v.delta_hhi);
    v.projected_shares = scenario.projected_shares;

    if (v.delta_hhi < kSmallChangeBelow) {
        v.rule = "small change: HHI increase below 100 points";
    } else if (v.market_class == MarketClass::Unconcentrated) {
        v.rule = "post-merger market unconcentrated (HHI below 1500)";
    } else if (v.market_class == MarketClass::ModeratelyConcentrated) {
        v.rule = "moderately concentrated post-merger market with increase of at least 100 points";
    } else if (v.action == Action::PotentialConcernScrutiny) {
        v.rule = "highly concentrated post-merger market with increase between 100 and 200 points";
    } else {
        v.rule = "highly concentrated post-merger market with increase above 200 points";
    }
    v.boundary_note =
        "an increase of exactly 100 points is scrutiny-eligible; exactly 200 points is scrutiny, "
        "not presumption";
    return v;
}

}  // namespace dyncenter::merger
