#include "dyncenter/error.hpp"
#include "dyncenter/tech_assessment.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace dyncenter;
using dctest::close;

namespace {

tech::TechnologyProfile derived_profile() {
    tech::TechnologyProfile p;
    p.technoware = 6;
    p.inforware = 4;
    p.humanware = 5;
    p.orgaware = 3;
    p.betas = {0.3, 0.2, 0.25, 0.15};
    p.alpha_climate = 0.8;
    p.eva = 100;
    return p;
}

bool has_field(const ValidationError& e, const std::string& field) {
    for (const auto& fe : e.errors()) {
        if (fe.field == field) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("TCC, TCA and elasticities of the derived profile") {
    const auto p = derived_profile();
    const double t = tech::tcc(p);
    CHECK(close(t, 3.1860900746, 1e-9));
    CHECK(close(tech::tca(t, p.eva), 35.4010008288, 1e-8));
    for (auto c : {tech::Component::Technoware, tech::Component::Inforware,
                   tech::Component::Humanware, tech::Component::Orgaware}) {
        CHECK(close(tech::component_elasticity(p, c), 0.1593045037, 1e-9));
    }
}

TEST_CASE("scaling relation at k = 1e-4") {
    const auto r = tech::validate_scaling_property(derived_profile(), 1e-4);
    CHECK(close(r.predicted, 9.0e-5, 1e-15));
    CHECK(close(r.relative_change, 8.99995500e-05, 1e-12));
    CHECK(close(r.relative_change, r.predicted, 1e-7));
}

TEST_CASE("all-best profile with full climate stays below 9") {
    auto p = derived_profile();
    p.technoware = p.inforware = p.humanware = p.orgaware = 9;
    p.alpha_climate = 1.0;
    const double t = tech::tcc(p);
    CHECK(t < 9.0);
    CHECK(close(t, std::pow(9.0, 0.9), 1e-12));
}

TEST_CASE("zero climate factor gives zero contribution") {
    auto p = derived_profile();
    p.alpha_climate = 0.0;
    CHECK(tech::tcc(p) == 0.0);
    CHECK(tech::tca(0.0, 100) == 0.0);
}

TEST_CASE("invalid profiles report every bad field") {
    auto p = derived_profile();
    p.technoware = 0.5;
    p.orgaware = 9.5;
    p.betas = {0.4, 0.3, 0.2, 0.1};
    p.alpha_climate = 1.2;
    p.eva = -1;
    try {
        tech::validate(p);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(has_field(e, "T"));
        CHECK(has_field(e, "O"));
        CHECK(has_field(e, "beta"));
        CHECK(has_field(e, "alpha"));
        CHECK(has_field(e, "eva"));
    }
    auto q = derived_profile();
    q.betas[2] = 0.0;
    CHECK_THROWS_AS(tech::tcc(q), ValidationError);
}

TEST_CASE("TCA rejects out-of-range TCC") {
    CHECK_THROWS_AS(tech::tca(9.5, 100), ValidationError);
    CHECK_THROWS_AS(tech::tca(-0.1, 100), ValidationError);
    CHECK_THROWS_AS(tech::tca(3.0, -1), ValidationError);
}

TEST_CASE("scaling that leaves the score range is rejected") {
    auto p = derived_profile();
    p.technoware = 9.0;
    CHECK_THROWS_AS(tech::validate_scaling_property(p, 0.01), ValidationError);
}

TEST_CASE("technology class parsing and ordering") {
    CHECK(tech::parse_tech_class("pacing") == tech::TechClass::Pacing);
    CHECK(tech::is_advanced(tech::TechClass::Emerging));
    CHECK_FALSE(tech::is_advanced(tech::TechClass::Key));
    CHECK_THROWS_AS(tech::parse_tech_class("frontier"), ValidationError);
    CHECK(tech::parse_component("T") == tech::Component::Technoware);
    CHECK(tech::parse_component("orgaware") == tech::Component::Orgaware);
}

TEST_CASE("TCC properties on random profiles") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        tech::TechnologyProfile p;
        p.technoware = dctest::uniform(rng, 1.0, 9.0);
        p.inforware = dctest::uniform(rng, 1.0, 9.0);
        p.humanware = dctest::uniform(rng, 1.0, 9.0);
        p.orgaware = dctest::uniform(rng, 1.0, 9.0);
        double budget = dctest::uniform(rng, 0.05, 0.99);
        for (auto& b : p.betas) b = budget / 4.0 * dctest::uniform(rng, 0.2, 1.8);
        double sum = p.betas[0] + p.betas[1] + p.betas[2] + p.betas[3];
        if (sum >= 1.0 - tech::kBetaMargin) {
            for (auto& b : p.betas) b *= 0.99 / sum;
        }
        p.alpha_climate = dctest::uniform(rng, 0.0, 1.0);
        p.eva = dctest::uniform(rng, 0.0, 1e6);
        const double t = tech::tcc(p);
        CHECK(t >= 0.0);
        CHECK(t < 9.0);
        CHECK(tech::tca(t, p.eva) <= p.eva);
    }
}
