#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dyncenter::tech {

inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 9.0;
/// Open-interval conditions 0 < beta_i and sum(beta) < 1, kept testable in
/// floating point.
inline constexpr double kBetaMargin = 1e-6;

/// Competitive technology class, ordered by increasing competitive impact.
enum class TechClass { Base = 0, Key = 1, Pacing = 2, Emerging = 3 };

std::string_view to_string(TechClass c);
TechClass parse_tech_class(std::string_view text);

/// Pacing and Emerging: the classes that qualify for unconditional support.
constexpr bool is_advanced(TechClass c) noexcept { return c >= TechClass::Pacing; }

enum class Component { Technoware = 0, Inforware = 1, Humanware = 2, Orgaware = 3 };

std::string_view to_string(Component c);
Component parse_component(std::string_view text);

struct TechnologyProfile {
    double technoware = 1.0;
    double inforware = 1.0;
    double humanware = 1.0;
    double orgaware = 1.0;
    std::array<double, 4> betas{};  // intensity per component, same order as Component
    double alpha_climate = 1.0;
    double eva = 0.0;
    std::optional<TechClass> tech_class;
    /// Free text describing what the score-9 datum refers to.
    std::string provenance;

    double score(Component c) const noexcept;
    TechnologyProfile with_score(Component c, double value) const;
};

/// Throws ValidationError naming every offending field (T, I, H, O, beta[k],
/// alpha, eva).
void validate(const TechnologyProfile& p);

/// TCC = alpha * T^b1 * I^b2 * H^b3 * O^b4. Lies in [0, 9).
double tcc(const TechnologyProfile& p);

/// TCA = (TCC / 9) * EVA.
double tca(double tcc_value, double eva);

/// d(TCC)/d(x_k) = beta_k * TCC / x_k.
double component_elasticity(const TechnologyProfile& p, Component c);

struct ScalingReport {
    double k = 0.0;
    double tcc_before = 0.0;
    double tcc_after = 0.0;
    double relative_change = 0.0;  // (after - before) / before
    double predicted = 0.0;        // k * sum(beta)
};

/// Multiplies all four scores by (1 + k) and compares the relative TCC change
/// with the first-order prediction k * sum(beta).
ScalingReport validate_scaling_property(const TechnologyProfile& p, double k);

}  // namespace dyncenter::tech
