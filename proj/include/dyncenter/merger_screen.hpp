#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dyncenter::merger {

inline constexpr double kUnconcentratedBelow = 1500.0;
inline constexpr double kHighlyConcentratedAbove = 2500.0;
inline constexpr double kSmallChangeBelow = 100.0;
inline constexpr double kPresumptionAbove = 200.0;
inline constexpr double kShareSumSlack = 1e-9;

enum class MarketClass { Unconcentrated, ModeratelyConcentrated, HighlyConcentrated };
enum class Action { NoFurtherAnalysis, PotentialConcernScrutiny, PresumedEnhancesMarketPower };

std::string_view to_string(MarketClass c);
std::string_view to_string(Action a);

/// Percentage shares (0..100) of the firms in one market, plus the pair of
/// firms that intend to merge (0-based indices).
struct MergerScenario {
    std::vector<double> shares;
    std::pair<std::size_t, std::size_t> merging{0, 1};
    /// Shares are analyst projections (potential entrant) rather than observed.
    bool projected_shares = false;
};

void validate(const MergerScenario& s);

struct HhiVerdict {
    double pre_hhi = 0.0;
    double delta_hhi = 0.0;
    double post_hhi = 0.0;
    double coverage = 0.0;  // sum of listed shares
    MarketClass market_class = MarketClass::Unconcentrated;
    Action action = Action::NoFurtherAnalysis;
    std::string rule;           // which row of the guideline table fired
    std::string boundary_note;  // how Delta = 100 / 200 are treated
    bool projected_shares = false;
};

/// Sum of squared percentage shares.
double hhi(std::span<const double> shares);

/// Increase in HHI from merging two firms: 2 * s_a * s_b.
double delta_hhi(double share_a, double share_b);

/// Market class from a post-merger HHI: < 1500, [1500, 2500], > 2500.
MarketClass classify_market(double post_hhi);

/// Guideline action for a post-merger class and HHI increase. Delta = 100
/// counts as scrutiny-eligible; Delta = 200 is scrutiny, not presumption.
Action guideline_action(MarketClass post_class, double delta);

HhiVerdict screen(const MergerScenario& scenario);

/// Share list after the merging pair is combined into the first index.
std::vector<double> merged_shares(const MergerScenario& scenario);

}  // namespace dyncenter::merger
