#pragma once

#include "dyncenter/merger_screen.hpp"
#include "dyncenter/tech_assessment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dyncenter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitUsage = 64;

/// Runs the dyncenter command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Text written by `hhi`, one `key: value` per line.
std::string format_verdict_text(const merger::HhiVerdict& verdict);
std::string format_hhi_text(double hhi, double coverage);
/// Text written by `tcc`.
std::string format_tcc_text(const tech::TechnologyProfile& profile);

}  // namespace dyncenter::cli
