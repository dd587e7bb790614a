#pragma once

#include "dyncenter/io_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dyncenter::linkage {

using io::Vector;

/// Thresholds for the "relatively low variation" clause of the key-sector
/// test. An unset threshold falls back to the median of the respective V.
struct KeySectorRule {
    std::optional<double> backward_threshold;
    std::optional<double> forward_threshold;
};

struct KeySectorFlags {
    std::vector<bool> flags;
    double backward_threshold = 0.0;
    double forward_threshold = 0.0;
};

struct VariationCoefficients {
    Vector backward;  // per column of B
    Vector forward;   // per row of B
};

struct LinkageReport {
    std::vector<std::string> sector_labels;
    Vector u_backward;  // power of dispersion, U_j
    Vector u_forward;   // sensitivity of dispersion, U_i
    Vector v_backward;
    Vector v_forward;
    std::vector<bool> key_sector;
    double v_threshold_backward = 0.0;
    double v_threshold_forward = 0.0;
};

/// U_j = (b_.j / n) / (sum_ij b_ij / n^2). Averages to exactly 1.
Vector power_of_dispersion(const io::LeontiefInverse& b);

/// U_i = (b_i. / n) / (sum_ij b_ij / n^2).
Vector sensitivity_of_dispersion(const io::LeontiefInverse& b);

/// Sample coefficient of variation (divisor n - 1) of each column and row of B.
VariationCoefficients variation_coefficients(const io::LeontiefInverse& b);

/// Sector i is key iff both U exceed 1 strictly and both V are at or below
/// their thresholds.
KeySectorFlags key_sectors(const Vector& u_backward, const Vector& u_forward,
                           const Vector& v_backward, const Vector& v_forward,
                           const KeySectorRule& rule = {});

LinkageReport analyze(const io::LeontiefInverse& b, const KeySectorRule& rule = {});

/// Median; the mean of the two middle values for even sizes.
double median(const Vector& v);

/// Columns: sector,U_backward,U_forward,V_backward,V_forward,key_sector (6 decimals).
std::string format_linkage_csv(const LinkageReport& report);

}  // namespace dyncenter::linkage
