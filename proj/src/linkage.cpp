#include "dyncenter/linkage.hpp"

#include "dyncenter/csv_util.hpp"
#include "dyncenter/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dyncenter::linkage {

namespace {

double sample_cv(const Eigen::Ref<const Vector>& line) {
    const auto n = static_cast<double>(line.size());
    const double mean = line.mean();
    if (!(mean > 0.0)) throw NumericalError("coefficient of variation undefined for zero mean");
    const double ss = (line.array() - mean).square().sum();
    return std::sqrt(ss / (n - 1.0)) / mean;
}

}  // namespace

Vector power_of_dispersion(const io::LeontiefInverse& b) {
    const auto n = static_cast<double>(b.size());
    return (b.col_sums() / n) / b.overall_mean();
}

Vector sensitivity_of_dispersion(const io::LeontiefInverse& b) {
    const auto n = static_cast<double>(b.size());
    return (b.row_sums() / n) / b.overall_mean();
}

VariationCoefficients variation_coefficients(const io::LeontiefInverse& b) {
    const Eigen::Index n = b.size();
    if (n < 2) throw ValidationError("b", "variation needs at least 2 sectors");
    VariationCoefficients v{Vector(n), Vector(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        v.backward(k) = sample_cv(b.b().col(k));
        v.forward(k) = sample_cv(b.b().row(k).transpose());
    }
    return v;
}

double median(const Vector& v) {
    if (v.size() == 0) throw ValidationError("v", "median of empty vector");
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    return sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

KeySectorFlags key_sectors(const Vector& u_backward, const Vector& u_forward,
                           const Vector& v_backward, const Vector& v_forward,
                           const KeySectorRule& rule) {
    const Eigen::Index n = u_backward.size();
    if (u_forward.size() != n || v_backward.size() != n || v_forward.size() != n) {
        throw ValidationError("linkage", "U and V vectors must have equal length");
    }
    KeySectorFlags out;
    out.backward_threshold = rule.backward_threshold.value_or(median(v_backward));
    out.forward_threshold = rule.forward_threshold.value_or(median(v_forward));
    out.flags.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        out.flags[static_cast<std::size_t>(i)] =
            u_backward(i) > 1.0 && u_forward(i) > 1.0 &&
            v_backward(i) <= out.backward_threshold && v_forward(i) <= out.forward_threshold;
    }
    return out;
}

LinkageReport analyze(const io::LeontiefInverse& b, const KeySectorRule& rule) {
    LinkageReport r;
    r.sector_labels = b.sector_labels();
    r.u_backward = power_of_dispersion(b);
    r.u_forward = sensitivity_of_dispersion(b);
    auto v = variation_coefficients(b);
    r.v_backward = std::move(v.backward);
    r.v_forward = std::move(v.forward);
    auto key = key_sectors(r.u_backward, r.u_forward, r.v_backward, r.v_forward, rule);
    r.key_sector = std::move(key.flags);
    r.v_threshold_backward = key.backward_threshold;
    r.v_threshold_forward = key.forward_threshold;
    return r;
}

std::string format_linkage_csv(const LinkageReport& report) {
    std::string out = "sector,U_backward,U_forward,V_backward,V_forward,key_sector\n";
    for (std::size_t i = 0; i < report.sector_labels.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", csv_escape(report.sector_labels[i]),
                           report.u_backward(k), report.u_forward(k), report.v_backward(k),
                           report.v_forward(k), report.key_sector[i] ? "true" : "false");
    }
    return out;
}

}  // namespace dyncenter::linkage
