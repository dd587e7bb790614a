#include "dyncenter/structure.hpp"

#include "dyncenter/csv_util.hpp"
#include "dyncenter/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dyncenter::structure {

std::string_view to_string(Orientation o) {
    return o == Orientation::Rows ? "rows" : "columns";
}

std::string_view to_string(EntropyVariant v) {
    return v == EntropyVariant::IntermediateOnly ? "intermediate-only" : "with-final-demand";
}

std::string_view to_string(ShareSource s) {
    return s == ShareSource::TechnicalCoefficients ? "technical-coefficients" : "leontief-inverse";
}

std::string_view to_string(EntropyUnits u) {
    switch (u) {
        case EntropyUnits::Nats: return "nats";
        case EntropyUnits::Bits: return "bits";
        case EntropyUnits::Normalized: return "normalized";
    }
    return "nats";
}

EntropyVariant parse_entropy_variant(std::string_view text) {
    if (text == "intermediate-only") return EntropyVariant::IntermediateOnly;
    if (text == "with-final-demand") return EntropyVariant::WithFinalDemand;
    throw ValidationError("variant", fmt::format("unknown entropy variant '{}' (expected "
                                                 "intermediate-only or with-final-demand)",
                                                 text));
}

ShareSource parse_share_source(std::string_view text) {
    if (text == "technical-coefficients" || text == "a") return ShareSource::TechnicalCoefficients;
    if (text == "leontief-inverse" || text == "b") return ShareSource::LeontiefInverse;
    throw ValidationError("source", fmt::format("unknown share source '{}'", text));
}

EntropyUnits parse_entropy_units(std::string_view text) {
    if (text == "nats") return EntropyUnits::Nats;
    if (text == "bits") return EntropyUnits::Bits;
    if (text == "normalized") return EntropyUnits::Normalized;
    throw ValidationError("units", fmt::format("unknown entropy units '{}'", text));
}

NormalizedShares normalize(const Matrix& source, Orientation orientation, bool allow_zero_lines) {
    const Matrix lines_src = orientation == Orientation::Rows ? source : Matrix(source.transpose());
    NormalizedShares out;
    out.orientation = orientation;
    out.lines = Matrix::Zero(lines_src.rows(), lines_src.cols());
    out.excluded.assign(static_cast<std::size_t>(lines_src.rows()), false);
    for (Eigen::Index k = 0; k < lines_src.rows(); ++k) {
        if ((lines_src.row(k).array() < 0.0).any()) {
            throw ValidationError(fmt::format("{}[{}]", to_string(orientation), k + 1),
                                  "shares need non-negative entries");
        }
        const double total = lines_src.row(k).sum();
        if (!(total > 0.0)) {
            if (!allow_zero_lines) {
                throw ValidationError(fmt::format("{}[{}]", to_string(orientation), k + 1),
                                      "all-zero line cannot be normalized");
            }
            out.excluded[static_cast<std::size_t>(k)] = true;
            continue;
        }
        out.lines.row(k) = lines_src.row(k) / total;
    }
    return out;
}

NormalizedShares normalize(const io::TechCoefMatrix& a, Orientation orientation,
                           bool allow_zero_lines) {
    return normalize(a.a(), orientation, allow_zero_lines);
}

NormalizedShares normalize(const io::LeontiefInverse& b, Orientation orientation,
                           bool allow_zero_lines) {
    return normalize(b.b(), orientation, allow_zero_lines);
}

NormalizedShares normalize_with_final_demand(const io::IoTable& table) {
    const Eigen::Index n = table.size();
    NormalizedShares out;
    out.orientation = Orientation::Rows;
    out.includes_final_demand = true;
    out.lines.resize(n, n + 1);
    out.excluded.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = table.gross_output()(i);
        out.lines.row(i).head(n) = table.flows().row(i) / x;
        out.lines(i, n) = table.final_demand()(i) / x;
    }
    return out;
}

double concentration_g(std::span<const double> line) {
    const auto m = static_cast<double>(line.size());
    double sum_sq = 0.0;
    for (double c : line) sum_sq += c * c;
    const double g2 = m * (1.0 - sum_sq);
    return std::clamp(std::sqrt(std::max(0.0, g2)), 0.0, std::sqrt(m - 1.0));
}

double entropy(std::span<const double> line) {
    double h = 0.0;
    for (double c : line) {
        if (c > 0.0) h -= c * std::log(c);
    }
    return std::clamp(h, 0.0, std::log(static_cast<double>(line.size())));
}

namespace {

template <typename F>
std::vector<std::optional<double>> per_line(const NormalizedShares& shares, F&& f) {
    std::vector<std::optional<double>> out(static_cast<std::size_t>(shares.line_count()));
    std::vector<double> buf(static_cast<std::size_t>(shares.line_length()));
    for (Eigen::Index k = 0; k < shares.line_count(); ++k) {
        if (shares.excluded[static_cast<std::size_t>(k)]) continue;
        for (Eigen::Index j = 0; j < shares.line_length(); ++j) {
            buf[static_cast<std::size_t>(j)] = shares.lines(k, j);
        }
        out[static_cast<std::size_t>(k)] = f(std::span<const double>(buf));
    }
    return out;
}

}  // namespace

std::vector<std::optional<double>> concentration_g(const NormalizedShares& shares) {
    return per_line(shares, [](std::span<const double> l) { return concentration_g(l); });
}

std::vector<std::optional<double>> entropy(const NormalizedShares& shares) {
    return per_line(shares, [](std::span<const double> l) { return entropy(l); });
}

double rescale_entropy(double h_nats, EntropyUnits units, Eigen::Index line_length) {
    switch (units) {
        case EntropyUnits::Nats: return h_nats;
        case EntropyUnits::Bits: return h_nats / std::log(2.0);
        case EntropyUnits::Normalized:
            return line_length > 1 ? h_nats / std::log(static_cast<double>(line_length)) : 0.0;
    }
    return h_nats;
}

namespace {

bool tied(const std::optional<double>& a, const std::optional<double>& b) {
    if (!a || !b) return a.has_value() == b.has_value();
    const double scale = std::max({std::abs(*a), std::abs(*b), 1.0});
    return std::abs(*a - *b) <= kRankTieTolerance * scale;
}

}  // namespace

std::vector<double> descending_ranks(std::span<const std::optional<double>> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Present values first, largest first; missing values last.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a].has_value() != values[b].has_value()) return values[a].has_value();
        if (!values[a]) return false;
        return *values[a] > *values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && tied(values[order[end]], values[order[start]])) ++end;
        // Positions start..end-1 hold rank start+1..end; share the mean.
        const double avg = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t k = start; k < end; ++k) ranks[order[k]] = avg;
        start = end;
    }
    return ranks;
}

std::vector<double> descending_ranks(const Vector& values) {
    std::vector<std::optional<double>> wrapped(values.data(), values.data() + values.size());
    return descending_ranks(wrapped);
}

GeneralIndex general_index(const Vector& u, std::span<const std::optional<double>> g,
                           double alpha_rank_weight) {
    if (!(alpha_rank_weight >= 0.0 && alpha_rank_weight <= 1.0)) {
        throw ValidationError("alpha_rank_weight",
                              fmt::format("must lie in [0, 1], got {}", alpha_rank_weight));
    }
    if (static_cast<std::size_t>(u.size()) != g.size()) {
        throw ValidationError("g", fmt::format("expected {} entries, got {}", u.size(), g.size()));
    }
    GeneralIndex out;
    out.alpha_rank_weight = alpha_rank_weight;
    out.ranks_u = descending_ranks(u);
    out.ranks_g = descending_ranks(g);
    out.gi.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        // Same blend written so that equal rankings reproduce RU exactly.
        out.gi[i] = out.ranks_u[i] + alpha_rank_weight * (out.ranks_g[i] - out.ranks_u[i]);
    }
    return out;
}

GeneralIndex general_index(const Vector& u, const Vector& g, double alpha_rank_weight) {
    std::vector<std::optional<double>> wrapped(g.data(), g.data() + g.size());
    return general_index(u, wrapped, alpha_rank_weight);
}

StructureReport analyze(const io::IoTable& table, const io::TechCoefMatrix& a,
                        const io::LeontiefInverse& b, const linkage::LinkageReport& linkage,
                        const StructureOptions& options) {
    const Matrix& source =
        options.source == ShareSource::TechnicalCoefficients ? a.a() : b.b();
    if (options.variant == EntropyVariant::WithFinalDemand &&
        options.source != ShareSource::TechnicalCoefficients) {
        throw ValidationError("variant",
                              "with-final-demand entropy is defined on the flow table, not on the "
                              "Leontief inverse");
    }
    const auto rows = normalize(source, Orientation::Rows);
    const auto cols = normalize(source, Orientation::Columns);

    StructureReport r;
    r.sector_labels = table.sector_labels();
    r.alpha_rank_weight = options.alpha_rank_weight;
    r.entropy_variant = options.variant;
    r.source = options.source;
    r.g_row = concentration_g(rows);
    r.g_col = concentration_g(cols);
    if (options.variant == EntropyVariant::WithFinalDemand) {
        const auto with_fd = normalize_with_final_demand(table);
        r.h_row = entropy(with_fd);
        r.h_row_line_length = with_fd.line_length();
    } else {
        r.h_row = entropy(rows);
        r.h_row_line_length = rows.line_length();
    }
    r.h_col = entropy(cols);
    r.h_col_line_length = cols.line_length();
    r.backward = general_index(linkage.u_backward, r.g_col, options.alpha_rank_weight);
    r.forward = general_index(linkage.u_forward, r.g_row, options.alpha_rank_weight);
    return r;
}

namespace {

std::string header_comment(const StructureReport& r, EntropyUnits units, bool with_gi) {
    std::string out = fmt::format("# entropy_variant={} entropy_units={} share_source={}",
                                  to_string(r.entropy_variant), to_string(units),
                                  to_string(r.source));
    if (with_gi) {
        out += fmt::format(" alpha_rank_weight={} gi_backward=RU,RG,GI "
                           "gi_forward=RU_forward,RG_forward,GI_forward",
                           r.alpha_rank_weight);
    }
    return out + "\n";
}

std::optional<double> scaled(std::optional<double> h, EntropyUnits units, Eigen::Index m) {
    if (!h) return std::nullopt;
    return rescale_entropy(*h, units, m);
}

}  // namespace

std::string format_structure_csv(const StructureReport& r, EntropyUnits units) {
    std::string out = header_comment(r, units, true);
    out += "sector,G_row,G_col,H_row,H_col,RU,RG,GI,RU_forward,RG_forward,GI_forward\n";
    for (std::size_t i = 0; i < r.sector_labels.size(); ++i) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", csv_escape(r.sector_labels[i]),
                           csv_number(r.g_row[i]), csv_number(r.g_col[i]),
                           csv_number(scaled(r.h_row[i], units, r.h_row_line_length)),
                           csv_number(scaled(r.h_col[i], units, r.h_col_line_length)),
                           csv_number(r.backward.ranks_u[i]), csv_number(r.backward.ranks_g[i]),
                           csv_number(r.backward.gi[i]), csv_number(r.forward.ranks_u[i]),
                           csv_number(r.forward.ranks_g[i]), csv_number(r.forward.gi[i]));
    }
    return out;
}

std::string format_entropy_csv(const StructureReport& r, EntropyUnits units) {
    std::string out = header_comment(r, units, false);
    out += "sector,H_row,H_col\n";
    for (std::size_t i = 0; i < r.sector_labels.size(); ++i) {
        out += fmt::format("{},{},{}\n", csv_escape(r.sector_labels[i]),
                           csv_number(scaled(r.h_row[i], units, r.h_row_line_length)),
                           csv_number(scaled(r.h_col[i], units, r.h_col_line_length)));
    }
    return out;
}

}  // namespace dyncenter::structure
