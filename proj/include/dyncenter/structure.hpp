#pragma once

#include "dyncenter/io_core.hpp"
#include "dyncenter/linkage.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dyncenter::structure {

using io::Matrix;
using io::Vector;

enum class Orientation { Rows, Columns };
enum class EntropyVariant { IntermediateOnly, WithFinalDemand };
enum class ShareSource { TechnicalCoefficients, LeontiefInverse };
enum class EntropyUnits { Nats, Bits, Normalized };

std::string_view to_string(Orientation o);
std::string_view to_string(EntropyVariant v);
std::string_view to_string(ShareSource s);
std::string_view to_string(EntropyUnits u);
EntropyVariant parse_entropy_variant(std::string_view text);
ShareSource parse_share_source(std::string_view text);
EntropyUnits parse_entropy_units(std::string_view text);

/// Shares matrix with one normalized line per row. For column orientation,
/// row k holds the normalized column k of the source. Lines whose source is
/// all zero are flagged in `excluded` and left as zeros.
struct NormalizedShares {
    Orientation orientation = Orientation::Rows;
    bool includes_final_demand = false;
    Matrix lines;
    std::vector<bool> excluded;

    Eigen::Index line_count() const noexcept { return lines.rows(); }
    Eigen::Index line_length() const noexcept { return lines.cols(); }
};

/// Divides each row (or column) of a non-negative matrix by its sum.
/// Throws on an all-zero line unless `allow_zero_lines`.
NormalizedShares normalize(const Matrix& source, Orientation orientation,
                           bool allow_zero_lines = true);
NormalizedShares normalize(const io::TechCoefMatrix& a, Orientation orientation,
                           bool allow_zero_lines = true);
NormalizedShares normalize(const io::LeontiefInverse& b, Orientation orientation,
                           bool allow_zero_lines = true);

/// Row i becomes (Z_i1, ..., Z_in, F_i) / X_i: sales to processing sectors
/// and to final demand. Length n + 1; sums to 1 by the row balance.
NormalizedShares normalize_with_final_demand(const io::IoTable& table);

/// G = sqrt(m * (1 - sum c^2)) for a line of m shares. 0 for a one-hot line,
/// sqrt(m - 1) for a uniform one.
double concentration_g(std::span<const double> line);
std::vector<std::optional<double>> concentration_g(const NormalizedShares& shares);

/// Shannon entropy in nats with 0 * log 0 = 0.
double entropy(std::span<const double> line);
std::vector<std::optional<double>> entropy(const NormalizedShares& shares);

/// Converts nats to bits, or to H / ln(m) for a line of m shares.
double rescale_entropy(double h_nats, EntropyUnits units, Eigen::Index line_length);

/// Values this close (relative) count as tied when ranking, so that rounding
/// noise does not split sectors that are equal in exact arithmetic.
inline constexpr double kRankTieTolerance = 1e-12;

/// Ranks in descending order of magnitude: 1 = largest, ties share the
/// average rank. Missing values rank after every present value.
std::vector<double> descending_ranks(std::span<const std::optional<double>> values);
std::vector<double> descending_ranks(const Vector& values);

struct GeneralIndex {
    std::vector<double> gi;
    std::vector<double> ranks_u;
    std::vector<double> ranks_g;
    double alpha_rank_weight = 0.5;
};

/// GI = alpha * RG + (1 - alpha) * RU. Lower GI means a better-ranked sector.
GeneralIndex general_index(const Vector& u, std::span<const std::optional<double>> g,
                           double alpha_rank_weight);
GeneralIndex general_index(const Vector& u, const Vector& g, double alpha_rank_weight);

struct StructureOptions {
    ShareSource source = ShareSource::TechnicalCoefficients;
    EntropyVariant variant = EntropyVariant::IntermediateOnly;
    double alpha_rank_weight = 0.5;
};

/// G and H over both orientations plus GI for each linkage direction:
/// backward pairs U_backward with column concentration, forward pairs
/// U_forward with row concentration.
struct StructureReport {
    std::vector<std::string> sector_labels;
    std::vector<std::optional<double>> g_row;
    std::vector<std::optional<double>> g_col;
    std::vector<std::optional<double>> h_row;
    std::vector<std::optional<double>> h_col;
    Eigen::Index h_row_line_length = 0;
    Eigen::Index h_col_line_length = 0;
    GeneralIndex backward;
    GeneralIndex forward;
    double alpha_rank_weight = 0.5;
    EntropyVariant entropy_variant = EntropyVariant::IntermediateOnly;
    ShareSource source = ShareSource::TechnicalCoefficients;
};

StructureReport analyze(const io::IoTable& table, const io::TechCoefMatrix& a,
                        const io::LeontiefInverse& b, const linkage::LinkageReport& linkage,
                        const StructureOptions& options = {});

/// Columns: sector,G_row,G_col,H_row,H_col,RU,RG,GI (backward orientation)
/// followed by RU_forward,RG_forward,GI_forward. A leading comment line
/// records the entropy variant, units, share source and rank weight.
std::string format_structure_csv(const StructureReport& report,
                                 EntropyUnits units = EntropyUnits::Nats);

/// Columns: sector,H_row,H_col with the same header comment.
std::string format_entropy_csv(const StructureReport& report,
                               EntropyUnits units = EntropyUnits::Nats);

}  // namespace dyncenter::structure
