#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dyncenter::io {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative tolerance for X_i = sum_j Z_ij + F_i. Published tables are rounded.
inline constexpr double kRowBalanceTolerance = 1e-6;
/// Per-entry tolerance on (I - A) * B - I.
inline constexpr double kInverseTolerance = 1e-9;
/// A matrix is productive when its dominant eigenvalue is below 1 - this margin.
inline constexpr double kProductivityMargin = 1e-9;

/// Interindustry flow table: Z (sales from row sector to column sector),
/// final demand F and gross output X, all in one currency.
///
/// Instances only exist in a validated state; use IoTable::create or the
/// loaders below.
class IoTable {
public:
    static IoTable create(std::vector<std::string> sector_labels, Matrix flows, Vector final_demand,
                          Vector gross_output);

    Eigen::Index size() const noexcept { return flows_.rows(); }
    const std::vector<std::string>& sector_labels() const noexcept { return labels_; }
    const Matrix& flows() const noexcept { return flows_; }
    const Vector& final_demand() const noexcept { return final_demand_; }
    const Vector& gross_output() const noexcept { return gross_output_; }

private:
    IoTable(std::vector<std::string> labels, Matrix flows, Vector final_demand, Vector gross_output);

    std::vector<std::string> labels_;
    Matrix flows_;
    Vector final_demand_;
    Vector gross_output_;
};

/// Result of bracketing the dominant eigenvalue of a non-negative matrix.
struct SpectralBounds {
    double lower = 0.0;
    double upper = 0.0;
    int iterations = 0;
    bool productive = false;
};

/// Collatz-Wielandt bracketing by power iteration on A + I. The bounds are
/// rigorous for any non-negative A; iteration stops once they decide the
/// productivity question or the iteration budget is spent.
SpectralBounds dominant_eigenvalue_bounds(const Matrix& a, int max_iterations = 20000);

/// Technical coefficients a_ij = Z_ij / X_j. Always non-negative and productive.
class TechCoefMatrix {
public:
    /// Validates shape, non-negativity and productivity.
    static TechCoefMatrix from_matrix(Matrix a, std::vector<std::string> sector_labels = {});

    Eigen::Index size() const noexcept { return a_.rows(); }
    const Matrix& a() const noexcept { return a_; }
    const std::vector<std::string>& sector_labels() const noexcept { return labels_; }
    Vector row_sums() const { return a_.rowwise().sum(); }
    Vector col_sums() const { return a_.colwise().sum().transpose(); }
    const SpectralBounds& spectral_bounds() const noexcept { return bounds_; }

private:
    TechCoefMatrix(Matrix a, std::vector<std::string> labels, SpectralBounds bounds);

    Matrix a_;
    std::vector<std::string> labels_;
    SpectralBounds bounds_;
};

/// B = (I - A)^-1 together with the row/column sums used by linkage analysis.
class LeontiefInverse {
public:
    Eigen::Index size() const noexcept { return b_.rows(); }
    const Matrix& b() const noexcept { return b_; }
    const std::vector<std::string>& sector_labels() const noexcept { return labels_; }
    const Vector& row_sums() const noexcept { return row_sums_; }
    const Vector& col_sums() const noexcept { return col_sums_; }
    /// (1/n^2) * sum_ij b_ij
    double overall_mean() const noexcept { return overall_mean_; }
    /// max |(I - A) B - I| measured at construction.
    double residual() const noexcept { return residual_; }

private:
    friend LeontiefInverse leontief_inverse(const TechCoefMatrix& a);
    LeontiefInverse(Matrix b, std::vector<std::string> labels, double residual);

    Matrix b_;
    std::vector<std::string> labels_;
    Vector row_sums_;
    Vector col_sums_;
    double overall_mean_ = 0.0;
    double residual_ = 0.0;
};

/// Parses the table CSV format:
///   sector,<label_1>,...,<label_n>,final_demand,gross_output
///   <label_i>,Z_i1,...,Z_in,F_i,X_i
/// Errors carry line/column coordinates. `source` names the input in messages.
IoTable parse_io_table(std::string_view csv_text, std::string_view source = "<input>");
IoTable load_io_table(const std::filesystem::path& path);
std::string format_io_table_csv(const IoTable& table);

TechCoefMatrix technical_coefficients(const IoTable& table);

/// LU with partial pivoting plus one refinement step.
LeontiefInverse leontief_inverse(const TechCoefMatrix& a);

}  // namespace dyncenter::io
