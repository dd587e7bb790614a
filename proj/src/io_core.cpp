#include "dyncenter/io_core.hpp"

#include "dyncenter/csv_util.hpp"
#include "dyncenter/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dyncenter::io {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no,
                                        std::string_view source) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
            was_quoted = true;
        } else if (ch == ',') {
            fields.push_back(was_quoted ? current : trim(current));
            current.clear();
            was_quoted = false;
        } else {
            current += ch;
        }
    }
    if (in_quotes) {
        throw ValidationError(fmt::format("{}:{}", source, line_no), "unterminated quoted field");
    }
    fields.push_back(was_quoted ? current : trim(current));
    return fields;
}

double parse_number(const std::string& text, std::size_t line_no, std::size_t col_no,
                    std::string_view source) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ValidationError(fmt::format("{}:{}:{}", source, line_no, col_no),
                              fmt::format("malformed number '{}'", text));
    }
    return value;
}

std::string sector_ref(const std::vector<std::string>& labels, Eigen::Index i) {
    return fmt::format("sector {} '{}'", i + 1, labels[static_cast<std::size_t>(i)]);
}

std::vector<std::string> deduplicate(std::vector<std::string> labels) {
    std::map<std::string, int> seen;
    for (const auto& l : labels) seen[l] = 0;
    std::map<std::string, int> count;
    for (auto& l : labels) {
        const int k = ++count[l];
        if (k == 1) continue;
        std::string candidate;
        int suffix = k;
        do {
            candidate = fmt::format("{} ({})", l, suffix++);
        } while (seen.count(candidate) != 0);
        seen[candidate] = 0;
        l = std::move(candidate);
    }
    return labels;
}

std::vector<std::string> default_labels(Eigen::Index n) {
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < n; ++i) labels.push_back(fmt::format("S{}", i + 1));
    return labels;
}

}  // namespace

IoTable::IoTable(std::vector<std::string> labels, Matrix flows, Vector final_demand,
                 Vector gross_output)
    : labels_(std::move(labels)),
      flows_(std::move(flows)),
      final_demand_(std::move(final_demand)),
      gross_output_(std::move(gross_output)) {}

IoTable IoTable::create(std::vector<std::string> sector_labels, Matrix flows, Vector final_demand,
                        Vector gross_output) {
    const Eigen::Index n = flows.rows();
    if (n < 2) throw ValidationError("flows", fmt::format("need at least 2 sectors, got {}", n));
    ErrorCollector errors;
    if (flows.cols() != n) {
        errors.add("flows", fmt::format("matrix must be square, got {}x{}", n, flows.cols()));
    }
    if (final_demand.size() != n) {
        errors.add("final_demand", fmt::format("expected {} entries, got {}", n, final_demand.size()));
    }
    if (gross_output.size() != n) {
        errors.add("gross_output", fmt::format("expected {} entries, got {}", n, gross_output.size()));
    }
    if (sector_labels.empty()) sector_labels = default_labels(n);
    if (static_cast<Eigen::Index>(sector_labels.size()) != n) {
        errors.add("sector_labels", fmt::format("expected {} labels, got {}", n, sector_labels.size()));
    }
    errors.throw_if_any();

    sector_labels = deduplicate(std::move(sector_labels));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double z = flows(i, j);
            if (!std::isfinite(z) || z < 0.0) {
                errors.add(fmt::format("flows[{}][{}]", i + 1, j + 1),
                           fmt::format("entry must be a non-negative number, got {}", z));
            }
        }
        if (!std::isfinite(final_demand(i)) || final_demand(i) < 0.0) {
            errors.add(fmt::format("final_demand[{}]", i + 1),
                       fmt::format("{}: must be non-negative, got {}", sector_ref(sector_labels, i),
                                   final_demand(i)));
        }
        if (!std::isfinite(gross_output(i)) || gross_output(i) <= 0.0) {
            errors.add(fmt::format("gross_output[{}]", i + 1),
                       fmt::format("{}: must be strictly positive, got {}",
                                   sector_ref(sector_labels, i), gross_output(i)));
        }
    }
    errors.throw_if_any();

    for (Eigen::Index i = 0; i < n; ++i) {
        const double uses = flows.row(i).sum() + final_demand(i);
        const double gap = gross_output(i) - uses;
        if (std::abs(gap) > kRowBalanceTolerance * gross_output(i)) {
            errors.add(fmt::format("row {}", i + 1),
                       fmt::format("{}: row balance violated, gross output {} but flows + final "
                                   "demand = {}",
                                   sector_ref(sector_labels, i), gross_output(i), uses));
        }
    }
    errors.throw_if_any();

    return IoTable(std::move(sector_labels), std::move(flows), std::move(final_demand),
                   std::move(gross_output));
}

SpectralBounds dominant_eigenvalue_bounds(const Matrix& a, int max_iterations) {
    const Eigen::Index n = a.rows();
    SpectralBounds bounds;
    Vector x = Vector::Ones(n);
    for (int it = 1; it <= max_iterations; ++it) {
        const Vector y = a * x;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = y(i) / x(i);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        bounds.lower = std::max(bounds.lower, lo);
        bounds.upper = it == 1 ? hi : std::min(bounds.upper, hi);
        bounds.iterations = it;
        if (bounds.upper < 1.0 - kProductivityMargin) {
            bounds.productive = true;
            return bounds;
        }
        if (bounds.lower >= 1.0 - kProductivityMargin) return bounds;
        // Shifting by I keeps every component positive and makes the
        // dominant eigenvalue strictly dominant in modulus.
        x = (x + y) / (x + y).maxCoeff();
    }
    return bounds;
}

TechCoefMatrix::TechCoefMatrix(Matrix a, std::vector<std::string> labels, SpectralBounds bounds)
    : a_(std::move(a)), labels_(std::move(labels)), bounds_(bounds) {}

TechCoefMatrix TechCoefMatrix::from_matrix(Matrix a, std::vector<std::string> sector_labels) {
    const Eigen::Index n = a.rows();
    if (n < 2 || a.cols() != n) {
        throw ValidationError("a", fmt::format("need a square matrix with n >= 2, got {}x{}", n,
                                               a.cols()));
    }
    if (sector_labels.empty()) sector_labels = default_labels(n);
    if (static_cast<Eigen::Index>(sector_labels.size()) != n) {
        throw ValidationError("sector_labels",
                              fmt::format("expected {} labels, got {}", n, sector_labels.size()));
    }
    ErrorCollector errors;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::isfinite(a(i, j)) || a(i, j) < 0.0) {
                errors.add(fmt::format("a[{}][{}]", i + 1, j + 1),
                           fmt::format("coefficient must be non-negative, got {}", a(i, j)));
            }
        }
    }
    errors.throw_if_any();

    const SpectralBounds bounds = dominant_eigenvalue_bounds(a);
    if (!bounds.productive) {
        throw NumericalError(fmt::format(
            "non-productive coefficient matrix: dominant eigenvalue in [{:.9f}, {:.9f}], must be "
            "below 1",
            bounds.lower, bounds.upper));
    }
    return TechCoefMatrix(std::move(a), deduplicate(std::move(sector_labels)), bounds);
}

LeontiefInverse::LeontiefInverse(Matrix b, std::vector<std::string> labels, double residual)
    : b_(std::move(b)), labels_(std::move(labels)), residual_(residual) {
    const auto n = static_cast<double>(b_.rows());
    row_sums_ = b_.rowwise().sum();
    col_sums_ = b_.colwise().sum().transpose();
    overall_mean_ = b_.sum() / (n * n);
}

TechCoefMatrix technical_coefficients(const IoTable& table) {
    const Eigen::Index n = table.size();
    Matrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double x = table.gross_output()(j);
        if (!(x > 0.0)) {
            throw ValidationError(fmt::format("gross_output[{}]", j + 1), "zero gross output");
        }
        a.col(j) = table.flows().col(j) / x;
    }
    return TechCoefMatrix::from_matrix(std::move(a), table.sector_labels());
}

LeontiefInverse leontief_inverse(const TechCoefMatrix& a) {
    const Eigen::Index n = a.size();
    const Matrix identity = Matrix::Identity(n, n);
    const Matrix m = identity - a.a();
    const Eigen::PartialPivLU<Matrix> lu(m);
    if (!(lu.rcond() > 1e-14)) {
        throw NumericalError(fmt::format("I - A is numerically singular (rcond {})", lu.rcond()));
    }
    Matrix b = lu.inverse();
    b += lu.solve(identity - m * b);

    const double residual = (m * b - identity).cwiseAbs().maxCoeff();
    if (!(residual < kInverseTolerance)) {
        throw NumericalError(
            fmt::format("Leontief inverse residual {} exceeds {}", residual, kInverseTolerance));
    }
    return LeontiefInverse(std::move(b), a.sector_labels(), residual);
}

IoTable parse_io_table(std::string_view csv_text, std::string_view source) {
    if (csv_text.substr(0, 3) == "\xEF\xBB\xBF") csv_text.remove_prefix(3);

    std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= csv_text.size()) {
        auto nl = csv_text.find('\n', pos);
        if (nl == std::string_view::npos) nl = csv_text.size();
        const std::string_view line = csv_text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        records.emplace_back(line_no, split_csv_line(line, line_no, source));
    }
    if (records.empty()) throw ValidationError(std::string(source), "empty table file");

    const auto& [header_line, header] = records.front();
    if (header.size() < 3 || header.front() != "sector" || header[header.size() - 2] != "final_demand" ||
        header.back() != "gross_output") {
        throw ValidationError(
            fmt::format("{}:{}", source, header_line),
            "header must be 'sector,<label_1>,...,<label_n>,final_demand,gross_output'");
    }
    const std::size_t n = header.size() - 3;
    if (n < 2) {
        throw ValidationError(fmt::format("{}:{}", source, header_line),
                              fmt::format("need at least 2 sectors, got {}", n));
    }
    if (records.size() - 1 != n) {
        throw ValidationError(std::string(source),
                              fmt::format("dimension mismatch: header declares {} sectors but {} "
                                          "data rows follow",
                                          n, records.size() - 1));
    }

    std::vector<std::string> labels(header.begin() + 1, header.begin() + 1 + static_cast<long>(n));
    Matrix flows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Vector final_demand(static_cast<Eigen::Index>(n));
    Vector gross_output(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const auto& [ln, fields] = records[r + 1];
        if (fields.size() != n + 3) {
            throw ValidationError(fmt::format("{}:{}", source, ln),
                                  fmt::format("dimension mismatch: expected {} fields, got {}",
                                              n + 3, fields.size()));
        }
        if (fields.front() != labels[r]) {
            throw ValidationError(fmt::format("{}:{}:1", source, ln),
                                  fmt::format("row label '{}' does not match header column '{}'",
                                              fields.front(), labels[r]));
        }
        const auto i = static_cast<Eigen::Index>(r);
        for (std::size_t c = 0; c < n; ++c) {
            flows(i, static_cast<Eigen::Index>(c)) = parse_number(fields[c + 1], ln, c + 2, source);
        }
        final_demand(i) = parse_number(fields[n + 1], ln, n + 2, source);
        gross_output(i) = parse_number(fields[n + 2], ln, n + 3, source);
    }
    return IoTable::create(std::move(labels), std::move(flows), std::move(final_demand),
                           std::move(gross_output));
}

IoTable load_io_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError(fmt::format("cannot open table file {}", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_io_table(buffer.str(), path.string());
}


std::string format_io_table_csv(const IoTable& table) {
    std::string out = "sector";
    for (const auto& l : table.sector_labels()) out += "," + csv_escape(l);
    out += ",final_demand,gross_output\n";
    for (Eigen::Index i = 0; i < table.size(); ++i) {
        out += csv_escape(table.sector_labels()[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < table.size(); ++j) out += fmt::format(",{}", table.flows()(i, j));
        out += fmt::format(",{},{}\n", table.final_demand()(i), table.gross_output()(i));
    }
    return out;
}

}  // namespace dyncenter::io
