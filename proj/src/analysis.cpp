#include "dyncenter/analysis.hpp"

namespace dyncenter {

TableAnalysis run_table_analysis(const io::IoTable& table,
                                 const structure::StructureOptions& options,
                                 const linkage::KeySectorRule& rule) {
    auto a = io::technical_coefficients(table);
    auto b = io::leontief_inverse(a);
    auto link = linkage::analyze(b, rule);
    link.sector_labels = table.sector_labels();
    auto st = structure::analyze(table, a, b, link, options);
    return TableAnalysis{std::move(a), std::move(b), std::move(link), std::move(st)};
}

}  // namespace dyncenter
