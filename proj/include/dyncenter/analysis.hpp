#pragma once

#include "dyncenter/io_core.hpp"
#include "dyncenter/linkage.hpp"
#include "dyncenter/structure.hpp"

namespace dyncenter {

/// Everything derived from one flow table. The CLI and the service both go
/// through run_table_analysis so their outputs agree byte for byte.
struct TableAnalysis {
    io::TechCoefMatrix a;
    io::LeontiefInverse b;
    linkage::LinkageReport linkage;
    structure::StructureReport structure;
};

TableAnalysis run_table_analysis(const io::IoTable& table,
                                 const structure::StructureOptions& options = {},
                                 const linkage::KeySectorRule& rule = {});

}  // namespace dyncenter
