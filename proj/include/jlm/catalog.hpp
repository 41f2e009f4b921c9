#pragma once

#include <string>
#include <vector>

#include "jlm/sysfile.hpp"

namespace jlm {

struct CatalogEntry {
    std::string name;
    std::string text;  // system-definition source, parseable by parse_system_file
};

/// Built-in example systems, in canonical order.
const std::vector<CatalogEntry>& catalog();

/// nullptr when absent.
const CatalogEntry* catalog_find(const std::string& name);

/// Parsed form of a catalog entry.
SystemFile catalog_load(const std::string& name);

}  // namespace jlm
