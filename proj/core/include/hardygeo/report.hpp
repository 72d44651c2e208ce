#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "hardygeo/domains.hpp"
#include "hardygeo/hardyopt.hpp"

namespace hardygeo {

// Reports use ordered JSON so identical inputs serialize byte-identically.
// No wall-clock fields anywhere: reports must not vary between runs.
using Json = nlohmann::ordered_json;

Json domain_json(const DomainSpec& spec);
Json grid_json(const Grid& grid);
Json remainder_table_json(const RemainderTable& table);

// Report schema: domain, grid?, p, q?, kind, value, lower_bounds?, table?,
// iterations, seed, tolerances, flags.
Json make_report(const DomainSpec& spec, const Grid* grid,
                 const QuotientReport& rep, const Json& tolerances,
                 const Json* lower_bounds = nullptr, const Json* table = nullptr);

std::string dump_report(const Json& j);
void write_report(const std::string& path, const Json& j);

}  // namespace hardygeo
