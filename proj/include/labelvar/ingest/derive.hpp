#pragma once

#include <span>
#include <string>
#include <string_view>

#include "labelvar/core/dataset.hpp"

namespace labelvar::ingest {

enum class TiePolicy { positive, negative, missing };

std::string_view to_string(TiePolicy policy);
TiePolicy parse_tie_policy(std::string_view text);

std::string agree_count_column(std::string_view subtype);
std::string agree_prop_column(std::string_view subtype);
std::string consensus_column(std::string_view subtype);

// Adds agree_count_<subtype> (annotators labelling 1) and agree_prop_<subtype>
// (count over annotators with a non-missing label; missing when none). Throws
// SchemaError when the subtype has no annotation columns.
Dataset derive_agreement(const Dataset& dataset, std::string_view subtype);

// Adds consensus_<subtype>: strict majority over non-missing labels, exact ties
// resolved by the policy, all-missing rows missing.
Dataset derive_consensus(const Dataset& dataset, std::string_view subtype, TiePolicy tie_policy = TiePolicy::positive);

// Same vote restricted to a subset of annotators, written to column_name.
Dataset derive_consensus(const Dataset& dataset, std::string_view subtype, TiePolicy tie_policy,
                         std::span<const std::string> annotators, std::string column_name);

// Agreement (and consensus, when absent) for every annotated subtype.
Dataset derive_all(const Dataset& dataset, TiePolicy tie_policy = TiePolicy::positive);

}  // namespace labelvar::ingest
