#pragma once

#include "degenwave/symbols.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degenwave {

struct TableQuery {
    std::string gamma;    // symbol spec, e.g. "power:1.5"
    std::string upsilon;  // empty for the non-dissipative table
    double s = 0.0;
    double s_prime = 0.0;
};

struct TableVerdict {
    TableQuery query;
    std::string table;      // "nondissipative", "dissipative" or "none"
    std::string row;        // matched row label
    std::string condition;  // inequality of the matched row
    double lhs = 0.0;
    double rhs = 0.0;
    bool row_holds = false;   // the matched row's inequality
    bool base_holds = false;  // the non-dissipative row for the same gamma
    bool unstable = false;    // row_holds and base_holds
    std::string note;
};

// Rows written "s' = s" are evaluated as s' >= s.
TableVerdict table_verdict(const Symbol& gamma, const std::optional<Symbol>& upsilon, double s, double s_prime);
TableVerdict table_verdict(const TableQuery& q);
std::vector<TableVerdict> table_check(const std::vector<TableQuery>& rows);

// One query per line: "<gamma> <upsilon|-> <s> <s'>"; '#' starts a comment.
std::vector<TableQuery> parse_table_queries(const std::string& text);

std::string table_json(const std::vector<TableVerdict>& verdicts);

}  // namespace degenwave
