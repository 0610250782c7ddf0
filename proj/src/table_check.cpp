#include "degenwave/table_check.hpp"

#include "degenwave/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace degenwave {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

struct RowResult {
    std::string row;
    std::string condition;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    std::string note;
    bool matched = false;
};

// s' >= s > threshold, reported as lhs = s against rhs = threshold.
RowResult equal_exponent_row(std::string row, std::string condition, double s, double s_prime, double threshold) {
    RowResult r{std::move(row), std::move(condition), s, threshold, false, "", true};
    r.holds = s_prime >= s && s > threshold;
    if (s_prime < s) r.note = "s' < s";
    return r;
}

RowResult nondissipative_row(const Symbol& g, double s, double sp) {
    const double b = g.beta();
    switch (g.kind()) {
        case SymbolKind::power:
            if (b > 1 && !near(b, 1.0))
                return equal_exponent_row("<xi>^beta, beta > 1", "s' = s > 3 + 3 beta / 2", s, sp, 3.0 + 1.5 * b);
            if (near(b, 1.0)) return {"<xi>", "s' > 9/2", sp, 4.5, sp > 4.5, "", true};
            if (b > 0) {
                const double lhs = sp / (1.0 - b);
                const double rhs = std::max(s + b * b / (2.0 * (1.0 - b)), 1.5 * (2.0 + b) / (1.0 - b));
                return {"<xi>^beta, beta < 1",
                        "s' / (1 - beta) > max(s + beta^2 / (2 (1 - beta)), 3 (2 + beta) / (2 (1 - beta)))", lhs, rhs,
                        lhs > rhs, "", true};
            }
            break;
        case SymbolKind::log:
            if (b > 0) return equal_exponent_row("log^beta(10 + |xi|), beta > 0", "s' = s > 3", s, sp, 3.0);
            break;
        case SymbolKind::loglog:
            if (b > 0 && near(g.alpha(), 1.0))
                return equal_exponent_row("log^beta(10 + log(10 + |xi|)), beta > 0", "s' = s > 3", s, sp, 3.0);
            break;
        default:
            break;
    }
    return {};
}

// s' / (1 - d) > s + beta d / (2 (1 - d)) with d = beta - alpha.
RowResult fractional_gap_row(std::string row, double b, double a, double s, double sp) {
    const double d = b - a;
    RowResult r{std::move(row), "s' / (1 - (beta - alpha)) > s + beta (beta - alpha) / (2 (1 - (beta - alpha)))",
                0.0, 0.0, false, "", true};
    if (!(d < 1)) {
        r.note = "1 - (beta - alpha) <= 0: the inequality is not defined";
        return r;
    }
    r.lhs = sp / (1.0 - d);
    r.rhs = s + b * d / (2.0 * (1.0 - d));
    r.holds = r.lhs > r.rhs;
    return r;
}

RowResult dissipative_row(const Symbol& g, const Symbol& u, double s, double sp) {
    const double b = g.beta(), a = u.beta();
    if (g.kind() == SymbolKind::power && u.kind() == SymbolKind::power && a < b) {
        if (near(b, 1.0)) {
            RowResult r{"<xi>, upsilon = <xi>^alpha, alpha < 1", "s' / alpha > s + (1 - alpha) / (2 alpha)", 0.0, 0.0,
                        false, "", true};
            if (!(a > 0)) {
                r.note = "alpha <= 0: the inequality is not defined";
                return r;
            }
            r.lhs = sp / a;
            r.rhs = s + (1.0 - a) / (2.0 * a);
            r.holds = r.lhs > r.rhs;
            return r;
        }
        if (b > 1) return fractional_gap_row("<xi>^beta, beta > 1, upsilon = <xi>^alpha, alpha < beta", b, a, s, sp);
        if (b > 0) return fractional_gap_row("<xi>^beta, beta < 1, upsilon = <xi>^alpha, alpha < beta", b, a, s, sp);
    }
    if (g.kind() == SymbolKind::log && u.kind() == SymbolKind::log && b > 0 && a < b) {
        RowResult r{"log^beta(10 + |xi|), upsilon = log^alpha(10 + |xi|), alpha < beta", "s' = s", sp, s, sp >= s,
                    "", true};
        if (sp < s) r.note = "s' < s";
        return r;
    }
    return {};
}

}  // namespace

TableVerdict table_verdict(const Symbol& gamma, const std::optional<Symbol>& upsilon, double s, double s_prime) {
    if (!std::isfinite(s) || !std::isfinite(s_prime)) fail(ErrorCode::input_domain, "exponents must be finite");
    TableVerdict v;
    v.query = {gamma.spec(), upsilon ? upsilon->spec() : "", s, s_prime};
    const RowResult base = nondissipative_row(gamma, s, s_prime);
    v.base_holds = base.matched && base.holds;
    const RowResult row = upsilon ? dissipative_row(gamma, *upsilon, s, s_prime) : base;
    if (!row.matched) {
        v.table = "none";
        v.note = upsilon ? "no dissipative row for this pair (no instability claim)"
                         : "no row for this multiplier (no instability claim)";
        return v;
    }
    v.table = upsilon ? "dissipative" : "nondissipative";
    v.row = row.row;
    v.condition = row.condition;
    v.lhs = row.lhs;
    v.rhs = row.rhs;
    v.row_holds = row.holds;
    v.unstable = v.row_holds && v.base_holds;
    v.note = row.note;
    if (upsilon && !base.matched) v.note = "no non-dissipative row for this multiplier";
    else if (upsilon && !base.holds) v.note = "non-dissipative restriction fails: " + base.condition;
    return v;
}

TableVerdict table_verdict(const TableQuery& q) {
    const Symbol g = Symbol::parse(q.gamma);
    std::optional<Symbol> u;
    if (!q.upsilon.empty()) u = Symbol::parse(q.upsilon);
    TableVerdict v = table_verdict(g, u, q.s, q.s_prime);
    v.query = q;
    return v;
}

std::vector<TableVerdict> table_check(const std::vector<TableQuery>& rows) {
    std::vector<TableVerdict> out;
    for (const TableQuery& q : rows) out.push_back(table_verdict(q));
    return out;
}

std::vector<TableQuery> parse_table_queries(const std::string& text) {
    std::vector<TableQuery> out;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::stringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() != 4)
            fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected '<gamma> <upsilon|-> <s> <s'>'");
        TableQuery q;
        q.gamma = tok[0];
        q.upsilon = tok[1] == "-" ? "" : tok[1];
        try {
            q.s = std::stod(tok[2]);
            q.s_prime = std::stod(tok[3]);
        } catch (const std::exception&) {
            fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": exponents must be numbers");
        }
        out.push_back(q);
    }
    return out;
}

std::string table_json(const std::vector<TableVerdict>& verdicts) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const TableVerdict& v : verdicts) {
        out.push_back({{"gamma", v.query.gamma},
                       {"upsilon", v.query.upsilon},
                       {"s", v.query.s},
                       {"s_prime", v.query.s_prime},
                       {"table", v.table},
                       {"row", v.row},
                       {"condition", v.condition},
                       {"lhs", v.lhs},
                       {"rhs", v.rhs},
                       {"row_holds", v.row_holds},
                       {"base_holds", v.base_holds},
                       {"unstable", v.unstable},
                       {"note", v.note}});
    }
    return out.dump(2) + "\n";
}

}  // namespace degenwave
