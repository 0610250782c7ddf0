#include "degenwave/harness.hpp"
#include "degenwave/table_check.hpp"

#include "table_oracle.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>

using namespace degenwave;
using degenwave::test::dissipative_oracle;
using degenwave::test::error_code_of;
using degenwave::test::nondissipative_oracle;

TEST_CASE("config text round trip") {
    const ExperimentConfig c = ExperimentConfig::parse(R"(
        # desk sweep
        gamma = "power:1.5"
        upsilon = "power:0.5"
        kappa = 0.25
        lambda0 = [32, 64]
        M = 8
        s_prime = 2
        params.delta0 = 0.008
        params.eps_mode = "theory"
        window = "ratio"
        seed = 42
        toy_T = 0.5
    )");
    CHECK(c.gamma == "power:1.5");
    CHECK(c.upsilon == "power:0.5");
    CHECK(c.kappa == 0.25);
    CHECK(c.lambda0 == std::vector<double>{32.0, 64.0});
    CHECK(c.M == 8.0);
    CHECK(c.s_prime == 2.0);
    CHECK(c.overrides.at("delta0") == 0.008);
    CHECK(c.eps_mode == "theory");
    CHECK(c.seed == 42);
    CHECK(c.toy_T == 0.5);
    const ExperimentConfig back = ExperimentConfig::parse(c.str());
    CHECK(back.str() == c.str());
}

TEST_CASE("config errors name the offending key") {
    CHECK(error_code_of([] { ExperimentConfig::parse("nonsense = 1"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { ExperimentConfig::parse("M = \"four\""); }) == ErrorCode::parse);
    CHECK(error_code_of([] { ExperimentConfig::parse("lambda0 = [32, "); }) == ErrorCode::parse);
    CHECK(error_code_of([] { ExperimentConfig::parse("gamma = \"power:1\" junk"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { ExperimentConfig::load("/nonexistent/degenwave.toml"); }) == ErrorCode::io);
    ExperimentConfig c;
    c.gamma = "nosuch:1";
    CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::parse);
    c = ExperimentConfig{};
    c.lambda0 = {64.0, 32.0};
    CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::configuration);
    c = ExperimentConfig{};
    c.M = 0.5;
    CHECK(error_code_of([&] { c.validate(); }).has_value());
    c = ExperimentConfig{};
    c.kappa = 1.0;
    CHECK(error_code_of([&] { c.validate(); }).has_value());
    CHECK_NOTHROW(ExperimentConfig{}.validate());
    try {
        ExperimentConfig::parse("bogus_key = 3");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("plan document restores its config") {
    ExperimentConfig c;
    c.lambda0 = {32.0, 64.0};
    c.M = 4.0;
    const std::string doc = plan_json(c);
    const auto j = nlohmann::json::parse(doc);
    CHECK(j["plans"].size() == 2);
    CHECK(j["pass"].is_boolean());
    CHECK(config_from_plan_json(doc).str() == c.str());
    CHECK(error_code_of([] { config_from_plan_json("{}"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { config_from_plan_json("not json"); }) == ErrorCode::parse);
}

TEST_CASE("dissipative config yields dissipative condition margins") {
    ExperimentConfig c;
    c.gamma = "power:1";
    c.upsilon = "power:0.5";
    c.kappa = 1.0;
    c.lambda0 = {1e4};
    const auto j = nlohmann::json::parse(plan_json(c));
    std::vector<std::string> names;
    for (const auto& cond : j["plans"][0]["conditions"]) {
        names.push_back(cond["name"]);
        CHECK(std::isfinite(cond["margin"].get<double>()));
    }
    CHECK(std::find(names.begin(), names.end(), "diss1") != names.end());
    CHECK(std::find(names.begin(), names.end(), "diss2") != names.end());
}

TEST_CASE("log-log slope") {
    const std::vector<double> x{32, 64, 128, 256};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.7));
    CHECK(loglog_slope(x, y) == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(error_code_of([] { loglog_slope({1.0}, {1.0}); }).has_value());
}

TEST_CASE("non-dissipative table rows") {
    for (double beta : {1.5, 2.0, 1.0, 0.5, 0.25}) {
        for (double s = 0.0; s <= 10.0; s += 0.5) {
            for (double sp = 0.0; sp <= 12.0; sp += 0.75) {
                const TableVerdict v = table_verdict(Symbol::power(beta), std::nullopt, s, sp);
                CHECK(v.table == "nondissipative");
                CHECK(v.row_holds == nondissipative_oracle("power", beta, s, sp));
                CHECK(v.unstable == v.row_holds);
            }
        }
    }
    for (const Symbol& g : {Symbol::log(1.0), Symbol::log(0.5), Symbol::loglog(2.0)}) {
        for (double s = 0.0; s <= 6.0; s += 0.5)
            for (double sp = 0.0; sp <= 6.0; sp += 0.5)
                CHECK(table_verdict(g, std::nullopt, s, sp).row_holds == nondissipative_oracle("log", 1.0, s, sp));
    }
    CHECK_FALSE(table_verdict(Symbol::log(1.0), std::nullopt, 4.0, 3.5).unstable);
    CHECK(table_verdict(Symbol::log(1.0), std::nullopt, 4.0, 4.0).unstable);
    CHECK(table_verdict(Symbol::constant(1.0), std::nullopt, 4.0, 4.0).table == "none");
}

TEST_CASE("dissipative table rows") {
    struct Pair {
        std::string kind;
        double beta, alpha;
    };
    const Pair pairs[] = {{"power", 1.5, 1.0}, {"power", 1.5, 0.8}, {"power", 1.0, 0.5}, {"power", 1.0, 0.25},
                          {"power", 0.5, 0.25}, {"power", 0.75, 0.1}, {"log", 1.0, 0.5}, {"log", 2.0, 1.0}};
    for (const Pair& p : pairs) {
        const Symbol g = p.kind == "log" ? Symbol::log(p.beta) : Symbol::power(p.beta);
        const Symbol u = p.kind == "log" ? Symbol::log(p.alpha) : Symbol::power(p.alpha);
        for (double s = 0.0; s <= 10.0; s += 0.5) {
            for (double sp = 0.0; sp <= 12.0; sp += 0.75) {
                const TableVerdict v = table_verdict(g, u, s, sp);
                CHECK(v.table == "dissipative");
                CHECK(v.row_holds == dissipative_oracle(p.kind, p.beta, p.alpha, s, sp));
                CHECK(v.base_holds == nondissipative_oracle(p.kind, p.beta, s, sp));
                CHECK(v.unstable == (v.row_holds && v.base_holds));
            }
        }
    }
    CHECK(table_verdict(Symbol::power(1.0), Symbol::power(1.5), 5.0, 5.0).table == "none");
    CHECK(table_verdict(Symbol::power(1.0), Symbol::log(1.0), 5.0, 5.0).table == "none");
}

TEST_CASE("worked table examples") {
    // gamma = <xi>^1.5, upsilon = <xi>: 2 s' > s + 0.75 at s = s' = 4.
    const TableVerdict v = table_verdict(Symbol::power(1.5), Symbol::power(1.0), 4.0, 4.0);
    CHECK(v.row_holds);
    CHECK(v.lhs == doctest::Approx(8.0));
    CHECK(v.rhs == doctest::Approx(4.75));
    CHECK_FALSE(v.base_holds);
    CHECK_FALSE(v.unstable);
    CHECK(table_verdict(Symbol::power(1.5), Symbol::power(1.0), 6.0, 6.0).unstable);
    // Very large s' with s satisfying the s-only restrictions.
    const Symbol catalog[] = {Symbol::power(1.5), Symbol::power(1.0), Symbol::power(0.5), Symbol::log(1.0),
                              Symbol::loglog(1.0)};
    for (const Symbol& g : catalog) CHECK(table_verdict(g, std::nullopt, 6.0, 1e6).unstable);
    CHECK(table_verdict(Symbol::power(1.5), Symbol::power(0.8), 6.0, 1e6).unstable);
    const TableVerdict gap = table_verdict(Symbol::power(1.5), Symbol::power(0.5), 6.0, 1e6);
    CHECK_FALSE(gap.unstable);
    CHECK(gap.note.find("not defined") != std::string::npos);
    CHECK(table_verdict(Symbol::power(1.0), Symbol::power(0.5), 6.0, 1e6).unstable);
    CHECK(table_verdict(Symbol::power(0.5), Symbol::power(0.25), 6.0, 1e6).unstable);
    CHECK(table_verdict(Symbol::log(1.0), Symbol::log(0.5), 6.0, 1e6).unstable);
    CHECK(error_code_of([] { table_verdict(Symbol::power(1.0), std::nullopt, NAN, 1.0); }) == ErrorCode::input_domain);
}

TEST_CASE("table query parsing and JSON") {
    const auto q = parse_table_queries("# header\npower:1.5 power:1 4 4\n\nlog:1 - 4 4  # trailing\n");
    REQUIRE(q.size() == 2);
    CHECK(q[0].upsilon == "power:1");
    CHECK(q[1].upsilon.empty());
    CHECK(q[1].s_prime == 4.0);
    const auto j = nlohmann::json::parse(table_json(table_check(q)));
    CHECK(j.size() == 2);
    CHECK(j[0]["row_holds"] == true);
    CHECK(j[0]["unstable"] == false);
    CHECK(j[1]["unstable"] == true);
    CHECK(error_code_of([] { parse_table_queries("power:1 - 4"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { parse_table_queries("power:1 - four 4"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { table_check(parse_table_queries("nosuch:1 - 4 4")); }) == ErrorCode::parse);
}

TEST_CASE("validate-symbol document") {
    const auto j = nlohmann::json::parse(validate_symbol_json("log:1"));
    CHECK(j["pass"] == true);
    CHECK(error_code_of([] { validate_symbol_json("power:"); }) == ErrorCode::parse);
}

TEST_CASE("identical configs give byte-identical reports") {
    ExperimentConfig c;
    c.lambda0 = {32.0};
    const SweepReport a = run(c);
    const SweepReport b = run(c);
    CHECK(report_json(a) == report_json(b));
    REQUIRE(a.points.size() == 1);
    CHECK(a.points[0].resolution >= 2048);
    CHECK_FALSE(series_csv(a.points[0]).empty());
    const auto j = nlohmann::json::parse(report_json(a));
    CHECK(j.dump().find("seconds") == std::string::npos);
}
