#include "degenwave/symbols.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace degenwave;
using degenwave::test::error_code_of;
using degenwave::test::rel_err;

TEST_CASE("catalog values at closed-form points") {
    CHECK(Symbol::power(1.0)(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(Symbol::power(2.0)(3.0, 4.0) == doctest::Approx(26.0).epsilon(1e-14));
    CHECK(Symbol::log(1.0)(0.0, 0.0) == doctest::Approx(std::log(10.0)).epsilon(1e-14));
    CHECK(Symbol::loglog(1.0)(0.0, 0.0) == doctest::Approx(std::log(10.0 + std::log(10.0))).epsilon(1e-14));
    CHECK(Symbol::explog(1.0, 0.5)(0.0, 0.0) == doctest::Approx(std::exp(std::sqrt(std::log(10.0)))).epsilon(1e-14));
}

TEST_CASE("first partials and evenness") {
    CHECK(Symbol::power(1.0).partial(0, 1, 0.0, 3.0) == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-14));
    CHECK(Symbol::log(1.0).partial(0, 1, 0.0, 0.0) == 0.0);
    const Symbol g = Symbol::power(1.5);
    CHECK(g(2.0, -7.0) == doctest::Approx(g(2.0, 7.0)).epsilon(1e-15));
    CHECK(g.partial(0, 1, 2.0, -7.0) == doctest::Approx(-g.partial(0, 1, 2.0, 7.0)).epsilon(1e-14));
}

// Richardson-extrapolated central differences, fourth order in h.
template <typename F>
double fd_second(F&& f, double x, double h) {
    auto d = [&](double k) { return (f(x + k) - 2.0 * f(x) + f(x - k)) / (k * k); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

template <typename F>
double fd_first(F&& f, double x, double h) {
    auto d = [&](double k) { return (f(x + k) - f(x - k)) / (2.0 * k); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

TEST_CASE("partials match a finite-difference oracle") {
    for (SymbolKind kind : {SymbolKind::power, SymbolKind::log, SymbolKind::loglog, SymbolKind::explog}) {
        const Symbol g = kind == SymbolKind::power    ? Symbol::power(1.0)
                         : kind == SymbolKind::log    ? Symbol::log(1.0)
                         : kind == SymbolKind::loglog ? Symbol::loglog(1.0)
                                                      : Symbol::explog(1.0, 0.5);
        for (double l0 : {32.0, 256.0}) {
            for (double l : {40.0, 300.0, 5000.0}) {
                const double h = 1e-2 * l;
                const double fd2 = fd_second([&](double x) { return g(l0, x); }, l, h);
                CHECK(rel_err(g.partial(0, 2, l0, l), fd2) < 1e-6);
                const double fd1 = fd_first([&](double x) { return g(x, l); }, l0, 1e-2 * l0);
                CHECK(rel_err(g.partial(1, 0, l0, l), fd1) < 1e-6);
            }
        }
    }
}

TEST_CASE("xi2_derivatives agrees with partial") {
    const Symbol g = Symbol::log(2.0);
    double d[5];
    g.xi2_derivatives(64.0, 200.0, 4, d);
    for (int n = 0; n <= 4; ++n) CHECK(d[n] == doctest::Approx(g.partial(0, n, 64.0, 200.0)).epsilon(1e-13));
    CHECK(error_code_of([&] { g.partial(5, 0, 1.0, 1.0); }) == ErrorCode::capability);
}

TEST_CASE("restricted inverse") {
    // <(3, xi)> = 5 gives xi^2 = 25 - 1 - 9.
    CHECK(RestrictedSymbol(Symbol::power(1.0), 3.0).inverse(5.0) == doctest::Approx(std::sqrt(15.0)).epsilon(1e-14));
    for (const Symbol& g : {Symbol::power(1.0), Symbol::power(0.5), Symbol::log(1.0), Symbol::loglog(1.0)}) {
        const double l0 = 64.0;
        const RestrictedSymbol r(g, l0);
        for (double x = l0; x <= 100 * l0; x *= 1.37) CHECK(std::abs(r.inverse(r(x)) - x) <= 1e-9 * x);
    }
    const RestrictedSymbol below(Symbol::power(1.0), 3.0);
    CHECK(error_code_of([&] { below.inverse(1.0); }) == ErrorCode::domain);
}

TEST_CASE("log inverse matches a dense monotone table") {
    const RestrictedSymbol r(Symbol::log(1.0), 64.0);
    std::vector<double> xs, ys;
    for (double x = 64.0; x <= 64.0 * 200; x *= 1.0001) {
        xs.push_back(x);
        ys.push_back(r(x));
    }
    for (double y : {r(100.0), r(1000.0), r(7777.0)}) {
        const auto it = std::lower_bound(ys.begin(), ys.end(), y);
        const std::size_t i = static_cast<std::size_t>(it - ys.begin());
        const double w = (y - ys[i - 1]) / (ys[i] - ys[i - 1]);
        const double table = xs[i - 1] + w * (xs[i] - xs[i - 1]);
        CHECK(rel_err(r.inverse(y), table) < 1e-8);
    }
}

TEST_CASE("assumption checks on the sample grid") {
    const ValidationReport bracket = validate_assumptions(Symbol::power(1.0));
    CHECK(bracket.assumption4_ok);
    CHECK(bracket.all_ok());
    const ValidationReport sq = validate_assumptions(Symbol::power(2.0));
    CHECK(sq.beta0_measured >= 2.0 - 1e-12);
    CHECK(sq.beta0_measured <= 2.01);
    CHECK(Symbol::power(2.0).beta0() == doctest::Approx(estimate_beta0(Symbol::power(2.0), 10.0, 1048576.0)));
    const ValidationReport flat = validate_assumptions(Symbol::constant(2.0));
    CHECK_FALSE(flat.growth_ok);
    CHECK(flat.growth_min_ratio == doctest::Approx(1.0));
    CHECK_FALSE(flat.all_ok());
}

TEST_CASE("spec grammar") {
    CHECK(Symbol::parse("power:2.0").kind() == SymbolKind::power);
    CHECK(Symbol::parse("power:2.0").beta() == 2.0);
    CHECK(Symbol::parse("explog:1,0.5").alpha() == 0.5);
    CHECK(Symbol::parse("loglog:1").alpha() == 1.0);
    for (const char* spec : {"power:1.5", "log:1", "loglog:2,0.5", "explog:1,0.5"}) {
        const Symbol s = Symbol::parse(spec);
        const Symbol t = Symbol::parse(s.spec());
        CHECK(t(3.0, 40.0) == s(3.0, 40.0));
    }
    CHECK(error_code_of([] { Symbol::parse("power"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { Symbol::parse("cubic:1"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { Symbol::parse("power:x"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { Symbol::parse("power:1,2,3"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { Symbol::parse("power:-1"); }) == ErrorCode::parameter);
}

TEST_CASE("custom symbols use the user partials") {
    const Symbol c = Symbol::custom("sq", [](int n1, int n2, double a, double b) {
        if (n1 == 0 && n2 == 0) return 1.0 + a * a + b * b;
        if (n1 == 0 && n2 == 1) return 2.0 * b;
        if (n1 == 0 && n2 == 2) return 2.0;
        if (n1 == 1 && n2 == 0) return 2.0 * a;
        if (n1 == 2 && n2 == 0) return 2.0;
        return 0.0;
    });
    CHECK(c(3.0, 4.0) == 26.0);
    CHECK(c.partial(0, 1, 3.0, 4.0) == 8.0);
    CHECK(c.beta0() == doctest::Approx(2.0).epsilon(0.02));
}
