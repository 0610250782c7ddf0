#include "degenwave/toymodel.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace degenwave;
using degenwave::test::rel_err;

namespace {

struct Data {
    std::vector<double> grid;
    std::vector<cplx> values;
};

Data gaussian(double l0, std::size_t points = 2049) {
    Data d;
    toy_gaussian_data(l0, points, d.grid, d.values);
    return d;
}

}  // namespace

TEST_CASE("flow: identity at t = 0 and constant speed for a unit symbol") {
    const Symbol g = Symbol::power(1.0);
    CHECK(toy_flow(g, 64.0, 70.0, 0.0) == 70.0);
    const Symbol one = Symbol::constant(1.0);
    for (double t : {0.01, 0.5}) CHECK(toy_flow(one, 64.0, 70.0, t) == doctest::Approx(70.0 + 64.0 * t).epsilon(1e-12));
}

// Forward Euler at dt = 1e-6 and 5e-7, Richardson-combined to remove the O(dt) error.
TEST_CASE("flow matches a brute-force Euler oracle") {
    const Symbol g = Symbol::power(1.0);
    const double l0 = 64.0, T = 1.0 / l0;
    auto euler = [&](double dt) {
        double xi = l0;
        const auto steps = static_cast<std::size_t>(std::llround(T / dt));
        for (std::size_t i = 0; i < steps; ++i) xi += dt * l0 * g.radial(std::sqrt(l0 * l0 + xi * xi));
        return xi;
    };
    const double oracle = 2.0 * euler(5e-7) - euler(1e-6);
    CHECK(rel_err(toy_flow(g, l0, l0, T), oracle) < 1e-6);
    CHECK(toy_travel_time(g, l0, l0, toy_flow(g, l0, l0, T)) == doctest::Approx(T).epsilon(1e-9));
}

TEST_CASE("solve at t = 0 is the identity on samples") {
    const Symbol g = Symbol::power(1.0);
    const Data d = gaussian(64.0, 257);
    const ToyState s = toy_solve(g, 64.0, d.grid, d.values, 0.0);
    CHECK(s.xi_t == d.grid);
    for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(std::abs(s.values[i] - d.values[i]) == 0.0);
    for (double j : s.jacobian) CHECK(j == 1.0);
}

TEST_CASE("gamma-weighted energy is conserved along the flow") {
    const Symbol g = Symbol::power(1.0);
    const double l0 = 64.0;
    const Data d = gaussian(l0);
    const double T = toy_travel_time(g, l0, l0, 4.0 * l0);
    const double e0 = toy_energy(g, toy_solve(g, l0, d.grid, d.values, 0.0));
    for (double f : {0.25, 0.5, 1.0}) CHECK(rel_err(toy_energy(g, toy_solve(g, l0, d.grid, d.values, f * T)), e0) < 1e-6);
}

TEST_CASE("L2 norm follows the gamma^{-1/2} law within a factor two") {
    const Symbol g = Symbol::power(1.0);
    const double l0 = 64.0;
    const Data d = gaussian(l0);
    const double T = toy_travel_time(g, l0, l0, 4.0 * l0);
    std::vector<ToyState> states;
    for (double f : {0.0, 0.5, 1.0}) states.push_back(toy_solve(g, l0, d.grid, d.values, f * T));
    const ToyReport r = hs_growth_report(g, states, 0.0, 0.0, 0.0);
    for (const ToyReportRow& row : r.rows) {
        const double law = std::pow(g.radial(std::hypot(l0, row.xi_peak)) / g.radial(std::hypot(l0, l0)), -0.5);
        const double ratio = (row.l2 / r.rows[0].l2) / law;
        CHECK(ratio >= 0.5);
        CHECK(ratio <= 2.0);
        CHECK(row.hs == doctest::Approx(row.l2));
    }
}

TEST_CASE("H^1 ratio at xi(T) = 4 lambda0 is the closed form") {
    const Symbol g = Symbol::power(1.0);
    const double l0 = 64.0;
    const Data d = gaussian(l0);
    const double T = toy_travel_time(g, l0, l0, 4.0 * l0);
    const ToyReport r = hs_growth_report(g, {toy_solve(g, l0, d.grid, d.values, 0.0), toy_solve(g, l0, d.grid, d.values, T)},
                                         1.0, 1.0, 0.0);
    const double closed = std::pow(4.0 * l0, 2) * g.radial(l0) / (l0 * l0 * g.radial(4.0 * l0));
    CHECK(r.rows[1].xi_peak == doctest::Approx(4.0 * l0).epsilon(1e-9));
    CHECK(r.rows[1].ratio == doctest::Approx(closed).epsilon(1e-9));
    CHECK(r.rows[1].ratio == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("dissipative solve") {
    const Symbol g = Symbol::log(1.0);
    const double l0 = 64.0;
    const Data d = gaussian(l0, 513);
    const double T = toy_travel_time(g, l0, l0, 4.0 * l0);

    const ToyState plain = toy_solve(g, l0, d.grid, d.values, T);
    const ToyState zero = toy_solve_dissipative(g, {Symbol::power(0.5), 0.0}, l0, d.grid, d.values, T);
    for (std::size_t i = 0; i < plain.values.size(); ++i) CHECK(std::abs(zero.values[i] - plain.values[i]) == 0.0);

    const double kappa = 0.3;
    const ToyState unit = toy_solve_dissipative(g, {Symbol::constant(1.0), kappa}, l0, d.grid, d.values, T);
    for (double w : unit.damping) CHECK(w == doctest::Approx(std::exp(-kappa * l0 * T)).epsilon(1e-9));

    const ToyState same = toy_solve_dissipative(g, {g, 1.0}, l0, d.grid, d.values, T);
    for (std::size_t i = 0; i < plain.values.size(); ++i) CHECK(std::abs(same.values[i]) <= std::abs(plain.values[i]));

    const ToyState strong = toy_solve_dissipative(g, {Symbol::power(0.5), 1.0}, l0, d.grid, d.values, T);
    const ToyState start = toy_solve(g, l0, d.grid, d.values, 0.0);
    const double l2_0 = toy_weighted_norm(start, 0.0), hs_0 = toy_weighted_norm(start, 1.0);
    const double l2_T = toy_weighted_norm(strong, 0.0), hs_T = toy_weighted_norm(strong, 1.0);
    CHECK((hs_T * hs_T) / (hs_0 * hs_0) <= 1.0);
    CHECK(l2_T < l2_0);
}
