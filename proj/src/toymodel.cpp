#include "degenwave/toymodel.hpp"

#include "degenwave/errors.hpp"

#include <cmath>

namespace degenwave {

namespace {

constexpr double kXiHorizon = 1e12;

// State: xi, Jacobian d xi / d xi0, and int upsilon(Lambda(xi)) dt.
OdeRhs toy_rhs(const Symbol& gamma, const Symbol* upsilon, double lambda0) {
    return [&gamma, upsilon, lambda0](const OdeState& x, OdeState& dx, double) {
        const double xi = x[0];
        if (!(std::abs(xi) < kXiHorizon)) fail(ErrorCode::horizon, "toy characteristic left |xi| < 1e12");
        const double L = std::sqrt(lambda0 * lambda0 + xi * xi);
        double d[2];
        gamma.xi2_derivatives(0.0, L, 1, d);
        dx[0] = lambda0 * d[0];
        dx[1] = lambda0 * d[1] * (xi / L) * x[1];
        dx[2] = upsilon ? (*upsilon)(0.0, L) : 0.0;
    };
}

ToyState solve_impl(const Symbol& gamma, const ToyDissipation* diss, double lambda0, const std::vector<double>& grid,
                    const std::vector<cplx>& initial, double t) {
    if (!(t >= 0) || !std::isfinite(t)) fail(ErrorCode::input_domain, "toy solve needs t >= 0");
    if (grid.size() != initial.size() || grid.empty()) fail(ErrorCode::input_domain, "toy data and grid sizes differ");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(initial[i].real()) || !std::isfinite(initial[i].imag()))
            fail(ErrorCode::input_domain, "toy initial data must be finite");
        if (i > 0 && !(grid[i] > grid[i - 1])) fail(ErrorCode::input_domain, "toy grid must be strictly increasing");
    }
    ToyState st;
    st.t = t;
    st.lambda0 = lambda0;
    st.xi0_grid = grid;
    st.xi_t.resize(grid.size());
    st.values.resize(grid.size());
    st.jacobian.resize(grid.size());
    st.damping.resize(grid.size());
    const Symbol* ups = diss && diss->kappa > 0 ? &diss->upsilon : nullptr;
    const double kappa = diss ? diss->kappa : 0.0;
    parallel_for(grid.size(), [&](std::size_t i) {
        OdeState x{grid[i], 1.0, 0.0};
        integrate_ode(toy_rhs(gamma, ups, lambda0), x, 0.0, t, {1e-13, 1e-13});
        const double g0 = gamma.radial(st.Lambda(grid[i]));
        const double gt = gamma.radial(st.Lambda(x[0]));
        st.xi_t[i] = x[0];
        st.jacobian[i] = x[1];
        st.damping[i] = std::exp(-kappa * lambda0 * x[2]);
        st.values[i] = (g0 / gt) * st.damping[i] * initial[i];
    });
    return st;
}

}  // namespace

double toy_flow(const Symbol& gamma, double lambda0, double xi0, double t) {
    if (!(t >= 0)) fail(ErrorCode::input_domain, "toy flow needs t >= 0");
    OdeState x{xi0, 1.0, 0.0};
    integrate_ode(toy_rhs(gamma, nullptr, lambda0), x, 0.0, t, {1e-13, 1e-13});
    return x[0];
}

double toy_travel_time(const Symbol& gamma, double lambda0, double xi_from, double xi_to) {
    return integrate(
        [&](double xi) { return 1.0 / (lambda0 * gamma.radial(std::sqrt(lambda0 * lambda0 + xi * xi))); }, xi_from,
        xi_to, 1e-14);
}

ToyState toy_solve(const Symbol& gamma, double lambda0, const std::vector<double>& xi0_grid,
                   const std::vector<cplx>& initial, double t) {
    return solve_impl(gamma, nullptr, lambda0, xi0_grid, initial, t);
}

ToyState toy_solve_dissipative(const Symbol& gamma, const ToyDissipation& diss, double lambda0,
                               const std::vector<double>& xi0_grid, const std::vector<cplx>& initial, double t) {
    if (!(diss.kappa >= 0)) fail(ErrorCode::parameter, "kappa must be nonnegative");
    return solve_impl(gamma, &diss, lambda0, xi0_grid, initial, t);
}

void toy_gaussian_data(double lambda0, std::size_t points, std::vector<double>& xi0_grid, std::vector<cplx>& values) {
    if (points < 3) fail(ErrorCode::input_domain, "toy data needs at least three points");
    const double w = lambda0 / 20.0;
    xi0_grid.resize(points);
    values.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double xi = lambda0 - 8 * w + 16 * w * static_cast<double>(i) / (points - 1);
        xi0_grid[i] = xi;
        const double u = (xi - lambda0) / w;
        values[i] = std::exp(-0.5 * u * u);
    }
}

double toy_energy(const Symbol& gamma, const ToyState& st) {
    std::vector<double> y(st.xi0_grid.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = gamma.radial(st.Lambda(st.xi_t[i])) * std::norm(st.values[i]) * st.jacobian[i];
    return trapezoid(st.xi0_grid, y);
}

double toy_weighted_norm(const ToyState& st, double s) {
    std::vector<double> y(st.xi0_grid.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = std::pow(std::abs(st.xi_t[i]), 2 * s) * std::norm(st.values[i]) * st.jacobian[i];
    return std::sqrt(trapezoid(st.xi0_grid, y));
}

ToyReport hs_growth_report(const Symbol& gamma, const std::vector<ToyState>& states, double s, double s_prime,
                           double loss_rate) {
    ToyReport rep;
    rep.s = s;
    rep.s_prime = s_prime;
    rep.loss_rate = loss_rate;
    if (states.empty()) return rep;
    const double lambda0 = states.front().lambda0;
    const double hs0 = toy_weighted_norm(states.front(), s);
    const double L0 = std::sqrt(2.0) * lambda0;
    for (const auto& st : states) {
        if (st.xi0_grid != states.front().xi0_grid) fail(ErrorCode::input_domain, "toy states must share the grid");
        ToyReportRow row;
        row.t = st.t;
        row.xi_peak = toy_flow(gamma, lambda0, lambda0, st.t);
        row.l2 = toy_weighted_norm(st, 0.0);
        row.hs = toy_weighted_norm(st, s);
        row.hs_prime = toy_weighted_norm(st, s_prime);
        const double xi = std::abs(row.xi_peak);
        row.ratio = (std::pow(xi, 2 * s) / gamma.radial(xi)) / (std::pow(lambda0, 2 * s) / gamma.radial(lambda0));
        row.ratio_sharp = std::pow(xi / lambda0, 2 * s) * gamma.radial(L0) /
                          gamma.radial(std::sqrt(lambda0 * lambda0 + xi * xi));
        row.measured_growth = hs0 > 0 ? std::pow(row.hs / hs0, 2) : 0.0;
        const double s_t = s - loss_rate * st.t;
        row.losing_ratio =
            (std::pow(xi, 2 * s_t) / gamma.radial(xi)) / (std::pow(lambda0, 2 * s) / gamma.radial(lambda0));
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace degenwave
