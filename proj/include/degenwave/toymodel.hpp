#pragma once

#include "degenwave/numerics.hpp"
#include "degenwave/symbols.hpp"

#include <optional>
#include <vector>

namespace degenwave {

// Fourier-side toy model  lambda0^{-1} d_t phi + gamma(Lambda) d_xi phi = -gamma'(Lambda) (xi / Lambda) phi
// (optionally - kappa upsilon(Lambda) phi), Lambda(xi) = sqrt(lambda0^2 + xi^2), gamma radial.
struct ToyState {
    double t = 0.0;
    double lambda0 = 0.0;
    std::vector<double> xi0_grid;      // initial abscissae (sorted)
    std::vector<double> xi_t;          // flowed abscissae xi(t; xi0)
    std::vector<cplx> values;          // phi(t, xi(t; xi0))
    std::vector<double> jacobian;      // d xi(t; xi0) / d xi0 from the variational equation
    std::vector<double> damping;       // exp(-kappa lambda0 int upsilon dt'), 1 without dissipation

    double Lambda(double xi) const { return std::sqrt(lambda0 * lambda0 + xi * xi); }
};

struct ToyDissipation {
    Symbol upsilon;
    double kappa = 0.0;
};

// xi(t; xi0) for xi' = lambda0 gamma(Lambda(xi)).
double toy_flow(const Symbol& gamma, double lambda0, double xi0, double t);

// Time for the characteristic from xi_from to reach xi_to (quadrature of 1 / (lambda0 gamma(Lambda))).
double toy_travel_time(const Symbol& gamma, double lambda0, double xi_from, double xi_to);

ToyState toy_solve(const Symbol& gamma, double lambda0, const std::vector<double>& xi0_grid,
                   const std::vector<cplx>& initial, double t);

ToyState toy_solve_dissipative(const Symbol& gamma, const ToyDissipation& diss, double lambda0,
                               const std::vector<double>& xi0_grid, const std::vector<cplx>& initial, double t);

// Gaussian bump of width lambda0 / 20 centred at lambda0 on `points` samples covering +-8 widths.
void toy_gaussian_data(double lambda0, std::size_t points, std::vector<double>& xi0_grid, std::vector<cplx>& values);

// int gamma(Lambda(xi)) |phi(t, xi)|^2 d xi, trapezoid in xi0 with the stored Jacobian.
double toy_energy(const Symbol& gamma, const ToyState& state);
// (int |xi|^{2s} |phi|^2 d xi)^{1/2}, same quadrature.
double toy_weighted_norm(const ToyState& state, double s);

struct ToyReportRow {
    double t = 0.0;
    double xi_peak = 0.0;        // xi(t; lambda0)
    double l2 = 0.0;
    double hs = 0.0;
    double hs_prime = 0.0;
    double ratio = 0.0;          // |xi(t)|^{2s} / gamma(xi(t)) over lambda0^{2s} / gamma(lambda0)
    double ratio_sharp = 0.0;    // (|xi(t)| / lambda0)^{2s} gamma(Lambda0) / gamma(Lambda(t))
    double measured_growth = 0.0;  // (hs(t) / hs(0))^2
    double losing_ratio = 0.0;   // ratio with s replaced by s - loss_rate t
};

struct ToyReport {
    double s = 0.0;
    double s_prime = 0.0;
    double loss_rate = 0.0;
    std::vector<ToyReportRow> rows;
};

// States must share xi0_grid; states[0] is the reference for measured growth.
ToyReport hs_growth_report(const Symbol& gamma, const std::vector<ToyState>& states, double s, double s_prime,
                           double loss_rate);

}  // namespace degenwave
