#include "degenwave/amplitude.hpp"

#include "degenwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace degenwave {

namespace {

// d^n/du^n bump(u) for n <= 2.
double bump_derivative(int n, double u) {
    const double w = 1.0 - u * u;
    if (!(w > 0)) return 0.0;
    const double b = bump(u);
    if (n == 0) return b;
    const double g = -2.0 * u / (w * w);
    if (n == 1) return b * g;
    return b * (g * g - 2.0 / (w * w) - 8.0 * u * u / (w * w * w));
}

}  // namespace

double bump_normalization() {
    static const double c = [] {
        // int_0^1 bump(2y - 1)^2 dy = (1/2) int_{-1}^{1} bump(u)^2 du
        const double m = 0.5 * integrate([](double u) { return bump(u) * bump(u); }, -1.0, 1.0, 1e-14);
        return 1.0 / std::sqrt(m);
    }();
    return c;
}

double InitialAmplitude::operator()(double x) const { return derivative(0, x); }

double InitialAmplitude::derivative(int n, double x) const {
    if (n < 0 || n > 2) fail(ErrorCode::capability, "initial amplitude derivatives are supported up to order 2");
    const double w = x1p - x0p;
    const double u = 2.0 * (x - x0p) / w - 1.0;
    return bump_normalization() / std::sqrt(w) * std::pow(2.0 / w, n) * bump_derivative(n, u);
}

InitialAmplitude initial_amplitude(const Window& window) {
    if (!(window.x1p > window.x0p)) fail(ErrorCode::parameter, "amplitude support needs x0' < x1'");
    return {window.x0p, window.x1p};
}

double transport_coefficient(const Symbol& gamma, const ShearProfile& shear, double lambda0, double t, double x,
                             double xi, double ddphi) {
    const SymbolJet j = symbol_jet(gamma, shear, lambda0, t, x, xi);
    return 0.5 * j.p_xixi * ddphi + j.sub;
}

AmplitudeField evolve_amplitude(const PhaseField& fan, double t_star) {
    if (fan.t.empty() || fan.t.back() < t_star * (1.0 - 1e-12))
        fail(ErrorCode::horizon, "the fan does not reach t_star");
    AmplitudeField af;
    af.t = fan.t;
    af.x_launch = fan.x_launch;
    af.a0 = initial_amplitude(fan.window);
    af.values.resize(fan.rays.size());
    af.zeroth_order_log.resize(fan.rays.size());
    for (std::size_t i = 0; i < fan.rays.size(); ++i) {
        const Bicharacteristic& r = fan.rays[i];
        const double a0 = af.a0(fan.x_launch[i]);
        for (std::size_t j = 0; j < fan.t.size(); ++j) {
            af.values[i].push_back(a0 * std::exp(r.log_amp[j]));
            af.zeroth_order_log[i].push_back(-r.log_amp[j]);
        }
    }
    return af;
}

std::vector<double> l2_budget(const AmplitudeField& af, const PhaseField& fan) {
    std::vector<double> out;
    std::vector<double> y(fan.rays.size());
    for (std::size_t j = 0; j < fan.t.size(); ++j) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double a = af.values[i][j];
            y[i] = a * a * std::exp(fan.rays[i].log_jacobian[j]);
        }
        out.push_back(std::sqrt(trapezoid(fan.x_launch, y)));
    }
    return out;
}

DerivativeEnvelope derivative_envelope(const AmplitudeField& af, const PhaseField& fan, std::size_t j) {
    const std::size_t n = fan.rays.size();
    std::vector<double> a(n), jac(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = af.values[i][j];
        jac[i] = std::exp(fan.rays[i].log_jacobian[j]);
    }
    const double h = fan.x_launch[1] - fan.x_launch[0];
    std::vector<double> d1 = uniform_derivative(a, h);
    for (std::size_t i = 0; i < n; ++i) d1[i] /= jac[i];
    std::vector<double> d2 = uniform_derivative(d1, h);
    for (std::size_t i = 0; i < n; ++i) d2[i] /= jac[i];
    DerivativeEnvelope env;
    for (std::size_t i = 0; i < n; ++i) {
        env.d1 = std::max(env.d1, std::abs(d1[i]));
        env.d2 = std::max(env.d2, std::abs(d2[i]));
    }
    return env;
}

AmplitudeGrid amplitude_on_grid(const AmplitudeField& af, const PhaseField& fan, std::size_t j, std::size_t n) {
    if (j >= fan.t.size()) fail(ErrorCode::input_domain, "amplitude sample index out of range");
    const std::size_t m = fan.rays.size();
    std::vector<double> X(m), inv_jac(m), log_amp(m);
    for (std::size_t i = 0; i < m; ++i) {
        X[i] = fan.rays[i].X[j];
        inv_jac[i] = std::exp(-fan.rays[i].log_jacobian[j]);
        log_amp[i] = fan.rays[i].log_amp[j];
    }
    const HermiteCurve launch_of(X, fan.x_launch, inv_jac);
    const HermiteCurve log_amp_of = make_fd_hermite(fan.x_launch, log_amp);
    const double lo = fan.image(j, af.a0.x0p), hi = fan.image(j, af.a0.x1p);
    const double centre = 0.5 * (X.front() + X.back());

    AmplitudeGrid out;
    out.t = fan.t[j];
    out.x.resize(n);
    out.a.assign(n, 0.0);
    const double dx = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.x[k] = dx * static_cast<double>(k);
        const double y = circle_representative(out.x[k], centre);
        if (!(y > lo && y < hi)) continue;
        const double xl = launch_of(y);
        out.a[k] = af.a0(xl) * std::exp(log_amp_of(xl));
    }
    return out;
}

}  // namespace degenwave
