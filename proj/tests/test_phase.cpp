#include "degenwave/phase.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace degenwave;
using degenwave::test::error_code_of;
using degenwave::test::rel_err;

namespace {

struct Setup {
    Symbol gamma = Symbol::power(1.0);
    ShearProfile shear = ShearProfile::cosine(1);
    AsymptoticParameters params;
    GrowthPlan plan;
    PhaseField fan;
};

std::vector<double> uniform(double t_end, std::size_t count) {
    std::vector<double> t(count + 1);
    for (std::size_t i = 0; i <= count; ++i) t[i] = t_end * double(i) / double(count);
    return t;
}

const Setup& steady_setup() {
    static const Setup s = [] {
        Setup out;
        out.params.derive(out.gamma.beta0());
        out.plan = make_plan(out.gamma, std::nullopt, out.shear, out.params, 64.0, 4.0);
        out.fan = build_phase(out.gamma, out.shear, out.params, 64.0, out.plan.eps, WindowSpec{},
                              uniform(out.plan.t_M, 64));
        return out;
    }();
    return s;
}

// Richardson-extrapolated central differences, fourth order in h.
template <typename F>
double fd_first(F&& f, double x, double h) {
    auto d = [&](double k) { return (f(x + k) - f(x - k)) / (2.0 * k); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

template <typename F>
double fd_second(F&& f, double x, double h) {
    auto d = [&](double k) { return (f(x + k) - 2.0 * f(x) + f(x - k)) / (k * k); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

}  // namespace

TEST_CASE("steady slope on a ratio window") {
    const Symbol g = Symbol::power(1.0);
    const double l0 = 64.0, eps = 0.1;
    const SteadySlope slope = steady_phase_slope(g, ShearProfile::cosine(1), l0, eps, WindowSpec{});
    const Window& w = slope.window;
    CHECK(slope(w.x1) == doctest::Approx((1.0 + eps / 2.0) * l0).epsilon(1e-13));
    CHECK(w.x0 == doctest::Approx(0.5 * eps));
    CHECK(w.x0 < w.x0p);
    CHECK(w.x0p < w.x1p);
    CHECK(w.x1p < w.x1);
    double prev = slope(w.x0);
    for (int i = 1; i <= 1024; ++i) {
        const double x = w.x0 + w.width() * i / 1024.0;
        const double v = slope(x);
        CHECK(v < prev);
        CHECK(v >= l0);
        CHECK(v <= (1.0 + eps) * l0);
        // p(0, x, slope(x)) = -lambda0 E
        CHECK(rel_err(symbol_jet(g, ShearProfile::cosine(1), l0, 0.0, x, v).p, -l0 * slope.E) < 1e-10);
        prev = v;
    }
}

TEST_CASE("window specs") {
    CHECK(WindowSpec::parse("ratio").mode == WindowMode::ratio);
    CHECK(WindowSpec::parse("ratio:0.25").c_x0 == 0.25);
    const WindowSpec s = WindowSpec::parse("span:0.85,1.75");
    CHECK(s.mode == WindowMode::span);
    CHECK(s.x1 == 1.75);
    CHECK(WindowSpec::parse(s.str()).x0 == 0.85);
    CHECK(error_code_of([] { WindowSpec::parse("span:1"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { WindowSpec::parse("wide"); }) == ErrorCode::parse);
    const Window w = make_window(Symbol::power(1.0), 64.0, 0.1, s);
    CHECK(w.x0p == doctest::Approx(0.85 + 0.3));
    CHECK(w.x1p == doctest::Approx(0.85 + 0.6));
}

TEST_CASE("steady fan: h stays zero and the Hamiltonian is conserved") {
    const Setup& s = steady_setup();
    REQUIRE(s.plan.admissible());
    for (const Bicharacteristic& r : s.fan.rays) {
        CHECK(r.h.front() == 0.0);
        const double p0 = r.hamiltonian.front();
        for (std::size_t j = 0; j < r.t.size(); ++j) {
            CHECK(std::abs(r.h[j]) < 1e-10);
            CHECK(std::abs(r.hamiltonian[j] - p0) <= 1e-8 * std::abs(p0));
        }
    }
}

TEST_CASE("steady fan: sign structure, sandwich and position bounds") {
    const Setup& s = steady_setup();
    const RestrictedSymbol g(s.gamma, 64.0);
    const double factor = std::pow(2.0, s.gamma.beta0() + 1.0);
    for (const Bicharacteristic& r : s.fan.rays) {
        for (std::size_t j = 1; j < r.t.size(); ++j) {
            CHECK(r.X[j] < r.X[j - 1]);
            CHECK(r.Xi[j] > r.Xi[j - 1]);
            const double lam = s.fan.lambda_t[j];
            CHECK(r.Xi[j] >= lam * (1 - 1e-9));
            CHECK(r.Xi[j] <= 2.0 * lam * (1 + 1e-9));
            const double ref = r.X[0] * g(64.0) / g(lam);
            CHECK(r.X[j] >= ref / factor);
            CHECK(r.X[j] <= ref * factor);
        }
    }
    check_no_crossing(s.fan);
}

TEST_CASE("h equation right-hand side") {
    const Symbol g = Symbol::power(1.0);
    const ShearProfile steady = ShearProfile::cosine(1);
    CHECK(h_rhs(g, steady, 64.0, 0.3, 0.05, 70.0, 0.0) == 0.0);

    // Single decaying mode: p = lambda0 e^{-ct} (-sin x) (gamma(lambda0, xi) - gamma(0, 1)) separates in t,
    // so the source term s vanishes.
    const double l0 = 64.0;
    const ShearProfile single = ShearProfile::cosine(1, 1.0, 1.0, g);
    CHECK(std::abs(h_rhs(g, single, l0, 0.0, 0.05, 70.0, 0.0)) < 1e-12);

    // Two decaying modes f = cos x + cos(2x) / 2 against a finite-difference oracle on p.
    const double c1 = g(0.0, 1.0), c2 = g(0.0, 2.0);
    const ShearProfile diss({{1, cplx(0.5)}, {2, cplx(0.25)}}, 1.0, g);
    auto p = [&](double t, double x, double xi) {
        return l0 * (std::exp(-c1 * t) * -std::sin(x) * (g(l0, xi) - g(0.0, 1.0)) +
                     std::exp(-c2 * t) * -std::sin(2 * x) * (g(l0, xi) - g(0.0, 2.0)));
    };
    const double t = 0.0, x = 0.05, xi = 70.0, hx = 1e-3, hxi = 1e-1, ht = 1e-3;
    const double p_x = fd_first([&](double v) { return p(t, v, xi); }, x, hx);
    const double p_xi = fd_first([&](double v) { return p(t, x, v); }, xi, hxi);
    const double p_xx = fd_second([&](double v) { return p(t, v, xi); }, x, hx);
    const double p_xixi = fd_second([&](double v) { return p(t, x, v); }, xi, hxi);
    auto d_t = [&](double xx, double yy) { return fd_first([&](double v) { return p(v, xx, yy); }, t, ht); };
    const double p_tx = fd_first([&](double v) { return d_t(v, xi); }, x, hx);
    const double p_txi = fd_first([&](double v) { return d_t(x, v); }, xi, hxi);
    const double S = -p_txi / p_xi + p_tx / p_x;
    const double R = p_xx * p_xi / p_x;
    const double Q = -p_xixi * p_x / p_xi;
    CHECK(std::abs(S) > 1e-3);
    for (double h : {0.0, 0.1, -0.2}) {
        const double oracle = S - (Q + R + S) * h + Q * h * h;
        CHECK(rel_err(h_rhs(g, diss, l0, t, x, xi, h), oracle) < 1e-6);
    }
}

TEST_CASE("mu_of_t") {
    const Symbol g = Symbol::power(1.0);
    AsymptoticParameters p;
    p.derive(g.beta0());
    const double l0 = 64.0, eps = 0.1, x0 = p.c_x0 * eps;
    CHECK(mu_of_t(g, p, l0, eps, l0) == doctest::Approx(std::pow(l0, 2 * p.delta3 * p.N0) / (x0 * eps)).epsilon(1e-12));
    for (double beta : {0.5, 1.0}) {
        const Symbol gb = Symbol::power(beta);
        double prev = 0.0;
        for (double lt = l0; lt <= 8 * l0; lt *= 1.1) {
            const double m = mu_of_t(gb, p, l0, eps, lt);
            CHECK(m >= prev);
            prev = m;
        }
    }
    const double big = 16384.0;
    for (double lt = big; lt <= 4 * big; lt *= 1.5)
        CHECK(mu_of_t(g, p, big, eps, lt) / lt <= std::pow(big, -1.0 / 3.0 - p.delta0 / 10.0));
}

// Ratio windows are a few hundredths wide at lambda0 = 64; the grid checks use the desk span window.
TEST_CASE("grid phase reproduces the steady slope and its bounds") {
    const Setup& base = steady_setup();
    const WindowSpec spec = WindowSpec::parse("span:0.85,1.75");
    AsymptoticParameters params = base.params;
    params.c_x0 = 0.85 / base.plan.eps;
    const PhaseField fan = build_phase(base.gamma, base.shear, params, 64.0, base.plan.eps, spec,
                                       uniform(base.plan.t_M, 64));
    const std::size_t n = 4096;
    const SteadySlope slope = steady_phase_slope(base.gamma, base.shear, 64.0, base.plan.eps, spec);
    const PhaseGrid g0 = phase_on_grid(fan, 0, n);
    std::size_t checked = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = g0.x[k];
        if (x > fan.window.x0p && x < fan.window.x1p) {
            CHECK(rel_err(g0.dphi[k], slope(x)) < 1e-8);
            ++checked;
        }
    }
    CHECK(checked > 100);
    // Span windows bracket the launch slope by [lambda0, 2 lambda0]; the curvature stays within 10 mu lambda.
    for (std::size_t k = 0; k < n; ++k) {
        const double x = g0.x[k];
        if (x > fan.window.x0p && x < fan.window.x1p) {
            CHECK(g0.dphi[k] >= 64.0 * (1 - 1e-9));
            CHECK(g0.dphi[k] <= 128.0 * (1 + 1e-9));
            CHECK(std::abs(g0.ddphi[k]) <= 10.0 * fan.mu[0] * 64.0);
        }
    }
}

TEST_CASE("cutoff profile") {
    CHECK(bump(0.0) == 1.0);
    CHECK(bump(1.0) == 0.0);
    CHECK(bump(-1.5) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = smooth_step(i / 100.0);
        CHECK(v >= prev);
        prev = v;
    }
}
