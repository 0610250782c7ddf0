#include "degenwave/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

namespace degenwave {

SymbolJet symbol_jet(const Symbol& gamma, const ShearProfile& shear, double lambda0, double t, double x, double xi) {
    const ShearSample s = shear.sample(gamma, t, x);
    double g[3];
    gamma.xi2_derivatives(lambda0, xi, 2, g);
    SymbolJet j;
    j.p = lambda0 * (s.f[1] * g[0] - s.gf[1]);
    j.p_xi = lambda0 * s.f[1] * g[1];
    j.p_x = lambda0 * (s.f[2] * g[0] - s.gf[2]);
    j.p_xx = lambda0 * (s.f[3] * g[0] - s.gf[3]);
    j.p_xxi = lambda0 * s.f[2] * g[1];
    j.p_xixi = lambda0 * s.f[1] * g[2];
    j.p_txi = lambda0 * s.f_t[1] * g[1];
    j.p_tx = lambda0 * (s.f_t[2] * g[0] - s.gf_t[2]);
    j.H = 0.5 * lambda0 * s.gf[2] * g[1] / g[0];
    j.sub = 0.5 * lambda0 * s.f[2] * g[1] - j.H;
    return j;
}

namespace {

void require_nondegenerate(const SymbolJet& j, double t, double x) {
    if (j.p_x == 0.0 || j.p_xi == 0.0 || !std::isfinite(j.p_x) || !std::isfinite(j.p_xi)) {
        std::ostringstream os;
        os << "d_x p or d_xi p vanishes at t = " << t << ", x = " << x;
        fail(ErrorCode::singularity, os.str());
    }
}

double h_rhs_from(const SymbolJet& j, double h) {
    const double s = -j.p_txi / j.p_xi + j.p_tx / j.p_x;
    const double r = j.p_xx * j.p_xi / j.p_x;
    const double q = -j.p_xixi * j.p_x / j.p_xi;
    return s - (q + r + s) * h + q * h * h;
}

double bump_prime(double u) {
    const double w = 1.0 - u * u;
    if (!(w > 0)) return 0.0;
    return bump(u) * (-2.0 * u / (w * w));
}

double smooth_step_prime(double v) {
    if (v <= 0.0 || v >= 1.0) return 0.0;
    const double A = bump(1.0 - v), B = bump(v);
    const double dA = -bump_prime(1.0 - v), dB = bump_prime(v);
    const double S = A + B;
    return (dA * B - A * dB) / (S * S);
}

}  // namespace

double h_rhs(const Symbol& gamma, const ShearProfile& shear, double lambda0, double t, double X, double Xi, double h) {
    const SymbolJet j = symbol_jet(gamma, shear, lambda0, t, X, Xi);
    require_nondegenerate(j, t, X);
    return h_rhs_from(j, h);
}

WindowSpec WindowSpec::parse(const std::string& spec) {
    WindowSpec w;
    if (spec == "ratio") return w;
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    try {
        if (kind == "ratio") {
            w.c_x0 = std::stod(rest);
            return w;
        }
        if (kind == "span") {
            const auto comma = rest.find(',');
            if (comma == std::string::npos) throw std::invalid_argument(rest);
            w.mode = WindowMode::span;
            w.x0 = std::stod(rest.substr(0, comma));
            w.x1 = std::stod(rest.substr(comma + 1));
            return w;
        }
    } catch (const std::exception&) {
        fail(ErrorCode::parse, "malformed window spec '" + spec + "'");
    }
    fail(ErrorCode::parse, "unknown window spec '" + spec + "' (expected ratio[:c_x0] or span:x0,x1)");
}

std::string WindowSpec::str() const {
    std::ostringstream os;
    os.precision(17);
    if (mode == WindowMode::span)
        os << "span:" << x0 << "," << x1;
    else
        os << "ratio:" << c_x0;
    return os.str();
}

Window make_window(const Symbol& gamma, double lambda0, double eps, const WindowSpec& spec) {
    if (!(eps > 0 && eps < 1)) fail(ErrorCode::parameter, "eps must lie in (0, 1)");
    Window w;
    if (spec.mode == WindowMode::ratio) {
        if (!(spec.c_x0 > 0)) fail(ErrorCode::parameter, "c_x0 must be positive");
        w.x0 = spec.c_x0 * eps;
        const double ratio =
            0.1 * (gamma(lambda0, (1.0 + 0.75 * eps) * lambda0) / gamma(lambda0, (1.0 + 0.5 * eps) * lambda0) - 1.0);
        if (!(ratio > 0)) fail(ErrorCode::parameter, "window ratio must be positive (gamma increasing)");
        w.x1 = w.x0 * (1.0 + ratio);
    } else {
        if (!(spec.x0 > 0 && spec.x1 > spec.x0)) fail(ErrorCode::parameter, "span window needs 0 < x0 < x1");
        w.x0 = spec.x0;
        w.x1 = spec.x1;
    }
    const double third = (w.x1 - w.x0) / 3.0;
    w.x0p = w.x0 + third;
    w.x1p = w.x1 - third;
    return w;
}

double SteadySlope::operator()(double x) const {
    const double fp = shear.derivative(0.0, 1, x);
    const double g = shear.multiplier_image(gamma, 0.0, 1, x);
    const double target = (E - g) / (-fp);
    try {
        return RestrictedSymbol(gamma, lambda0).inverse(target);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::domain) throw;
        std::ostringstream os;
        os << "phase slope at x = " << x << " falls below lambda0";
        fail(ErrorCode::parameter, os.str());
    }
}

SteadySlope steady_phase_slope(const Symbol& gamma, const ShearProfile& shear, double lambda0, double eps,
                               const WindowSpec& spec) {
    SteadySlope s{gamma, shear, lambda0, eps, make_window(gamma, lambda0, eps, spec)};
    const Window& w = s.window;
    const int checks = 256;
    for (int i = 1; i <= checks; ++i) {
        const double x = w.x1 * i / checks;
        if (!(shear.derivative(0.0, 1, x) < 0)) {
            std::ostringstream os;
            os << "f'(0, x) must be negative on (0, x1]; fails at x = " << x;
            fail(ErrorCode::parameter, os.str());
        }
    }
    const double f1 = shear.derivative(0.0, 1, w.x1);
    const double g1 = shear.multiplier_image(gamma, 0.0, 1, w.x1);
    s.E = -f1 * gamma(lambda0, (1.0 + 0.5 * eps) * lambda0) + g1;

    const double upper = spec.mode == WindowMode::ratio ? (1.0 + eps) * lambda0 : 2.0 * lambda0;
    const double slack = 1e-12 * lambda0;
    s.slope_min = std::numeric_limits<double>::infinity();
    s.slope_max = 0.0;
    const int grid = 1024;
    for (int i = 0; i <= grid; ++i) {
        const double x = w.x0 + (w.x1 - w.x0) * i / grid;
        double v;
        try {
            v = s(x);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::parameter) throw;
            std::ostringstream os;
            os << "phase slope below lambda0 at " << (i == grid ? "endpoint x1" : (i == 0 ? "endpoint x0" : "x = "))
               << (i == grid || i == 0 ? "" : std::to_string(x));
            fail(ErrorCode::parameter, os.str());
        }
        s.slope_min = std::min(s.slope_min, v);
        s.slope_max = std::max(s.slope_max, v);
        if (v > upper + slack || v < lambda0 - slack) {
            std::ostringstream os;
            os.precision(10);
            const std::string where = i == 0 ? "endpoint x0" : (i == grid ? "endpoint x1" : "interior x = " + std::to_string(x));
            os << "phase slope " << v << " leaves [" << lambda0 << ", " << upper << "] at " << where;
            fail(ErrorCode::parameter, os.str());
        }
    }
    return s;
}

namespace {

// State layout of the ray ODE.
enum : std::size_t { kX, kXi, kH, kI, kPhi, kLogA, kLogJ, kBudget, kStateSize };

}  // namespace

Bicharacteristic integrate_bicharacteristic(const Symbol& gamma, const ShearProfile& shear, double lambda0, double x,
                                            double Xi0, const std::vector<double>& times, double phi0,
                                            const RayOptions& opts) {
    if (times.empty() || times.front() != 0.0) fail(ErrorCode::input_domain, "ray sample times must start at 0");
    if (!(x > 0) || !(Xi0 > 0)) fail(ErrorCode::input_domain, "rays launch from x > 0 with Xi0 > 0");
    const double x_floor = std::numeric_limits<double>::epsilon();
    auto rhs = [&](const OdeState& st, OdeState& d, double t) {
        const double X = st[kX], Xi = st[kXi], h = st[kH];
        if (!(X > x_floor)) fail(ErrorCode::horizon, "ray reached X = 0 within machine epsilon");
        if (!(std::abs(Xi) < opts.xi_max)) fail(ErrorCode::horizon, "ray frequency overflowed");
        const SymbolJet j = symbol_jet(gamma, shear, lambda0, t, X, Xi);
        require_nondegenerate(j, t, X);
        const double ddphi = (h - 1.0) * j.p_x / j.p_xi;
        d[kX] = j.p_xi;
        d[kXi] = -j.p_x;
        d[kH] = h_rhs_from(j, h);
        d[kI] = (j.p_xxi / j.p_x - j.p_xixi * (1.0 - h) / j.p_xi) * (-j.p_x);
        d[kPhi] = -j.p + j.p_xi * Xi;
        d[kLogA] = -(0.5 * j.p_xixi * ddphi + j.sub);
        d[kLogJ] = j.p_xxi + j.p_xixi * ddphi;
        d[kBudget] = std::abs(j.H);
    };

    Bicharacteristic ray;
    ray.x_launch = x;
    auto record = [&](const OdeState& st, double t) {
        const SymbolJet j = symbol_jet(gamma, shear, lambda0, t, st[kX], st[kXi]);
        ray.t.push_back(t);
        ray.X.push_back(st[kX]);
        ray.Xi.push_back(st[kXi]);
        ray.h.push_back(st[kH]);
        ray.I.push_back(st[kI]);
        ray.hamiltonian.push_back(j.p);
        ray.phi.push_back(st[kPhi]);
        ray.ddphi.push_back((st[kH] - 1.0) * j.p_x / j.p_xi);
        ray.log_amp.push_back(st[kLogA]);
        ray.log_jacobian.push_back(st[kLogJ]);
        ray.h_budget.push_back(st[kBudget]);
    };

    OdeState st(kStateSize, 0.0);
    st[kX] = x;
    st[kXi] = Xi0;
    st[kPhi] = phi0;
    try {
        integrate_ode_times(rhs, st, times, record, opts.tol);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::horizon) throw;
        ray.complete = false;
        throw HorizonError(e.what(), std::move(ray));
    }
    return ray;
}

double mu_of_t(const Symbol& gamma, const AsymptoticParameters& params_in, double lambda0, double eps,
               double lambda_t) {
    if (!(lambda_t >= lambda0)) fail(ErrorCode::input_domain, "mu needs lambda_t >= lambda0");
    AsymptoticParameters params = params_in;
    if (!(params.N0 > 0)) params.derive(gamma.beta0());
    const double x0 = params.c_x0 * eps;
    const double loss = std::pow(lambda0, 2.0 * params.delta3 * params.N0);
    const double g0 = gamma(lambda0, lambda0), gt = gamma(lambda0, lambda_t);
    const double d0 = gamma.partial(0, 1, lambda0, lambda0), dt = gamma.partial(0, 1, lambda0, lambda_t);
    return loss / (x0 * eps) * (gt / g0) * (d0 / dt);
}

double PhaseField::image(std::size_t j, double x) const {
    std::vector<double> X(rays.size()), J(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i) {
        X[i] = rays[i].X[j];
        J[i] = std::exp(rays[i].log_jacobian[j]);
    }
    return HermiteCurve(x_launch, X, J)(x);
}

PhaseField build_phase(const Symbol& gamma, const ShearProfile& shear, const AsymptoticParameters& params,
                       double lambda0, double eps, const WindowSpec& window, const std::vector<double>& times,
                       const FanOptions& opts) {
    if (opts.rays < 3) fail(ErrorCode::configuration, "the fan needs at least three rays");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) fail(ErrorCode::input_domain, "phase sample times must increase");
    const SteadySlope slope = steady_phase_slope(gamma, shear, lambda0, eps, window);

    PhaseField field;
    field.lambda0 = lambda0;
    field.eps = eps;
    field.E = slope.E;
    field.window = slope.window;
    field.window_spec = window;
    field.t = times;
    const std::size_t n = opts.rays;
    const Window& w = slope.window;
    for (std::size_t i = 0; i < n; ++i)
        field.x_launch.push_back(i + 1 == n ? w.x1 : w.x0 + (w.x1 - w.x0) * static_cast<double>(i) / (n - 1));

    // Phi(0, .) normalized to vanish at the midpoint ray.
    // Corrected trapezoid rule using the exact slope derivative -p_x / p_xi (error O(h^5)).
    std::vector<double> s0(n), ds0(n), phi0(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = field.x_launch[i];
        s0[i] = slope(x);
        const SymbolJet j = symbol_jet(gamma, shear, lambda0, 0.0, x, s0[i]);
        require_nondegenerate(j, 0.0, x);
        ds0[i] = -j.p_x / j.p_xi;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double h = field.x_launch[i] - field.x_launch[i - 1];
        phi0[i] = phi0[i - 1] + 0.5 * h * (s0[i - 1] + s0[i]) + h * h / 12.0 * (ds0[i - 1] - ds0[i]);
    }
    const double mid = phi0[n / 2];
    for (double& v : phi0) v -= mid;

    field.rays.resize(n);
    parallel_for(n, [&](std::size_t i) {
        field.rays[i] = integrate_bicharacteristic(gamma, shear, lambda0, field.x_launch[i], s0[i], times, phi0[i], opts.ray);
    });

    const ComparisonCurves cmp = comparison_at_times(gamma, shear, lambda0, eps, times);
    field.lambda_t = cmp.lambda;
    field.lambda_bar_t = cmp.lambda_bar;
    AsymptoticParameters mu_params = params;
    mu_params.c_x0 = field.window.x0 / eps;
    for (double l : field.lambda_t) field.mu.push_back(mu_of_t(gamma, mu_params, lambda0, eps, std::max(l, lambda0)));
    return field;
}

double bump(double u) {
    const double w = 1.0 - u * u;
    if (!(w > 0)) return 0.0;
    return std::exp(1.0 - 1.0 / w);
}

double smooth_step(double v) {
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    const double A = bump(1.0 - v), B = bump(v);
    return A / (A + B);
}

void check_no_crossing(const PhaseField& field) {
    for (std::size_t j = 0; j < field.t.size(); ++j)
        for (std::size_t i = 1; i < field.rays.size(); ++i)
            if (!(field.rays[i].X[j] > field.rays[i - 1].X[j])) {
                std::ostringstream os;
                os << "rays " << i - 1 << " and " << i << " cross at t = " << field.t[j];
                fail(ErrorCode::focal_point, os.str());
            }
}

PhaseGrid phase_on_grid(const PhaseField& field, std::size_t j, std::size_t n) {
    if (j >= field.t.size()) fail(ErrorCode::input_domain, "phase sample index out of range");
    if (n < 8) fail(ErrorCode::resolution, "phase grid needs at least eight points");
    const std::size_t m = field.rays.size();
    std::vector<double> X(m), Xi(m), dd(m), phi(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Bicharacteristic& r = field.rays[i];
        X[i] = r.X[j];
        Xi[i] = r.Xi[j];
        dd[i] = r.ddphi[j];
        phi[i] = r.phi[j];
        if (i > 0 && !(X[i] > X[i - 1])) {
            std::ostringstream os;
            os << "rays " << i - 1 << " and " << i << " cross at t = " << field.t[j];
            fail(ErrorCode::focal_point, os.str());
        }
    }
    const HermiteCurve dphi_curve(X, Xi, limit_monotone_slopes(X, Xi, dd));
    const HermiteCurve phi_curve(X, phi, Xi);

    PhaseGrid out;
    out.t = field.t[j];
    out.image_x0 = X.front();
    out.image_x1 = X.back();
    out.image_x0p = field.image(j, field.window.x0p);
    out.image_x1p = field.image(j, field.window.x1p);
    const double two_pi = 2.0 * std::numbers::pi;
    if (out.image_x1 - out.image_x0 >= two_pi) fail(ErrorCode::periodization, "window image exceeds one period");
    const double dx = two_pi / static_cast<double>(n);
    if (out.image_x1p - out.image_x0p < 4.0 * dx)
        fail(ErrorCode::resolution, "grid does not resolve the packet support (fewer than four points)");

    const double a = out.image_x0, ap = out.image_x0p, bp = out.image_x1p, b = out.image_x1;
    const double xi_a = Xi.front(), xi_b = Xi.back();
    // Extended slope: interpolant on the support, blended to the boundary-ray constants
    // across the outer thirds, constant beyond.
    auto ext = [&](double y) {
        if (y <= a) return xi_a;
        if (y >= b) return xi_b;
        if (y < ap) {
            const double c = smooth_step((y - a) / (ap - a));
            return c * dphi_curve(y) + (1.0 - c) * xi_a;
        }
        if (y > bp) {
            const double c = smooth_step((b - y) / (b - bp));
            return c * dphi_curve(y) + (1.0 - c) * xi_b;
        }
        return dphi_curve(y);
    };
    auto ext_prime = [&](double y) {
        if (y <= a || y >= b) return 0.0;
        if (y < ap) {
            const double L = ap - a, v = (y - a) / L;
            return smooth_step(v) * dphi_curve.prime(y) + smooth_step_prime(v) / L * (dphi_curve(y) - xi_a);
        }
        if (y > bp) {
            const double L = b - bp, v = (b - y) / L;
            return smooth_step(v) * dphi_curve.prime(y) - smooth_step_prime(v) / L * (dphi_curve(y) - xi_b);
        }
        return dphi_curve.prime(y);
    };
    const double phi_ap = phi_curve(ap), phi_bp = phi_curve(bp);
    const double centre = 0.5 * (a + b);
    out.x.resize(n);
    out.phi.resize(n);
    out.dphi.resize(n);
    out.ddphi.resize(n);
    std::vector<double> ys(n);
    std::vector<std::pair<double, std::size_t>> left, right;
    for (std::size_t k = 0; k < n; ++k) {
        out.x[k] = dx * static_cast<double>(k);
        ys[k] = circle_representative(out.x[k], centre);
        if (ys[k] > a && ys[k] < ap) left.emplace_back(ys[k], k);
        if (ys[k] > bp && ys[k] < b) right.emplace_back(ys[k], k);
    }
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());

    // Phase in the blend zones from running integrals of the extended slope.
    std::vector<double> nodes{a};
    for (const auto& e : left) nodes.push_back(e.first);
    nodes.push_back(ap);
    std::vector<double> cum = cumulative_integral(ext, nodes);
    const double phi_a = phi_ap - cum.back();
    for (std::size_t i = 0; i < left.size(); ++i) out.phi[left[i].second] = phi_a + cum[i + 1];
    nodes.assign(1, bp);
    for (const auto& e : right) nodes.push_back(e.first);
    nodes.push_back(b);
    cum = cumulative_integral(ext, nodes);
    const double phi_b = phi_bp + cum.back();
    for (std::size_t i = 0; i < right.size(); ++i) out.phi[right[i].second] = phi_bp + cum[i + 1];

    for (std::size_t k = 0; k < n; ++k) {
        const double y = ys[k];
        if (y <= a)
            out.phi[k] = phi_a - xi_a * (a - y);
        else if (y >= b)
            out.phi[k] = phi_b + xi_b * (y - b);
        else if (y >= ap && y <= bp)
            out.phi[k] = phi_curve(y);
        out.dphi[k] = ext(y);
        out.ddphi[k] = ext_prime(y);
    }
    return out;
}

}  // namespace degenwave
