#include "degenwave/growth.hpp"

#include "degenwave/errors.hpp"
#include "degenwave/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace degenwave {

namespace {

constexpr int kSupGridInterior = 64;

// Geometric grid M' = M^{j/(n+1)}, j = 0..n+1 (64 interior points plus both endpoints).
std::vector<double> sup_grid(double M) {
    std::vector<double> g;
    const int n = kSupGridInterior + 1;
    for (int j = 0; j <= n; ++j) g.push_back(j == n ? M : std::pow(M, static_cast<double>(j) / n));
    return g;
}

Condition make_condition(std::string name, double value, double bound, std::string note = {}) {
    Condition c;
    c.name = std::move(name);
    c.value = value;
    c.bound = bound;
    c.pass = value <= bound;
    c.margin = bound != 0.0 ? (bound - value) / std::abs(bound) : -value;
    c.note = std::move(note);
    return c;
}

}  // namespace

AsymptoticParameters AsymptoticParameters::defaults(double beta0, double alpha0, double s, double s_prime) {
    AsymptoticParameters p;
    p.derive(beta0, alpha0, s, s_prime);
    return p;
}

void AsymptoticParameters::derive(double beta0, double alpha0, double s, double s_prime) {
    delta2 = std::pow(delta0, 10);
    N0 = 1e4 * std::max({(1.0 + beta0) / delta2, 1.0 + alpha0, 1.0 + s, 1.0 + s_prime});
    delta3 = delta2 / (10.0 * N0);
    delta5 = delta0 * delta3 / 100.0;
    delta4 = 10.0 * delta5;
}

void AsymptoticParameters::validate() const {
    if (!(delta0 > 0 && delta0 < 0.01)) fail(ErrorCode::parameter, "delta0 must lie in (0, 1/100)");
    if (!(delta1 > 0 && delta1 <= delta0)) fail(ErrorCode::parameter, "delta1 must lie in (0, delta0]");
    if (!(sigma0 >= 0 && sigma0 <= (1.0 - 2.0 * delta0) / 3.0))
        fail(ErrorCode::parameter, "sigma0 must lie in [0, (1 - 2 delta0) / 3]");
    if (!(N0 > 0) || !(delta2 > 0)) fail(ErrorCode::parameter, "derived parameters are not initialized");
    if (!(delta5 > 0 && 10.0 * delta5 <= delta0 * delta3 && 10.0 * delta0 * delta3 <= delta2 / N0))
        fail(ErrorCode::parameter, "parameter ordering 0 < delta5 << delta0 delta3 << delta2 / N0 violated");
    if (eps_mode == EpsMode::fixed && !(eps_fixed > 0 && eps_fixed < 1))
        fail(ErrorCode::parameter, "fixed eps must lie in (0, 1)");
    if (!(c_x0 > 0)) fail(ErrorCode::parameter, "c_x0 must be positive");
    if (!(diss_threshold > 0)) fail(ErrorCode::parameter, "diss_threshold must be positive");
}

bool GrowthPlan::admissible() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.pass; });
}

const Condition* GrowthPlan::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

double tau_M(const Symbol& gamma, double lambda0, double M) {
    if (!(M >= 1) || !(lambda0 >= 1)) fail(ErrorCode::input_domain, "tau_M needs M >= 1 and lambda0 >= 1");
    if (M == 1.0) return 0.0;
    return integrate([&](double l) { return 1.0 / (lambda0 * gamma(lambda0, l)); }, lambda0, M * lambda0, 1e-13);
}

double condition1_sup(const Symbol& gamma, double lambda0, double M) {
    const auto grid = sup_grid(M);
    double tau = 0.0, sup = 0.0;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        tau += integrate([&](double l) { return 1.0 / (lambda0 * gamma(lambda0, l)); }, grid[j - 1] * lambda0,
                         grid[j] * lambda0, 1e-13);
        sup = std::max(sup, gamma(lambda0, grid[j] * lambda0) * tau / grid[j]);
    }
    return sup;
}

EpsReport eps_window(const Symbol& gamma, const AsymptoticParameters& params, double lambda0, double M) {
    EpsReport r;
    const double g0 = gamma(lambda0, lambda0);
    r.lower = std::max(std::pow(lambda0, -(params.sigma0 + params.delta0 / 6.0)), std::pow(g0, -(1.0 - 0.5 * params.delta0)));
    const double sup = condition1_sup(gamma, lambda0, M);
    const double b0 = gamma.beta0();
    r.upper = std::min(0.01, sup > 0 ? 1.0 / ((10.0 + std::pow(2.0, 2.0 * b0)) * sup) : 0.01);
    r.mode = params.eps_mode;
    r.value = params.eps_mode == EpsMode::fixed ? params.eps_fixed : std::sqrt(r.lower * r.upper);
    r.lower_ok = r.value >= r.lower;
    r.upper_ok = r.value <= r.upper;
    return r;
}

GrowthPlan check_conditions(const Symbol& gamma, const std::optional<Symbol>& upsilon,
                            const AsymptoticParameters& params_in, double lambda0, double M) {
    AsymptoticParameters params = params_in;
    if (!(params.N0 > 0)) params.derive(gamma.beta0(), upsilon ? upsilon->beta0() : 0.0);
    params.validate();
    if (!(lambda0 >= 1) || !(M >= 1)) fail(ErrorCode::input_domain, "plans need lambda0 >= 1 and M >= 1");
    GrowthPlan plan;
    plan.gamma = gamma.spec();
    plan.upsilon = upsilon ? upsilon->spec() : std::string();
    plan.lambda0 = lambda0;
    plan.M = M;
    plan.params = params;
    plan.tau_M = tau_M(gamma, lambda0, M);
    plan.eps_report = eps_window(gamma, params, lambda0, M);
    plan.eps = plan.eps_report.value;
    if (!(plan.eps > 0 && plan.eps < 1)) fail(ErrorCode::parameter, "eps outside (0, 1)");

    const double g0 = gamma(lambda0, lambda0);
    const double d0 = params.delta0, s0 = params.sigma0;
    plan.conditions.push_back(make_condition("gf1", condition1_sup(gamma, lambda0, M),
                                             std::min(std::pow(g0, 1.0 - d0), std::pow(lambda0, s0))));
    plan.conditions.push_back(make_condition("gf2", plan.tau_M,
                                             std::min(std::pow(lambda0, 1.0 - d0 - 3.0 * s0) / g0, 1.0)));
    // Compared in logarithms: lambda0^{1/delta0} overflows for small delta0.
    plan.conditions.push_back(make_condition("gf3", std::log(M), std::log(lambda0) / d0, "logarithms of both sides"));
    plan.conditions.push_back(make_condition("tau_le_T", plan.tau_M, params.T));
    plan.conditions.push_back(make_condition("lambda0_ge_Lambda", -lambda0, -params.Lambda, "negated: lambda0 >= Lambda"));
    if (params.enforce_eps_window) {
        Condition c = make_condition("eps_window", plan.eps_report.lower, plan.eps_report.upper,
                                     "lower eps bound against upper eps bound");
        c.pass = plan.eps_report.lower_ok && plan.eps_report.upper_ok;
        plan.conditions.push_back(c);
    }

    if (upsilon) {
        const Symbol& ups = *upsilon;
        const double diss1 =
            M == 1.0 ? 0.0
                     : integrate([&](double l) { return ups(lambda0, l) / (gamma(lambda0, l) * lambda0); }, lambda0,
                                 M * lambda0, 1e-12);
        plan.conditions.push_back(make_condition("diss1", diss1, params.diss_threshold,
                                                 "o(1) condition evaluated against the fixed threshold"));

        // sup over M' of d2gamma(M' lambda0)^{-(1-delta1)} int d2gamma^{1-delta1} gamma0 / gamma^2 dl / lambda0
        const double e = 1.0 - params.delta1;
        const auto grid = sup_grid(M);
        double cumulative = 0.0, sup = 0.0;
        for (std::size_t j = 1; j < grid.size(); ++j) {
            cumulative += integrate(
                [&](double l) {
                    const double g = gamma(lambda0, l);
                    return std::pow(gamma.partial(0, 1, lambda0, l), e) * g0 / (g * g * lambda0);
                },
                grid[j - 1] * lambda0, grid[j] * lambda0, 1e-12);
            sup = std::max(sup, cumulative / std::pow(gamma.partial(0, 1, lambda0, grid[j] * lambda0), e));
        }
        plan.conditions.push_back(make_condition("diss2", sup, 1.0));
    }
    return plan;
}

GrowthPlan make_plan(const Symbol& gamma, const std::optional<Symbol>& upsilon, const ShearProfile& shear,
                     const AsymptoticParameters& params, double lambda0, double M) {
    if (shear.kappa() > 0 && !upsilon) fail(ErrorCode::parameter, "dissipative shear needs an upsilon symbol");
    GrowthPlan plan = check_conditions(gamma, upsilon, params, lambda0, M);
    plan.t_star = shear.tf_of_tau(plan.tau_M) / (1.0 - plan.eps);
    plan.t_M = shear.tf_of_tau(plan.tau_M / (1.0 - plan.eps));
    return plan;
}

namespace {

OdeRhs comparison_rhs(const Symbol& gamma, const ShearProfile& shear, double lambda0, double eps) {
    return [&gamma, &shear, lambda0, eps](const OdeState& x, OdeState& dx, double t) {
        const double a = std::abs(shear.fpp0(t)) * lambda0;
        dx[0] = (1.0 - eps) * a * gamma(lambda0, x[0]);
        dx[1] = (1.0 + eps) * a * gamma(lambda0, x[1]);
    };
}

}  // namespace

double comparison_lambda(const Symbol& gamma, const ShearProfile& shear, double lambda0, double eps, double t) {
    OdeState x{lambda0, (1.0 + eps) * lambda0};
    integrate_ode(comparison_rhs(gamma, shear, lambda0, eps), x, 0.0, t, {1e-13, 1e-13});
    return x[0];
}

ComparisonCurves comparison_at_times(const Symbol& gamma, const ShearProfile& shear, double lambda0, double eps,
                                     const std::vector<double>& times) {
    ComparisonCurves out;
    out.t = times;
    OdeState x{lambda0, (1.0 + eps) * lambda0};
    integrate_ode_times(comparison_rhs(gamma, shear, lambda0, eps), x, times,
                        [&](const OdeState& s, double) {
                            out.lambda.push_back(s[0]);
                            out.lambda_bar.push_back(s[1]);
                        },
                        {1e-13, 1e-13});
    return out;
}

ComparisonCurves solve_comparison_frequencies(const Symbol& gamma, const ShearProfile& shear, const GrowthPlan& plan,
                                              std::size_t samples, bool force) {
    if (!force && !plan.admissible()) fail(ErrorCode::parameter, "growth conditions fail; pass force to solve anyway");
    if (samples < 2) fail(ErrorCode::input_domain, "need at least two samples");
    ComparisonCurves out;
    const double lambda0 = plan.lambda0, eps = plan.eps;
    const double t_end = std::max(plan.t_star, plan.t_M);
    for (std::size_t i = 0; i < samples; ++i)
        out.t.push_back(i + 1 == samples ? plan.t_star : plan.t_star * static_cast<double>(i) / (samples - 1));
    OdeState x{lambda0, (1.0 + eps) * lambda0};
    const auto rhs = comparison_rhs(gamma, shear, lambda0, eps);
    integrate_ode_times(rhs, x, out.t,
                        [&](const OdeState& s, double) {
                            out.lambda.push_back(s[0]);
                            out.lambda_bar.push_back(s[1]);
                        },
                        {1e-13, 1e-13});
    // Hitting time of M lambda0 by root finding on the lower curve.
    if (plan.M == 1.0) {
        out.t_M = 0.0;
    } else {
        const double target = plan.M * lambda0;
        double hi = std::max(t_end, 1e-300);
        while (comparison_lambda(gamma, shear, lambda0, eps, hi) < target) hi *= 1.5;
        out.t_M = find_root([&](double t) { return comparison_lambda(gamma, shear, lambda0, eps, t) - target; }, 0.0,
                            hi, 1e-14);
    }
    return out;
}

}  // namespace degenwave
