#include "degenwave/harness.hpp"
#include "degenwave/linop.hpp"
#include "degenwave/table_check.hpp"

#include "table_oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace degenwave;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Runs one criterion; a thrown library error counts as a failure.
void criterion(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("error: ") + e.what());
    }
}

std::vector<double> uniform(double t_end, std::size_t count) {
    std::vector<double> t(count + 1);
    for (std::size_t i = 0; i <= count; ++i) t[i] = t_end * double(i) / double(count);
    return t;
}

void toy_conservation() {
    ExperimentConfig c;
    c.lambda0 = {64.0};
    c.M = 4.0;
    const auto start = Clock::now();
    const auto doc = nlohmann::json::parse(toy_json(c));
    const double elapsed = seconds_since(start);
    const double drift = doc["points"][0]["energy_drift"];
    report(1, drift < kToyDriftTolerance && elapsed < 5.0,
           fmt("toy energy drift %.3e < %.0e to the travel time to 4 lambda0 (%.2f s < 5 s)", drift,
               kToyDriftTolerance, elapsed));
}

struct SteadyFan {
    double lambda0;
    GrowthPlan plan;
    RayDiagnostics ray;
    double seconds;
};

std::vector<SteadyFan> steady_fans() {
    ExperimentConfig c;
    const Symbol gamma = Symbol::parse(c.gamma);
    const ShearProfile shear = ShearProfile::parse(c.shear);
    const AsymptoticParameters params = c.parameters();
    FanOptions opts;
    opts.ray.tol = {1e-10, 1e-10};
    std::vector<SteadyFan> out;
    for (double lambda0 : {32.0, 64.0, 128.0, 256.0}) {
        const auto start = Clock::now();
        SteadyFan f{lambda0, make_plan(gamma, std::nullopt, shear, params, lambda0, c.M), {}, 0.0};
        const PhaseField fan = build_phase(gamma, shear, params, lambda0, f.plan.eps, WindowSpec::parse("ratio"),
                                           uniform(f.plan.t_M, 256), opts);
        f.ray = ray_diagnostics(gamma, fan, f.plan.t_M);
        f.seconds = seconds_since(start);
        out.push_back(f);
    }
    return out;
}

void ray_criteria() {
    const std::vector<SteadyFan> fans = steady_fans();
    bool h_ok = true, p_ok = true, sw_ok = true, pos_ok = true;
    double h = 0, drift = 0, slowest = 0, sw_lo = 1e300, sw_hi = 0, pos_lo = 1e300, pos_hi = 0, factor = 0;
    std::size_t admissible = 0;
    for (const SteadyFan& f : fans) {
        h = std::max(h, f.ray.max_abs_h);
        drift = std::max(drift, f.ray.hamiltonian_drift);
        slowest = std::max(slowest, f.seconds);
        h_ok = h_ok && f.ray.max_abs_h < kSteadyHTolerance && f.seconds < 1.0;
        p_ok = p_ok && f.ray.hamiltonian_drift < kHamiltonianTolerance;
        if (!f.plan.admissible()) continue;
        ++admissible;
        sw_lo = std::min(sw_lo, f.ray.sandwich_min);
        sw_hi = std::max(sw_hi, f.ray.sandwich_max);
        sw_ok = sw_ok && f.ray.sandwich_min >= 1.0 - kSandwichSlack && f.ray.sandwich_max <= 2.0 + kSandwichSlack;
        pos_lo = std::min(pos_lo, f.ray.position_min);
        pos_hi = std::max(pos_hi, f.ray.position_max);
        factor = f.ray.position_factor;
        pos_ok = pos_ok && f.ray.position_min >= 1.0 / factor && f.ray.position_max <= factor;
    }
    report(2, h_ok, fmt("steady max_t |h| %.3e < %.0e over lambda0 = 32..256 (slowest plan %.3f s < 1 s)", h,
                        kSteadyHTolerance, slowest));
    report(3, p_ok, fmt("Hamiltonian relative drift %.3e < %.0e on [0, t_M]", drift, kHamiltonianTolerance));
    report(4, sw_ok && admissible > 0,
           fmt("Xi / lambda(t) in [%.6f, %.6f] within [1, 2] on %zu admissible plans", sw_lo, sw_hi, admissible));
    report(5, pos_ok && admissible > 0,
           fmt("X(t) gamma(lambda(t)) / (X(0) gamma(lambda0)) in [%.4f, %.4f] within factor %.3g", pos_lo, pos_hi,
               factor));
}

long mode_of(std::size_t j, std::size_t n) {
    const long k = static_cast<long>(j);
    return k > static_cast<long>(n / 2) ? k - static_cast<long>(n) : k;
}

// Dense matrix of L (row-major, FFT slot order) from directly transformed samples of f' and (Gamma f)'.
std::vector<cplx> dense_operator(const ShearProfile& f, const Symbol& g, double lambda0, std::size_t n) {
    std::vector<cplx> F(n), G(n);
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x = 2.0 * std::numbers::pi * double(j) / double(n);
            const cplx e = std::polar(1.0 / double(n), -double(m) * x);
            F[m] += f.derivative(0.0, 1, x) * e;
            G[m] += f.multiplier_image(g, 0.0, 1, x) * e;
        }
    }
    std::vector<cplx> A(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        const long k = mode_of(a, n);
        const double hk = std::sqrt(g(lambda0, double(k)));
        for (std::size_t b = 0; b < n; ++b) {
            const long j = mode_of(b, n);
            const long d = k - j;
            if (d <= -long(n) / 2 || d >= long(n) / 2) continue;
            const std::size_t s = static_cast<std::size_t>((d + long(n)) % long(n));
            const double hj = std::sqrt(g(lambda0, double(j)));
            A[a * n + b] = cplx(0.0, lambda0) * hk * (F[s] * hj - G[s] / hj);
        }
    }
    return A;
}

double vnorm(const std::vector<cplx>& v) {
    double s = 0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

void operator_oracle() {
    constexpr std::size_t n = 256;
    const Symbol g = Symbol::power(1.0);
    const ShearProfile f = ShearProfile::cosine(1);
    const double lambda0 = 64.0;
    const LinearOperator op(g, f, lambda0, n, false);
    const std::vector<cplx> A = dense_operator(f, g, lambda0, n);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> N01;
    double worst = 0.0, skew = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> u(n), v(n), out, Pu, Pv, expect(n);
        for (std::size_t j = 0; j < n; ++j) {
            u[j] = {N01(rng), N01(rng)};
            v[j] = {N01(rng), N01(rng)};
        }
        op.apply(0.0, u, out);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) expect[a] += A[a * n + b] * u[b];
        std::vector<cplx> diff(n);
        for (std::size_t j = 0; j < n; ++j) diff[j] = expect[j] - out[j];
        worst = std::max(worst, vnorm(diff) / vnorm(expect));
        op.apply_principal(0.0, u, Pu);
        op.apply_principal(0.0, v, Pv);
        cplx lhs = 0, rhs = 0;
        for (std::size_t j = 0; j < n; ++j) {
            lhs += std::conj(u[j]) * Pv[j];
            rhs += std::conj(Pu[j]) * v[j];
        }
        skew = std::max(skew, std::abs(lhs + rhs) / (vnorm(u) * vnorm(Pv)));
    }
    report(6, worst < 1e-10 && skew < 1e-11,
           fmt("apply vs dense oracle at N = 256, 20 fields: %.3e < 1e-10; principal skewness %.3e < 1e-11", worst,
               skew));
}

const Verdict* find_verdict(const std::vector<Verdict>& vs, const std::string& name) {
    for (const Verdict& v : vs)
        if (v.name == name) return &v;
    return nullptr;
}

bool verdict_pass(const std::vector<Verdict>& vs, const std::string& name) {
    const Verdict* v = find_verdict(vs, name);
    return v != nullptr && v->pass;
}

void table_rows() {
    using degenwave::test::dissipative_oracle;
    using degenwave::test::nondissipative_oracle;
    struct Row {
        std::string kind;
        Symbol gamma;
        std::optional<Symbol> upsilon;
        double beta, alpha;
    };
    const Row rows[] = {
        {"power", Symbol::power(1.5), std::nullopt, 1.5, 0},
        {"power", Symbol::power(1.0), std::nullopt, 1.0, 0},
        {"power", Symbol::power(0.5), std::nullopt, 0.5, 0},
        {"log", Symbol::log(1.0), std::nullopt, 1.0, 0},
        {"log", Symbol::loglog(1.0), std::nullopt, 1.0, 0},
        {"power", Symbol::power(1.5), Symbol::power(1.0), 1.5, 1.0},
        {"power", Symbol::power(1.0), Symbol::power(0.5), 1.0, 0.5},
        {"power", Symbol::power(0.5), Symbol::power(0.25), 0.5, 0.25},
        {"log", Symbol::log(1.0), Symbol::log(0.5), 1.0, 0.5},
    };
    std::size_t checked = 0, wrong = 0;
    for (const Row& r : rows) {
        for (double s = 0.0; s <= 10.0; s += 0.25) {
            for (double sp = 0.0; sp <= 12.0; sp += 0.25) {
                const TableVerdict v = table_verdict(r.gamma, r.upsilon, s, sp);
                const bool base = nondissipative_oracle(r.kind, r.beta, s, sp);
                const bool row = r.upsilon ? dissipative_oracle(r.kind, r.beta, r.alpha, s, sp) : base;
                ++checked;
                if (v.row_holds != row || v.base_holds != base || v.unstable != (row && base)) ++wrong;
            }
        }
    }
    report(12, wrong == 0,
           fmt("table_check matches the row inequalities on %zu (row, s, s') samples over 9 rows: %zu mismatches",
               checked, wrong));
}

}  // namespace

int main() {
    criterion(1, toy_conservation);
    try {
        ray_criteria();
    } catch (const std::exception& e) {
        for (int id = 2; id <= 5; ++id) report(id, false, std::string("error: ") + e.what());
    }
    criterion(6, operator_oracle);

    ExperimentConfig sweep_cfg;
    sweep_cfg.lambda0 = {32.0, 64.0, 128.0, 256.0};
    SweepReport sweep;
    double sweep_seconds = 0.0;
    bool sweep_ok = false;
    try {
        const auto start = Clock::now();
        sweep = run(sweep_cfg);
        sweep_seconds = seconds_since(start);
        sweep_ok = true;
    } catch (const std::exception& e) {
        for (int id = 7; id <= 10; ++id) report(id, false, std::string("sweep error: ") + e.what());
    }

    std::vector<PointReport> diss_points;
    double diss_seconds = 0.0;
    std::string diss_error;
    try {
        const auto start = Clock::now();
        for (const char* upsilon : {"log:0.5", "power:0.5"}) {
            ExperimentConfig c = ExperimentConfig::parse(R"(
                gamma = "log:1"
                kappa = 1
                shear = "cos:1,30"
                window = "span:1.1,1.5"
                M = 16
                lambda0 = [256]
            )");
            c.upsilon = upsilon;
            diss_points.push_back(run(c).points.at(0));
        }
        diss_seconds = seconds_since(start);
    } catch (const std::exception& e) {
        diss_error = e.what();
    }

    if (sweep_ok) {
        bool ledger = true;
        double worst = 0.0;
        std::vector<const PointReport*> runs;
        for (const PointReport& q : sweep.points) runs.push_back(&q);
        for (const PointReport& q : diss_points) runs.push_back(&q);
        for (const PointReport* p : runs) {
            ledger = ledger && verdict_pass(p->verdicts, "energy_ledger");
            if (const Verdict* v = find_verdict(p->verdicts, "energy_ledger")) worst = std::max(worst, v->value);
        }
        report(7, ledger && diss_error.empty(),
               fmt("max ||psi(t)|| / (||psi0|| exp(C t)) = %.4f <= 1 over %zu runs", worst, runs.size()));

        std::string integrals;
        for (const PointReport& p : sweep.points) integrals += fmt(" %.4g", p.residual.integral);
        report(8,
               verdict_pass(sweep.verdicts, "residual_decreasing") && verdict_pass(sweep.verdicts, "residual_slope") &&
                   sweep_seconds < 600.0,
               fmt("residual integrals%s, slope %.3f <= -0.2 (sweep %.0f s < 600 s)", integrals.c_str(),
                   sweep.residual_slope, sweep_seconds));

        bool duality = verdict_pass(sweep.verdicts, "growth_increasing");
        std::string growth;
        for (const PointReport& p : sweep.points) {
            duality = duality && verdict_pass(p.verdicts, "pairing") && verdict_pass(p.verdicts, "growth");
            growth += fmt(" %.3g/%.3g", p.duality.growth_ratio, p.growth_threshold);
        }
        report(9, duality && sweep_seconds < 900.0,
               fmt("pairing >= 1/4 and growth/threshold%s, increasing (sweep %.0f s < 900 s)", growth.c_str(),
                   sweep_seconds));

        bool deg = true;
        std::size_t admissible = 0;
        std::string ratios;
        for (const PointReport& p : sweep.points) {
            if (!p.plan.admissible()) continue;
            ++admissible;
            deg = deg && verdict_pass(p.verdicts, "degeneration");
            ratios += fmt(" %.4f", p.degeneration_ratio);
        }
        report(10, deg && admissible > 0,
               fmt("H^-1 main-part ratio%s <= M^-1/2 = %.4f on %zu admissible plans", ratios.c_str(),
                   1.0 / std::sqrt(sweep_cfg.M), admissible));
    }

    if (!diss_error.empty()) {
        report(11, false, "error: " + diss_error);
    } else {
        const double unstable = diss_points[0].duality.growth_ratio;
        const double wellposed = diss_points[1].duality.growth_ratio;
        report(11, unstable > 2.0 && wellposed <= 1.2 && diss_seconds < 600.0,
               fmt("gamma = log: upsilon = log^0.5 growth %.3f > 2, upsilon = <xi>^0.5 growth %.3f <= 1.2 (%.0f s < 600 s)",
                   unstable, wellposed, diss_seconds));
    }

    criterion(12, table_rows);
    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
