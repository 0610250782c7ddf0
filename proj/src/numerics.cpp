#include "degenwave/numerics.hpp"

#include "degenwave/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <unordered_map>

namespace degenwave {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ok: return "ok";
        case ErrorCode::input_domain: return "input_domain";
        case ErrorCode::capability: return "capability";
        case ErrorCode::domain: return "domain";
        case ErrorCode::parameter: return "parameter";
        case ErrorCode::horizon: return "horizon";
        case ErrorCode::integration: return "integration";
        case ErrorCode::singularity: return "singularity";
        case ErrorCode::focal_point: return "focal_point";
        case ErrorCode::periodization: return "periodization";
        case ErrorCode::resolution: return "resolution";
        case ErrorCode::configuration: return "configuration";
        case ErrorCode::cadence: return "cadence";
        case ErrorCode::parse: return "parse";
        case ErrorCode::io: return "io";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double* error_estimate) {
    if (a == b) {
        if (error_estimate) *error_estimate = 0.0;
        return 0.0;
    }
    double err = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, rel_tol, &err, &l1);
    if (!std::isfinite(value)) fail(ErrorCode::integration, "quadrature produced a non-finite value");
    if (error_estimate) *error_estimate = err;
    return value;
}

std::vector<double> cumulative_integral(const std::function<double(double)>& f, const std::vector<double>& nodes) {
    std::vector<double> out(nodes.size(), 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i] < nodes[i - 1]) fail(ErrorCode::input_domain, "cumulative integral nodes must be nondecreasing");
        const double cell = nodes[i] == nodes[i - 1]
                                ? 0.0
                                : boost::math::quadrature::gauss<double, 7>::integrate(f, nodes[i - 1], nodes[i]);
        out[i] = out[i - 1] + cell;
    }
    if (!out.empty() && !std::isfinite(out.back()))
        fail(ErrorCode::integration, "quadrature produced a non-finite value");
    return out;
}

double find_root(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) fail(ErrorCode::domain, "root is not bracketed");
    const int digits = std::max(10, static_cast<int>(-std::log2(rel_tol)));
    boost::math::tools::eps_tolerance<double> tol(std::min(digits, 52));
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

namespace {

using Dopri = boost::numeric::odeint::runge_kutta_dopri5<OdeState>;

double initial_step(double t0, double t1) { return std::max((t1 - t0) * 1e-4, 1e-300); }

}  // namespace

void integrate_ode(const OdeRhs& rhs, OdeState& x, double t0, double t1, OdeTolerance tol) {
    if (t1 == t0) return;
    if (!(t1 > t0)) fail(ErrorCode::input_domain, "ODE integration needs t1 >= t0");
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(tol.abs, tol.rel, Dopri());
    try {
        odeint::integrate_adaptive(stepper, rhs, x, t0, t1, initial_step(t0, t1));
    } catch (const odeint::step_adjustment_error& e) {
        fail(ErrorCode::integration, std::string("ODE step adjustment failed: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        fail(ErrorCode::integration, std::string("ODE made no progress: ") + e.what());
    }
    for (double v : x)
        if (!std::isfinite(v)) fail(ErrorCode::integration, "ODE state became non-finite");
}

void integrate_ode_times(const OdeRhs& rhs, OdeState& x, const std::vector<double>& times,
                         const std::function<void(const OdeState&, double)>& observer, OdeTolerance tol) {
    if (times.empty()) return;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) fail(ErrorCode::input_domain, "ODE output times must increase");
    if (times.size() == 1) {
        observer(x, times.front());
        return;
    }
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(tol.abs, tol.rel, Dopri());
    auto checked = [&](const OdeState& st, double t) {
        for (double v : st)
            if (!std::isfinite(v)) fail(ErrorCode::integration, "ODE state became non-finite");
        observer(st, t);
    };
    try {
        odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), initial_step(times[0], times[1]),
                                checked);
    } catch (const odeint::step_adjustment_error& e) {
        fail(ErrorCode::integration, std::string("ODE step adjustment failed: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        fail(ErrorCode::integration, std::string("ODE made no progress: ") + e.what());
    }
}

HermiteCurve::HermiteCurve(std::vector<double> x, std::vector<double> y, std::vector<double> dydx)
    : x_(std::move(x)), y_(std::move(y)), d_(std::move(dydx)) {
    if (x_.size() < 2 || y_.size() != x_.size() || d_.size() != x_.size())
        fail(ErrorCode::input_domain, "Hermite interpolation needs at least two consistent nodes");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1])) fail(ErrorCode::focal_point, "interpolation nodes are not strictly increasing");
}

std::size_t HermiteCurve::segment(double x) const {
    if (x < x_.front() || x > x_.back()) fail(ErrorCode::domain, "Hermite evaluation outside node range");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) i = 1;
    if (i >= x_.size()) i = x_.size() - 1;
    return i - 1;
}

double HermiteCurve::operator()(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double HermiteCurve::prime(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double s2 = s * s;
    const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
    const double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
    return (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * d_[i] + d11 * d_[i + 1];
}

std::vector<double> limit_monotone_slopes(const std::vector<double>& x, const std::vector<double>& y,
                                          std::vector<double> d) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double delta = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (delta == 0.0) {
            d[i] = d[i + 1] = 0.0;
            continue;
        }
        if (d[i] * delta < 0) d[i] = 0.0;
        if (d[i + 1] * delta < 0) d[i + 1] = 0.0;
        const double a = d[i] / delta, b = d[i + 1] / delta;
        const double r2 = a * a + b * b;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            d[i] = tau * a * delta;
            d[i + 1] = tau * b * delta;
        }
    }
    return d;
}

HermiteCurve make_pchip(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    if (n < 2) fail(ErrorCode::input_domain, "PCHIP needs at least two nodes");
    std::vector<double> d(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = delta[0];
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        auto end_slope = [](double h0, double h1, double d0, double d1) {
            double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (s * d0 <= 0) s = 0.0;
            else if (d0 * d1 <= 0 && std::abs(s) > std::abs(3 * d0)) s = 3 * d0;
            return s;
        };
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    return HermiteCurve(std::move(x), std::move(y), std::move(d));
}

std::vector<double> uniform_derivative(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 5) fail(ErrorCode::input_domain, "uniform derivative needs at least five samples");
    std::vector<double> d(n);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / (12 * h);
    d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h);
    d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h);
    d[n - 1] = (25 * y[n - 1] - 48 * y[n - 2] + 36 * y[n - 3] - 16 * y[n - 4] + 3 * y[n - 5]) / (12 * h);
    d[n - 2] = (3 * y[n - 1] + 10 * y[n - 2] - 18 * y[n - 3] + 6 * y[n - 4] - y[n - 5]) / (12 * h);
    return d;
}

HermiteCurve make_fd_hermite(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) fail(ErrorCode::input_domain, "interpolation needs at least two consistent nodes");
    std::vector<double> d(n);
    const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
    bool uniform = n >= 5;
    for (std::size_t i = 1; i < n && uniform; ++i)
        uniform = std::abs((x[i] - x[i - 1]) - h) <= 1e-9 * std::abs(h);
    if (uniform) {
        d = uniform_derivative(y, h);
    } else if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
            const double x0 = x[a], x1 = x[a + 1], x2 = x[a + 2], t = x[i];
            // Derivative of the quadratic through three nodes.
            d[i] = y[a] * (2 * t - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
                   y[a + 1] * (2 * t - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
                   y[a + 2] * (2 * t - x0 - x1) / ((x2 - x0) * (x2 - x1));
        }
    }
    return HermiteCurve(std::move(x), std::move(y), std::move(d));
}

double circle_representative(double x, double centre) {
    const double two_pi = 2.0 * std::numbers::pi;
    return x + two_pi * std::floor((centre + 0.5 * two_pi - x) / two_pi);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0) fail(ErrorCode::configuration, "FFT size must be positive");
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* buf = fftw_alloc_complex(n);
    forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void Fft::forward(std::vector<cplx>& data) const {
    if (data.size() != n_) fail(ErrorCode::internal, "FFT buffer size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void Fft::backward(std::vector<cplx>& data) const {
    if (data.size() != n_) fail(ErrorCode::internal, "FFT buffer size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), p, p);
}

const Fft& cached_fft(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<Fft>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fft>(n);
    return *slot;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned worker_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DEGENWAVE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(std::min<long>(v, hw));
    }
    return hw;
}

namespace {
thread_local bool inside_pool = false;
}  // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), count));
    if (threads <= 1 || inside_pool) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            inside_pool = true;
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace degenwave
