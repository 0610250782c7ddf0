#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace degenwave {

using cplx = std::complex<double>;

// Adaptive Gauss-Kronrod (15-point) quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double* error_estimate = nullptr);

// Running integrals int_{nodes[0]}^{nodes[i]} f with a 7-point Gauss-Legendre rule per cell.
// Nodes must be nondecreasing.
std::vector<double> cumulative_integral(const std::function<double(double)>& f, const std::vector<double>& nodes);

// Root of a continuous function bracketed by [a, b] (TOMS 748).
double find_root(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-14);

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(const OdeState& x, OdeState& dxdt, double t)>;

struct OdeTolerance {
    double abs = 1e-12;
    double rel = 1e-12;
};

// Adaptive Dormand-Prince 5(4) integration of x from t0 to t1 (t1 >= t0).
void integrate_ode(const OdeRhs& rhs, OdeState& x, double t0, double t1, OdeTolerance tol = {});

// Adaptive Dormand-Prince 5(4) integration stepping exactly onto each of the
// increasing output times; observer(x, t) is called at every output time,
// including times[0] (the initial state).
void integrate_ode_times(const OdeRhs& rhs, OdeState& x, const std::vector<double>& times,
                         const std::function<void(const OdeState&, double)>& observer, OdeTolerance tol = {});

// Piecewise cubic Hermite interpolation on strictly increasing nodes with
// prescribed nodal slopes. Evaluation outside the node range throws.
class HermiteCurve {
public:
    HermiteCurve() = default;
    HermiteCurve(std::vector<double> x, std::vector<double> y, std::vector<double> dydx);

    double operator()(double x) const;
    double prime(double x) const;
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::size_t segment(double x) const;
    std::vector<double> x_, y_, d_;
};

// Fritsch-Carlson limiting of nodal slopes so the Hermite interpolant of
// monotone data stays monotone. Slopes of the wrong sign are zeroed and
// large slopes are scaled back onto the monotonicity region.
std::vector<double> limit_monotone_slopes(const std::vector<double>& x,
                                          const std::vector<double>& y,
                                          std::vector<double> dydx);

// Monotone cubic (PCHIP) interpolant with slopes estimated from the data.
HermiteCurve make_pchip(std::vector<double> x, std::vector<double> y);

// Cubic Hermite interpolant with finite-difference slopes: five-point stencils on
// uniform nodes, three-point stencils otherwise. Not shape preserving.
HermiteCurve make_fd_hermite(std::vector<double> x, std::vector<double> y);

// Finite-difference derivative of samples on uniform nodes with spacing h
// (fourth order inside, one-sided fourth order at the ends).
std::vector<double> uniform_derivative(const std::vector<double>& y, double h);

// Representative of x modulo 2 pi in [centre - pi, centre + pi).
double circle_representative(double x, double centre);

// Trapezoid rule on arbitrary (sorted) abscissae.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

// In-place complex FFT of fixed size backed by FFTW. Forward transform uses
// the e^{-ikx} convention; backward is unnormalized.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }
    void forward(std::vector<cplx>& data) const;
    void backward(std::vector<cplx>& data) const;

private:
    std::size_t n_;
    void* forward_plan_;
    void* backward_plan_;
};

// Per-thread FFT of size n, planned on first use.
const Fft& cached_fft(std::size_t n);

// Signed wavenumber of FFT slot j for a grid of size n: j for j <= n/2, j - n otherwise.
inline long wavenumber(std::size_t j, std::size_t n) {
    return j <= n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

inline std::size_t slot_of(long k, std::size_t n) {
    return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<long>(n));
}

bool is_power_of_two(std::size_t n);

// Number of worker threads for sweeps, honouring DEGENWAVE_THREADS.
unsigned worker_threads();

// Runs body(i) for i in [0, count) on up to worker_threads() threads.
// Nested calls from a worker run serially. The first exception thrown by any
// task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace degenwave
