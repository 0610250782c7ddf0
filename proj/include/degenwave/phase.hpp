#pragma once

#include "degenwave/errors.hpp"
#include "degenwave/growth.hpp"
#include "degenwave/numerics.hpp"
#include "degenwave/shear.hpp"
#include "degenwave/symbols.hpp"

#include <functional>
#include <string>
#include <vector>

namespace degenwave {

// Principal symbol p(t, x, xi) = lambda0 (f'(t, x) gamma(lambda0, xi) - (Gamma f)'(t, x))
// and the partial derivatives used by the ray and h equations.
struct SymbolJet {
    double p = 0.0;
    double p_xi = 0.0;
    double p_x = 0.0;
    double p_xx = 0.0;
    double p_xxi = 0.0;
    double p_xixi = 0.0;
    double p_txi = 0.0;
    double p_tx = 0.0;
    // Real zeroth-order coefficient of the conjugated operator:
    // (lambda0 / 2) (f'' gamma' - (Gamma f)'' gamma' / gamma).
    double sub = 0.0;
    // (lambda0 / 2) (Gamma f)'' gamma' / gamma, the L^2 growth rate of the transport equation.
    double H = 0.0;
};

SymbolJet symbol_jet(const Symbol& gamma, const ShearProfile& shear, double lambda0, double t, double x, double xi);

enum class WindowMode {
    ratio,  // x0 = c_x0 eps, (x1 - x0) / x0 from the gamma ratio formula
    span    // user-given (x0, x1)
};

struct WindowSpec {
    WindowMode mode = WindowMode::ratio;
    double c_x0 = 0.5;
    double x0 = 0.0;  // span mode only
    double x1 = 0.0;  // span mode only

    // "ratio" or "span:<x0>,<x1>".
    static WindowSpec parse(const std::string& spec);
    std::string str() const;
};

// Launch window x0 < x0' < x1' < x1 (thirds).
struct Window {
    double x0 = 0.0;
    double x0p = 0.0;
    double x1p = 0.0;
    double x1 = 0.0;
    double width() const { return x1 - x0; }
};

Window make_window(const Symbol& gamma, double lambda0, double eps, const WindowSpec& spec);

// Initial phase slope d_x Phi(0, x) on the window, built from f' frozen at t = 0.
struct SteadySlope {
    Symbol gamma;
    ShearProfile shear;
    double lambda0 = 0.0;
    double eps = 0.0;
    Window window;
    double E = 0.0;  // separation constant: p(0, x, slope(x)) = -lambda0 E
    double slope_min = 0.0;
    double slope_max = 0.0;

    double operator()(double x) const;
};

// Ratio windows must keep the slope in [lambda0, (1 + eps) lambda0]; span windows in
// [lambda0, 2 lambda0]. Violations raise parameter errors naming the endpoint.
SteadySlope steady_phase_slope(const Symbol& gamma, const ShearProfile& shear, double lambda0, double eps,
                               const WindowSpec& spec);

// s - (q + r + s) h + q h^2 at (t, X, Xi).
double h_rhs(const Symbol& gamma, const ShearProfile& shear, double lambda0, double t, double X, double Xi, double h);

struct Bicharacteristic {
    double x_launch = 0.0;
    std::vector<double> t;
    std::vector<double> X;
    std::vector<double> Xi;
    std::vector<double> h;
    std::vector<double> I;            // integrating factor int (p_xix / p_x - p_xixi (1 - h) / p_xi)(-p_x) dt
    std::vector<double> hamiltonian;  // p(t, X, Xi)
    std::vector<double> phi;          // Phi(t, X(t))
    std::vector<double> ddphi;        // d_x^2 Phi(t, X(t)) recovered from h
    std::vector<double> log_amp;      // log a(t, X(t)) - log a0(X(0))
    std::vector<double> log_jacobian; // log dX / dx_launch
    std::vector<double> h_budget;     // int |H| dt
    bool complete = true;
};

struct RayOptions {
    OdeTolerance tol{1e-12, 1e-12};
    double xi_max = 1e12;
};

// Thrown when a ray leaves the computable region; carries the samples recorded so far.
class HorizonError : public Error {
public:
    HorizonError(const std::string& msg, Bicharacteristic partial)
        : Error(ErrorCode::horizon, msg), partial_(std::move(partial)) {}
    const Bicharacteristic& partial() const { return partial_; }

private:
    Bicharacteristic partial_;
};

// Integrates the ray from (x, Xi0) with h(0) = 0 and Phi(0) = phi0, sampling at `times`.
Bicharacteristic integrate_bicharacteristic(const Symbol& gamma, const ShearProfile& shear, double lambda0, double x,
                                            double Xi0, const std::vector<double>& times, double phi0 = 0.0,
                                            const RayOptions& opts = {});

// mu = lambda0^{2 delta3 N0} / (x0 eps) gamma(lambda_t) / gamma(lambda0) gamma'(lambda0) / gamma'(lambda_t),
// with gamma = gamma(lambda0, .) and x0 = c_x0 eps.
double mu_of_t(const Symbol& gamma, const AsymptoticParameters& params, double lambda0, double eps, double lambda_t);

struct PhaseField {
    double lambda0 = 0.0;
    double eps = 0.0;
    double E = 0.0;
    Window window;
    WindowSpec window_spec;
    std::vector<double> t;
    std::vector<double> x_launch;      // fan abscissae, uniform over [x0, x1]
    std::vector<Bicharacteristic> rays;
    std::vector<double> lambda_t;      // lower comparison frequency at each t
    std::vector<double> lambda_bar_t;  // upper comparison frequency at each t
    std::vector<double> mu;            // mu(t)

    std::size_t mid_ray() const { return rays.size() / 2; }
    // Position of the ray launched at x (interpolated across the fan) at sample j.
    double image(std::size_t j, double x) const;
};

struct FanOptions {
    std::size_t rays = 257;
    RayOptions ray;
};

// Launches the fan at t = 0 and samples every ray at `times` (first entry 0).
PhaseField build_phase(const Symbol& gamma, const ShearProfile& shear, const AsymptoticParameters& params,
                       double lambda0, double eps, const WindowSpec& window, const std::vector<double>& times,
                       const FanOptions& opts = {});

struct PhaseGrid {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> ddphi;
    double image_x0 = 0.0, image_x0p = 0.0, image_x1p = 0.0, image_x1 = 0.0;
};

// Smooth step on [0, 1]: 0 at 0, 1 at 1, all derivatives vanishing at both ends,
// built from the bump exp(1 - 1 / (1 - u^2)).
double smooth_step(double v);
// exp(1 - 1 / (1 - u^2)) for |u| < 1, else 0.
double bump(double u);

// Phase on the uniform grid x_j = 2 pi j / n at fan sample j_t.
PhaseGrid phase_on_grid(const PhaseField& field, std::size_t j_t, std::size_t n);

// Raises focal_point if the fan images are not strictly increasing at some sample.
void check_no_crossing(const PhaseField& field);

}  // namespace degenwave
