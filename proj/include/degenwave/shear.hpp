#pragma once

#include "degenwave/numerics.hpp"
#include "degenwave/symbols.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degenwave {

// Pointwise derivatives of f and of Gamma f (multiplier gamma(0, k)) at one (t, x2),
// together with their time derivatives. Index n is the x2-derivative order.
struct ShearSample {
    static constexpr int kOrders = 7;
    double f[kOrders] = {};
    double gf[kOrders] = {};
    double f_t[kOrders] = {};
    double gf_t[kOrders] = {};
};

// Background shear f(t, x2) on the circle R / 2 pi Z, stored by its Fourier
// coefficients over k >= 0 (f real, so f_hat(-k) = conj f_hat(k)). With
// kappa > 0 each mode decays by exp(-kappa upsilon(0, k) t).
class ShearProfile {
public:
    struct Mode {
        long k;
        cplx coeff;
    };

    ShearProfile(std::vector<Mode> modes, double kappa = 0.0, std::optional<Symbol> upsilon = std::nullopt);

    // amplitude * cos(k x2).
    static ShearProfile cosine(long k, double amplitude = 1.0, double kappa = 0.0,
                               std::optional<Symbol> upsilon = std::nullopt);
    // f(x2) = slope * x2: constant f', f'' = 0. Test stub for pure transport.
    static ShearProfile linear(double slope);
    // "cos:<k>[,<amplitude>]", "lin:<slope>" or "coeffs:<path>" (CSV rows k,re,im).
    static ShearProfile parse(const std::string& spec, double kappa = 0.0,
                              std::optional<Symbol> upsilon = std::nullopt);

    ShearProfile with_dissipation(double kappa, std::optional<Symbol> upsilon) const;

    const std::vector<Mode>& modes() const { return modes_; }
    double kappa() const { return kappa_; }
    double linear_slope() const { return slope_; }
    const std::optional<Symbol>& upsilon() const { return upsilon_; }
    bool steady() const { return kappa_ == 0.0; }
    bool even() const;
    long max_wavenumber() const;
    std::string spec() const { return spec_; }

    // exp(-kappa upsilon(0, k) t); 1 when steady.
    double decay(long k, double t) const;

    // d^n/dx2^n f(t, x2), n <= 6.
    double derivative(double t, int n, double x2) const;
    // d^n/dx2^n (Gamma f)(t, x2) with multiplier gamma(0, k), n <= 4.
    double multiplier_image(const Symbol& gamma, double t, int n, double x2) const;
    // All orders of f and Gamma f plus time derivatives at one point.
    ShearSample sample(const Symbol& gamma, double t, double x2) const;

    // Fourier coefficient of d^n/dx2^n f at wavenumber k (any sign) and time t.
    // For n >= 1 the linear part contributes slope to the k = 0 coefficient of f';
    // for n = 0 only the periodic part is returned.
    cplx derivative_coeff(double t, int n, long k) const;
    // Same for Gamma f.
    cplx multiplier_image_coeff(const Symbol& gamma, double t, int n, long k) const;

    double fpp0(double t) const { return derivative(t, 2, 0.0); }
    // Sign of f''(0, 0); 0 when f is not quadratically degenerate at x2 = 0.
    int degeneracy_sign() const;

    // t with int_0^t |f''(t', 0)| dt' = tau.
    double tf_of_tau(double tau) const;
    // int_0^t |f''(t', 0)| dt'.
    double tau_of_tf(double t) const;

private:
    std::vector<Mode> modes_;
    std::vector<double> rates_;  // kappa upsilon(0, k) per mode
    double kappa_;
    double slope_ = 0.0;
    std::optional<Symbol> upsilon_;
    std::string spec_;
};

}  // namespace degenwave
