#pragma once

#include "degenwave/phase.hpp"

#include <vector>

namespace degenwave {

// a0(x) = (x1' - x0')^{-1/2} chi((x - x0') / (x1' - x0')), chi(y) = c bump(2y - 1) with
// c normalizing int_0^1 chi^2 = 1.
struct InitialAmplitude {
    double x0p = 0.0;
    double x1p = 0.0;

    double operator()(double x) const;
    // d^n a0 / dx^n for n <= 2.
    double derivative(int n, double x) const;
};

InitialAmplitude initial_amplitude(const Window& window);

// L^2 normalization constant c of chi.
double bump_normalization();

struct AmplitudeField {
    std::vector<double> t;
    std::vector<double> x_launch;
    InitialAmplitude a0;
    // values[i][j] = a(t_j, X(t_j; x_launch[i])).
    std::vector<std::vector<double>> values;
    // zeroth_order_log[i][j] = int_0^{t_j} (p_xixi ddPhi / 2 + sub) dt along ray i.
    std::vector<std::vector<double>> zeroth_order_log;
};

// Transport coefficient p_xixi ddPhi / 2 + sub at (t, x, xi).
double transport_coefficient(const Symbol& gamma, const ShearProfile& shear, double lambda0, double t, double x,
                             double xi, double ddphi);

// Rides the fan: a(t, X(t; x)) = a0(x) exp(-int coefficient dt).
AmplitudeField evolve_amplitude(const PhaseField& fan, double t_star);

// ||a(t_j)||_{L^2} at every fan sample; quadrature over the launch points with the ray-map Jacobian.
std::vector<double> l2_budget(const AmplitudeField& af, const PhaseField& fan);

// max |d_x a| and max |d_x^2 a| over the fan at sample j (fan finite differences).
struct DerivativeEnvelope {
    double d1 = 0.0;
    double d2 = 0.0;
};
DerivativeEnvelope derivative_envelope(const AmplitudeField& af, const PhaseField& fan, std::size_t j);

struct AmplitudeGrid {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> a;
};

// Amplitude on the uniform grid x_k = 2 pi k / n at fan sample j; zero outside the support image.
AmplitudeGrid amplitude_on_grid(const AmplitudeField& af, const PhaseField& fan, std::size_t j, std::size_t n);

}  // namespace degenwave
