#pragma once

#include "degenwave/numerics.hpp"
#include "degenwave/shear.hpp"
#include "degenwave/symbols.hpp"
#include "degenwave/wavepacket.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace degenwave {

// Linearized operator on the x1-mode lambda0, conjugated by Gamma^{1/2} and acting on the
// Fourier coefficients (FFT slot order, modes -n/2 < k <= n/2) of psi:
//   L psi = i lambda0 [g^{1/2} (f' g^{1/2} psi) - g^{1/2} ((Gamma f)' g^{-1/2} psi)] + kappa upsilon(lambda0, k) psi,
// with g = gamma(lambda0, D). The flow is d_t psi = -L psi. Products with the coefficients
// are exact truncated convolutions (direct for narrow coefficient spectra, otherwise
// zero-padded FFT products on 2n points). Instances are immutable and may be shared.
class LinearOperator {
public:
    LinearOperator(Symbol gamma, ShearProfile shear, double lambda0, std::size_t n, bool dissipative = true);

    std::size_t size() const { return n_; }
    double lambda0() const { return lambda0_; }
    bool dissipative() const { return dissipative_; }
    const ShearProfile& shear() const { return shear_; }
    const Symbol& gamma() const { return gamma_; }

    // L (with the dissipative diagonal when enabled).
    void apply(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const;
    // Principal part i lambda0 g^{1/2} (f' g^{1/2} psi).
    void apply_principal(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const;
    // Adjoint of L in l^2 of coefficients.
    void apply_adjoint(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const;
    // (L + L^*) / 2 without the dissipative diagonal.
    void apply_symmetric(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const;
    // Dissipative multiplier kappa upsilon(lambda0, k) at slot j (0 when not dissipative).
    double damping(std::size_t j) const { return damping_.empty() ? 0.0 : damping_[j]; }

    // Largest stable RK4 step: safety / spectral-radius bound of L.
    double cfl_limit(double safety = 0.5) const;

    // Fourier coefficients of f' and (Gamma f)' at time t for |m| <= bandwidth().
    long bandwidth() const { return K_; }
    void coefficient_modes(double t, std::vector<cplx>& fprime, std::vector<cplx>& gprime) const;

private:
    void convolve(const std::vector<cplx>& coef, const std::vector<cplx>& in, std::vector<cplx>& out) const;
    void principal_and_transport(double t, const std::vector<cplx>& c, std::vector<cplx>& A, std::vector<cplx>& B,
                                 bool adjoint_b) const;

    Symbol gamma_;
    ShearProfile shear_;
    double lambda0_;
    std::size_t n_;
    bool dissipative_;
    long K_;
    std::vector<double> half_;      // gamma(lambda0, k)^{1/2}
    std::vector<double> inv_half_;  // gamma(lambda0, k)^{-1/2}
    std::vector<double> damping_;   // kappa upsilon(lambda0, k)
};

// Spatial-sample wrappers: psi samples on x_j = 2 pi j / n.
std::vector<cplx> apply_L(const ShearProfile& shear, const Symbol& gamma, double lambda0, double t,
                          const std::vector<cplx>& psi);
std::vector<cplx> apply_L_diss(const ShearProfile& shear, const Symbol& gamma, double lambda0, double t,
                               const std::vector<cplx>& psi);

enum class Scheme {
    rk4,   // classical four-stage Runge-Kutta on the full operator
    split  // Strang splitting: exact diagonal damping half steps around an RK4 step
};

// One step of d_t c = -L c. Throws configuration when dt exceeds the CFL limit.
void step(const LinearOperator& op, std::vector<cplx>& c, double t, double dt, Scheme scheme = Scheme::rk4,
          double cfl_safety = 0.5);

// Advances c from t0 to t1 in equal steps no larger than the CFL limit; returns the step count.
std::size_t propagate(const LinearOperator& op, std::vector<cplx>& c, double t0, double t1,
                      Scheme scheme = Scheme::rk4, double cfl_safety = 0.5);

// Raises resolution when the top eighth of the spectrum carries more than `threshold` of the energy.
void check_resolution(const std::vector<cplx>& coeffs, double threshold = 1e-8);

struct CommutatorProbe {
    double norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// ||(L + L^*) / 2|| at time t by power iteration from a seeded random start.
CommutatorProbe commutator_norm_probe(const ShearProfile& shear, const Symbol& gamma, double lambda0, std::size_t n,
                                      double t = 0.0, std::uint64_t seed = 1, std::size_t max_iter = 400,
                                      double rel_tol = 1e-7);

struct ResidualReport {
    std::vector<double> t;
    std::vector<double> norm;           // packet norm of d_t psi + L psi
    std::vector<double> cadence_error;  // |fourth-order minus second-order time difference|
    std::vector<double> localized;      // sup over unit windows of the packet norm on the window
    std::vector<double> damping_norm;   // packet norm of the dissipative term kappa Upsilon psi
    double integral = 0.0;              // trapezoid of norm over t
    double damping_integral = 0.0;
};

// Residual of packet snapshots at uniform times. When every packet carries amplitude and
// phase samples, d_t psi = e^{i Phi} (d_t a + i a d_t Phi) with five-point stencils applied
// to a and Phi - omega t; otherwise the stencils act on e^{-i omega t} psi.
// Throws cadence when the difference estimate exceeds 10% of the residual at some
// interior time and the estimate is above the round-off floor.
ResidualReport residual(const std::vector<WavePacket>& packets, const LinearOperator& op, double omega = 0.0,
                        bool check_cadence = true);

struct DualityParams {
    double s_prime = 1.0;
    double s = 1.0;
    double M = 4.0;
    Scheme scheme = Scheme::rk4;
    double cfl_safety = 0.5;
    double energy_constant = 0.0;  // C-hat for the energy ledger (0 disables the check)
};

struct DualityReport {
    std::vector<double> t;
    std::vector<double> pairing;       // <phi, phi~>(t) for the two-dimensional fields
    std::vector<double> norm;          // ||phi(t)||
    std::vector<double> packet_norm;   // ||phi~(t)||
    std::vector<double> ledger_bound;  // ||phi0|| exp(C t)
    bool ledger_ok = true;
    double pairing_initial = 0.0;
    double pairing_final = 0.0;
    double pairing_threshold = 0.0;      // ||phi0|| ||phi~0|| / 4
    double small_correction = 0.0;       // <phi, phi~^small>(t*)
    double main_pairing = 0.0;           // <phi, phi~^main>(t*)
    double hsprime_lower_bound = 0.0;    // main_pairing / ||Gamma^{1/2} phi~^main||_{H^{-s'}}
    double initial_hsprime = 0.0;        // ||Gamma^{-1/2} psi0||_{H^{s'}}
    double growth_ratio = 0.0;           // hsprime_lower_bound / initial_hsprime
    double predicted_growth = 0.0;       // (gamma ratio)^{1/2} M^{s'} lambda0^{s'-s}
    double gamma_ratio = 0.0;            // gamma(lambda0, lambda0) / gamma(lambda0, M lambda0)
    std::size_t steps = 0;
};

// Evolves psi0 = packets[0] through the packet times and compares against the packets.
DualityReport duality_experiment(const std::vector<WavePacket>& packets, const LinearOperator& op,
                                 const DualityParams& params);

}  // namespace degenwave
