#pragma once

#include "degenwave/amplitude.hpp"
#include "degenwave/numerics.hpp"
#include "degenwave/phase.hpp"
#include "degenwave/symbols.hpp"

#include <string>
#include <vector>

namespace degenwave {

// Samples of psi = a e^{i Phi} on x2_k = 2 pi k / n. The two-dimensional packet is
// Re(e^{i lambda0 x1} psi) on the torus (2 pi periodic in both variables).
struct WavePacket {
    double t = 0.0;
    double lambda0 = 0.0;
    double lambda_t = 0.0;
    double mu_t = 0.0;
    std::vector<cplx> psi;
    // Real amplitude and unwrapped phase samples (psi = amplitude e^{i phase}); empty when
    // the packet was read from a snapshot file.
    std::vector<double> amplitude;
    std::vector<double> phase;
    double image_x0 = 0.0, image_x0p = 0.0, image_x1p = 0.0, image_x1 = 0.0;
};

WavePacket assemble(const PhaseGrid& phase, const AmplitudeGrid& amplitude, double lambda0, double lambda_t,
                    double mu_t);

// Packet at fan sample j on an n-point grid.
WavePacket packet_at(const PhaseField& fan, const AmplitudeField& af, std::size_t j, std::size_t n);

// Fourier coefficients c_k = (1/n) sum_j psi_j e^{-i k x_j} in FFT slot order.
std::vector<cplx> coefficients(const std::vector<cplx>& psi);
std::vector<cplx> samples(const std::vector<cplx>& coeffs);

// ||u||_{L^2(0, 2 pi)} and the pairing int conj(u) v dx, computed from samples.
double l2_norm(const std::vector<cplx>& u);
cplx inner(const std::vector<cplx>& u, const std::vector<cplx>& v);

// Norms of the two-dimensional packet Re(e^{i lambda0 x1} psi): sqrt(pi) times the mode norm.
constexpr double kPacketNormFactor = 1.7724538509055160273;  // sqrt(pi)

struct Decomposition {
    std::vector<cplx> main;
    std::vector<cplx> small;
};

// Sharp Fourier split at |k| < mu (small) and |k| >= mu (main).
Decomposition decompose(const std::vector<cplx>& psi, double mu);

enum class Normalization {
    packet,  // norm of Re(e^{i lambda0 x1} psi) on the torus
    mode     // norm of psi on the circle
};

// (sum_k (lambda0^2 + k^2)^s gamma(lambda0, k)^{2 sigma} |c_k|^2 2 pi)^{1/2}, times sqrt(pi) for packet norms.
double weighted_norm(const std::vector<cplx>& psi, double s, double sigma, const Symbol& gamma, double lambda0,
                     Normalization norm = Normalization::packet);

// Fraction of ||psi||^2 carried by lo < |k| < hi.
double band_fraction(const std::vector<cplx>& psi, double lo, double hi);

// sum |k| |c_k|^2 / sum |c_k|^2.
double spectral_centroid(const std::vector<cplx>& psi);

// Fraction of ||c||^2 in the top eighth of |k| <= n/2.
double top_band_fraction(const std::vector<cplx>& coeffs);

// Snapshot layout (little-endian): char[4] "DWPK", uint32 version = 1, uint64 n,
// f64 t, f64 lambda0, f64 lambda_t, f64 mu_t, then n pairs of f64 (re, im).
void write_snapshot(const std::string& path, const WavePacket& wp);
WavePacket read_snapshot(const std::string& path);

}  // namespace degenwave
