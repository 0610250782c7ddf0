#include "degenwave/wavepacket.hpp"

#include "degenwave/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace degenwave {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

WavePacket assemble(const PhaseGrid& phase, const AmplitudeGrid& amplitude, double lambda0, double lambda_t,
                    double mu_t) {
    if (phase.x.size() != amplitude.x.size()) fail(ErrorCode::input_domain, "phase and amplitude grids differ");
    if (phase.t != amplitude.t) fail(ErrorCode::input_domain, "phase and amplitude samples are at different times");
    if (phase.image_x1 - phase.image_x0 >= 2.0 * std::numbers::pi)
        fail(ErrorCode::periodization, "window image does not fit one period");
    WavePacket wp;
    wp.t = phase.t;
    wp.lambda0 = lambda0;
    wp.lambda_t = lambda_t;
    wp.mu_t = mu_t;
    wp.image_x0 = phase.image_x0;
    wp.image_x0p = phase.image_x0p;
    wp.image_x1p = phase.image_x1p;
    wp.image_x1 = phase.image_x1;
    wp.amplitude = amplitude.a;
    wp.phase = phase.phi;
    wp.psi.resize(phase.x.size());
    for (std::size_t k = 0; k < wp.psi.size(); ++k)
        wp.psi[k] = amplitude.a[k] == 0.0 ? cplx(0.0, 0.0) : amplitude.a[k] * std::polar(1.0, phase.phi[k]);
    return wp;
}

WavePacket packet_at(const PhaseField& fan, const AmplitudeField& af, std::size_t j, std::size_t n) {
    return assemble(phase_on_grid(fan, j, n), amplitude_on_grid(af, fan, j, n), fan.lambda0, fan.lambda_t[j],
                    fan.mu[j]);
}

std::vector<cplx> coefficients(const std::vector<cplx>& psi) {
    std::vector<cplx> c = psi;
    cached_fft(c.size()).forward(c);
    const double inv = 1.0 / static_cast<double>(c.size());
    for (auto& v : c) v *= inv;
    return c;
}

std::vector<cplx> samples(const std::vector<cplx>& coeffs) {
    std::vector<cplx> u = coeffs;
    cached_fft(u.size()).backward(u);
    return u;
}

double l2_norm(const std::vector<cplx>& u) { return std::sqrt(std::max(0.0, inner(u, u).real())); }

cplx inner(const std::vector<cplx>& u, const std::vector<cplx>& v) {
    if (u.size() != v.size()) fail(ErrorCode::input_domain, "inner product of fields on different grids");
    cplx s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += std::conj(u[k]) * v[k];
    return s * (2.0 * std::numbers::pi / static_cast<double>(u.size()));
}

Decomposition decompose(const std::vector<cplx>& psi, double mu) {
    const std::size_t n = psi.size();
    std::vector<cplx> c = coefficients(psi), lo(n, 0.0), hi(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(static_cast<double>(wavenumber(j, n))) < mu)
            lo[j] = c[j];
        else
            hi[j] = c[j];
    }
    return {samples(hi), samples(lo)};
}

double weighted_norm(const std::vector<cplx>& psi, double s, double sigma, const Symbol& gamma, double lambda0,
                     Normalization norm) {
    const std::size_t n = psi.size();
    const std::vector<cplx> c = coefficients(psi);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = std::norm(c[j]);
        if (a == 0.0) continue;
        const double k = static_cast<double>(wavenumber(j, n));
        double w = 1.0;
        if (s != 0.0) w *= std::pow(lambda0 * lambda0 + k * k, s);
        if (sigma != 0.0) w *= std::pow(gamma(lambda0, k), 2.0 * sigma);
        sum += w * a;
    }
    const double v = std::sqrt(2.0 * std::numbers::pi * sum);
    return norm == Normalization::packet ? kPacketNormFactor * v : v;
}

double band_fraction(const std::vector<cplx>& psi, double lo, double hi) {
    const std::size_t n = psi.size();
    const std::vector<cplx> c = coefficients(psi);
    double in = 0.0, all = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double k = std::abs(static_cast<double>(wavenumber(j, n)));
        const double a = std::norm(c[j]);
        all += a;
        if (k > lo && k < hi) in += a;
    }
    return all > 0 ? in / all : 0.0;
}

double spectral_centroid(const std::vector<cplx>& psi) {
    const std::size_t n = psi.size();
    const std::vector<cplx> c = coefficients(psi);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = std::norm(c[j]);
        num += std::abs(static_cast<double>(wavenumber(j, n))) * a;
        den += a;
    }
    return den > 0 ? num / den : 0.0;
}

double top_band_fraction(const std::vector<cplx>& coeffs) {
    const std::size_t n = coeffs.size();
    const double cut = 0.5 * static_cast<double>(n) * (7.0 / 8.0);
    double top = 0.0, all = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = std::norm(coeffs[j]);
        all += a;
        if (std::abs(static_cast<double>(wavenumber(j, n))) > cut) top += a;
    }
    return all > 0 ? top / all : 0.0;
}

namespace {

constexpr char kMagic[4] = {'D', 'W', 'P', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) fail(ErrorCode::io, "truncated packet snapshot");
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const WavePacket& wp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint64_t>(wp.psi.size()));
    put(out, wp.t);
    put(out, wp.lambda0);
    put(out, wp.lambda_t);
    put(out, wp.mu_t);
    for (const cplx& z : wp.psi) {
        put(out, z.real());
        put(out, z.imag());
    }
    if (!out) fail(ErrorCode::io, "failed writing '" + path + "'");
}

WavePacket read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(ErrorCode::parse, "'" + path + "' is not a packet snapshot");
    if (get<std::uint32_t>(in) != kVersion) fail(ErrorCode::parse, "unsupported packet snapshot version");
    const auto n = get<std::uint64_t>(in);
    if (n > (std::uint64_t{1} << 32)) fail(ErrorCode::parse, "implausible snapshot size");
    WavePacket wp;
    wp.t = get<double>(in);
    wp.lambda0 = get<double>(in);
    wp.lambda_t = get<double>(in);
    wp.mu_t = get<double>(in);
    wp.psi.resize(n);
    for (auto& z : wp.psi) {
        const double re = get<double>(in);
        const double im = get<double>(in);
        z = {re, im};
    }
    return wp;
}

}  // namespace degenwave
