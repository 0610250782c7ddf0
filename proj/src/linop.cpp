#include "degenwave/linop.hpp"

#include "degenwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace degenwave {

namespace {

constexpr long kDirectBandwidth = 16;
const cplx I_UNIT(0.0, 1.0);

double coeff_norm(const std::vector<cplx>& c) {
    double s = 0.0;
    for (const cplx& v : c) s += std::norm(v);
    return std::sqrt(2.0 * std::numbers::pi * s);
}

}  // namespace

LinearOperator::LinearOperator(Symbol gamma, ShearProfile shear, double lambda0, std::size_t n, bool dissipative)
    : gamma_(std::move(gamma)),
      shear_(std::move(shear)),
      lambda0_(lambda0),
      n_(n),
      dissipative_(dissipative && shear_.kappa() > 0) {
    if (!is_power_of_two(n) || n < 8) fail(ErrorCode::configuration, "grid size must be a power of two >= 8");
    if (!(lambda0 > 0) || !std::isfinite(lambda0)) fail(ErrorCode::input_domain, "lambda0 must be positive");
    K_ = shear_.max_wavenumber();
    if (K_ > static_cast<long>(n)) fail(ErrorCode::configuration, "shear bandwidth exceeds the grid size");
    half_.resize(n);
    inv_half_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double g = gamma_(lambda0, static_cast<double>(wavenumber(j, n)));
        half_[j] = std::sqrt(g);
        inv_half_[j] = 1.0 / half_[j];
    }
    if (dissipative_) {
        const Symbol& ups = *shear_.upsilon();
        damping_.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            damping_[j] = shear_.kappa() * ups(lambda0, static_cast<double>(wavenumber(j, n)));
    }
}

void LinearOperator::coefficient_modes(double t, std::vector<cplx>& fprime, std::vector<cplx>& gprime) const {
    fprime.assign(2 * K_ + 1, 0.0);
    gprime.assign(2 * K_ + 1, 0.0);
    for (long m = -K_; m <= K_; ++m) {
        fprime[m + K_] = shear_.derivative_coeff(t, 1, m);
        gprime[m + K_] = shear_.multiplier_image_coeff(gamma_, t, 1, m);
    }
}

void LinearOperator::convolve(const std::vector<cplx>& coef, const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const long n = static_cast<long>(n_);
    out.assign(n_, 0.0);
    if (K_ <= kDirectBandwidth) {
        for (long m = -K_; m <= K_; ++m) {
            const cplx c = coef[m + K_];
            if (c == 0.0) continue;
            for (long j = 0; j < n; ++j) {
                const long src = wavenumber(static_cast<std::size_t>(j), n_) - m;
                if (src <= -n / 2 || src > n / 2) continue;
                out[j] += c * in[slot_of(src, n_)];
            }
        }
        return;
    }
    const std::size_t p = 2 * n_;
    std::vector<cplx> F(p, 0.0), U(p, 0.0);
    for (long m = -K_; m <= K_; ++m) F[slot_of(m, p)] = coef[m + K_];
    for (std::size_t j = 0; j < n_; ++j) U[slot_of(wavenumber(j, n_), p)] = in[j];
    const Fft& fft = cached_fft(p);
    fft.backward(F);
    fft.backward(U);
    for (std::size_t j = 0; j < p; ++j) U[j] *= F[j];
    fft.forward(U);
    const double inv = 1.0 / static_cast<double>(p);
    for (std::size_t j = 0; j < n_; ++j) out[j] = U[slot_of(wavenumber(j, n_), p)] * inv;
}

void LinearOperator::principal_and_transport(double t, const std::vector<cplx>& c, std::vector<cplx>& A,
                                             std::vector<cplx>& B, bool adjoint_b) const {
    if (c.size() != n_) fail(ErrorCode::input_domain, "field size does not match the operator");
    std::vector<cplx> fp, gp, tmp(n_), conv;
    coefficient_modes(t, fp, gp);
    for (std::size_t j = 0; j < n_; ++j) tmp[j] = half_[j] * c[j];
    convolve(fp, tmp, A);
    for (std::size_t j = 0; j < n_; ++j) A[j] *= half_[j];
    if (!adjoint_b) {
        for (std::size_t j = 0; j < n_; ++j) tmp[j] = inv_half_[j] * c[j];
        convolve(gp, tmp, B);
        for (std::size_t j = 0; j < n_; ++j) B[j] *= half_[j];
    } else {
        for (std::size_t j = 0; j < n_; ++j) tmp[j] = half_[j] * c[j];
        convolve(gp, tmp, B);
        for (std::size_t j = 0; j < n_; ++j) B[j] *= inv_half_[j];
    }
}

void LinearOperator::apply(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const {
    std::vector<cplx> A, B;
    principal_and_transport(t, c, A, B, false);
    out.resize(n_);
    const cplx il = I_UNIT * lambda0_;
    for (std::size_t j = 0; j < n_; ++j) out[j] = il * (A[j] - B[j]) + damping(j) * c[j];
}

void LinearOperator::apply_principal(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const {
    std::vector<cplx> A, B;
    principal_and_transport(t, c, A, B, false);
    out.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = I_UNIT * lambda0_ * A[j];
}

void LinearOperator::apply_adjoint(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const {
    std::vector<cplx> A, Bs;
    principal_and_transport(t, c, A, Bs, true);
    out.resize(n_);
    const cplx il = I_UNIT * lambda0_;
    for (std::size_t j = 0; j < n_; ++j) out[j] = -il * (A[j] - Bs[j]) + damping(j) * c[j];
}

void LinearOperator::apply_symmetric(double t, const std::vector<cplx>& c, std::vector<cplx>& out) const {
    std::vector<cplx> A, B, Bs;
    principal_and_transport(t, c, A, B, false);
    principal_and_transport(t, c, A, Bs, true);
    out.resize(n_);
    const cplx il = 0.5 * I_UNIT * lambda0_;
    for (std::size_t j = 0; j < n_; ++j) out[j] = il * (Bs[j] - B[j]);
}

double LinearOperator::cfl_limit(double safety) const {
    std::vector<cplx> fp, gp;
    coefficient_modes(0.0, fp, gp);
    double fsum = 0.0, gsum = 0.0;
    for (const cplx& v : fp) fsum += std::abs(v);
    for (const cplx& v : gp) gsum += std::abs(v);
    double hmax = 0.0, hmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        hmax = std::max(hmax, half_[j]);
        hmin = std::min(hmin, half_[j]);
        dmax = std::max(dmax, damping(j));
    }
    const double rho = lambda0_ * (hmax * hmax * fsum + gsum * hmax / hmin) + dmax;
    return rho > 0 ? safety / rho : std::numeric_limits<double>::infinity();
}

std::vector<cplx> apply_L(const ShearProfile& shear, const Symbol& gamma, double lambda0, double t,
                          const std::vector<cplx>& psi) {
    const LinearOperator op(gamma, shear, lambda0, psi.size(), false);
    std::vector<cplx> out;
    op.apply(t, coefficients(psi), out);
    return samples(out);
}

std::vector<cplx> apply_L_diss(const ShearProfile& shear, const Symbol& gamma, double lambda0, double t,
                               const std::vector<cplx>& psi) {
    const LinearOperator op(gamma, shear, lambda0, psi.size(), true);
    std::vector<cplx> out;
    op.apply(t, coefficients(psi), out);
    return samples(out);
}

namespace {

// RK4 for d_t c = -(L - diagonal) c when `conservative`, else d_t c = -L c.
void rk4(const LinearOperator& op, std::vector<cplx>& c, double t, double dt, bool conservative) {
    const std::size_t n = c.size();
    auto rhs = [&](double s, const std::vector<cplx>& x, std::vector<cplx>& out) {
        op.apply(s, x, out);
        for (std::size_t j = 0; j < n; ++j) {
            if (conservative) out[j] -= op.damping(j) * x[j];
            out[j] = -out[j];
        }
    };
    std::vector<cplx> k1, k2, k3, k4, y(n);
    rhs(t, c, k1);
    for (std::size_t j = 0; j < n; ++j) y[j] = c[j] + 0.5 * dt * k1[j];
    rhs(t + 0.5 * dt, y, k2);
    for (std::size_t j = 0; j < n; ++j) y[j] = c[j] + 0.5 * dt * k2[j];
    rhs(t + 0.5 * dt, y, k3);
    for (std::size_t j = 0; j < n; ++j) y[j] = c[j] + dt * k3[j];
    rhs(t + dt, y, k4);
    for (std::size_t j = 0; j < n; ++j) c[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

}  // namespace

void step(const LinearOperator& op, std::vector<cplx>& c, double t, double dt, Scheme scheme, double cfl_safety) {
    if (!(dt > 0)) fail(ErrorCode::configuration, "time step must be positive");
    const double limit = op.cfl_limit(cfl_safety);
    if (dt > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time step " << dt << " exceeds the CFL limit " << limit;
        fail(ErrorCode::configuration, os.str());
    }
    if (scheme == Scheme::rk4 || !op.dissipative()) {
        rk4(op, c, t, dt, false);
        return;
    }
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::exp(-0.5 * dt * op.damping(j));
    rk4(op, c, t, dt, true);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::exp(-0.5 * dt * op.damping(j));
}

std::size_t propagate(const LinearOperator& op, std::vector<cplx>& c, double t0, double t1, Scheme scheme,
                      double cfl_safety) {
    if (t1 == t0) return 0;
    if (!(t1 > t0)) fail(ErrorCode::input_domain, "propagation needs t1 > t0");
    const double limit = op.cfl_limit(cfl_safety);
    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / limit * (1.0 - 1e-12)));
    const std::size_t count = std::max<std::size_t>(steps, 1);
    const double dt = (t1 - t0) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) step(op, c, t0 + dt * static_cast<double>(i), dt, scheme, cfl_safety);
    return count;
}

void check_resolution(const std::vector<cplx>& coeffs, double threshold) {
    const double frac = top_band_fraction(coeffs);
    if (frac > threshold) {
        std::ostringstream os;
        os << "top eighth of the spectrum carries " << frac << " of the energy (threshold " << threshold << ")";
        fail(ErrorCode::resolution, os.str());
    }
}

CommutatorProbe commutator_norm_probe(const ShearProfile& shear, const Symbol& gamma, double lambda0, std::size_t n,
                                      double t, std::uint64_t seed, std::size_t max_iter, double rel_tol) {
    const LinearOperator op(gamma, shear, lambda0, n, false);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<cplx> v(n), w;
    for (auto& x : v) x = {normal(rng), normal(rng)};
    double nv = coeff_norm(v);
    for (auto& x : v) x /= nv;
    CommutatorProbe probe;
    double prev = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        op.apply_symmetric(t, v, w);
        const double nw = coeff_norm(w);
        probe.iterations = it + 1;
        probe.norm = nw;
        if (nw == 0.0) {
            probe.converged = true;
            break;
        }
        if (it > 0 && std::abs(nw - prev) <= rel_tol * nw) {
            probe.converged = true;
            break;
        }
        prev = nw;
        for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / nw;
    }
    return probe;
}

namespace {

// Fourth-order five-point time derivative at sample i of m (one-sided near the ends)
// and the second-order three-point derivative used as its error companion.
template <typename T, typename Get>
void time_stencils(std::size_t i, std::size_t m, double dt, const Get& y, T& d4, T& d2) {
    if (i >= 2 && i + 2 < m) {
        d4 = (y(i - 2) - 8.0 * y(i - 1) + 8.0 * y(i + 1) - y(i + 2)) / (12.0 * dt);
        d2 = (y(i + 1) - y(i - 1)) / (2.0 * dt);
    } else if (i < 2) {
        d4 = i == 0 ? (-25.0 * y(0) + 48.0 * y(1) - 36.0 * y(2) + 16.0 * y(3) - 3.0 * y(4)) / (12.0 * dt)
                    : (-3.0 * y(0) - 10.0 * y(1) + 18.0 * y(2) - 6.0 * y(3) + y(4)) / (12.0 * dt);
        d2 = i == 0 ? (-3.0 * y(0) + 4.0 * y(1) - y(2)) / (2.0 * dt) : (y(2) - y(0)) / (2.0 * dt);
    } else {
        const std::size_t e = m - 1;
        d4 = i == e ? (25.0 * y(e) - 48.0 * y(e - 1) + 36.0 * y(e - 2) - 16.0 * y(e - 3) + 3.0 * y(e - 4)) / (12.0 * dt)
                    : (3.0 * y(e) + 10.0 * y(e - 1) - 18.0 * y(e - 2) + 6.0 * y(e - 3) - y(e - 4)) / (12.0 * dt);
        d2 = i == e ? (3.0 * y(e) - 4.0 * y(e - 1) + y(e - 2)) / (2.0 * dt) : (y(e) - y(e - 2)) / (2.0 * dt);
    }
}

}  // namespace

ResidualReport residual(const std::vector<WavePacket>& packets, const LinearOperator& op, double omega,
                        bool check_cadence) {
    const std::size_t m = packets.size();
    if (m < 5) fail(ErrorCode::cadence, "residual needs at least five snapshots");
    const std::size_t n = op.size();
    const double dt = packets[1].t - packets[0].t;
    if (!(dt > 0)) fail(ErrorCode::cadence, "snapshot times must increase");
    bool split = true;
    for (std::size_t i = 0; i < m; ++i) {
        if (packets[i].psi.size() != n) fail(ErrorCode::input_domain, "snapshot grid does not match the operator");
        const double expect = packets[0].t + dt * static_cast<double>(i);
        if (std::abs(packets[i].t - expect) > 1e-9 * std::max(1.0, std::abs(expect)) + 1e-6 * dt)
            fail(ErrorCode::cadence, "snapshot times must be uniform");
        if (packets[i].amplitude.size() != n || packets[i].phase.size() != n) split = false;
    }
    std::vector<std::vector<cplx>> c(m), chi;
    for (std::size_t i = 0; i < m; ++i) c[i] = coefficients(packets[i].psi);
    if (!split) {
        chi.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const cplx rot = std::polar(1.0, -omega * packets[i].t);
            chi[i] = c[i];
            for (auto& v : chi[i]) v *= rot;
        }
    }
    ResidualReport rep;
    const double packet_factor = kPacketNormFactor;
    const auto window = static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(n) / (2.0 * std::numbers::pi))));
    const double dx = 2.0 * std::numbers::pi / static_cast<double>(n);
    std::vector<cplx> Lc, dtpsi(n), coarse(n), R(n), D(n), diff(n);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = packets[i].t;
        if (split) {
            // d_t (a e^{i Phi}) = e^{i Phi} (d_t a + i a d_t Phi), differencing a and Phi - omega t.
            for (std::size_t q = 0; q < n; ++q) {
                double da4, da2, dp4, dp2;
                time_stencils(i, m, dt, [&](std::size_t k) { return packets[k].amplitude[q]; }, da4, da2);
                time_stencils(i, m, dt, [&](std::size_t k) { return packets[k].phase[q] - omega * packets[k].t; },
                              dp4, dp2);
                const double a = packets[i].amplitude[q];
                const cplx e = std::polar(1.0, packets[i].phase[q]);
                dtpsi[q] = e * cplx(da4, a * (dp4 + omega));
                coarse[q] = e * cplx(da2, a * (dp2 + omega));
            }
            dtpsi = coefficients(dtpsi);
            coarse = coefficients(coarse);
        } else {
            const cplx rot = std::polar(1.0, omega * t);
            for (std::size_t j = 0; j < n; ++j) {
                cplx d4, d2;
                time_stencils(i, m, dt, [&](std::size_t k) { return chi[k][j]; }, d4, d2);
                dtpsi[j] = rot * (I_UNIT * omega * chi[i][j] + d4);
                coarse[j] = rot * (I_UNIT * omega * chi[i][j] + d2);
            }
        }
        op.apply(t, c[i], Lc);
        for (std::size_t j = 0; j < n; ++j) {
            R[j] = dtpsi[j] + Lc[j];
            diff[j] = dtpsi[j] - coarse[j];
            D[j] = op.damping(j) * c[i][j];
        }
        const double rn = packet_factor * coeff_norm(R);
        const double err = packet_factor * coeff_norm(diff);
        rep.t.push_back(t);
        rep.norm.push_back(rn);
        rep.cadence_error.push_back(err);
        rep.damping_norm.push_back(packet_factor * coeff_norm(D));

        // Unit-window localized norm from prefix sums over the doubled circle.
        const std::vector<cplx> Rs = samples(R);
        std::vector<double> prefix(2 * n + 1, 0.0);
        for (std::size_t j = 0; j < 2 * n; ++j) prefix[j + 1] = prefix[j] + std::norm(Rs[j % n]) * dx;
        double best = 0.0;
        for (std::size_t j = 0; j < n; ++j) best = std::max(best, prefix[j + std::min(window, n)] - prefix[j]);
        rep.localized.push_back(packet_factor * std::sqrt(best));

        if (check_cadence && i >= 2 && i + 2 < m) {
            const double floor = 1e-9 * packet_factor * coeff_norm(dtpsi);
            if (err > 0.1 * rn && err > floor) {
                std::ostringstream os;
                os << "snapshot cadence too coarse at t = " << t << ": difference estimate " << err
                   << " exceeds 10% of the residual " << rn;
                fail(ErrorCode::cadence, os.str());
            }
        }
    }
    rep.integral = trapezoid(rep.t, rep.norm);
    rep.damping_integral = trapezoid(rep.t, rep.damping_norm);
    return rep;
}

DualityReport duality_experiment(const std::vector<WavePacket>& packets, const LinearOperator& op,
                                 const DualityParams& params) {
    if (packets.empty()) fail(ErrorCode::input_domain, "duality experiment needs packet snapshots");
    const std::size_t n = op.size();
    const double pi = std::numbers::pi;
    DualityReport rep;
    std::vector<cplx> c = coefficients(packets[0].psi);
    const std::vector<cplx> c0 = c;
    const double norm0 = kPacketNormFactor * coeff_norm(c0);
    auto pair = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::conj(a[j]) * b[j];
        return pi * (2.0 * pi * s).real();
    };
    for (std::size_t k = 0; k < packets.size(); ++k) {
        if (packets[k].psi.size() != n) fail(ErrorCode::input_domain, "snapshot grid does not match the operator");
        if (k > 0) rep.steps += propagate(op, c, packets[k - 1].t, packets[k].t, params.scheme, params.cfl_safety);
        check_resolution(c);
        const std::vector<cplx> ck = coefficients(packets[k].psi);
        rep.t.push_back(packets[k].t);
        rep.pairing.push_back(pair(c, ck));
        rep.norm.push_back(kPacketNormFactor * coeff_norm(c));
        rep.packet_norm.push_back(kPacketNormFactor * coeff_norm(ck));
        const double bound = norm0 * std::exp(params.energy_constant * (packets[k].t - packets[0].t));
        rep.ledger_bound.push_back(bound);
        if (params.energy_constant > 0 && rep.norm.back() > bound * (1.0 + 1e-10)) rep.ledger_ok = false;
    }
    rep.pairing_initial = rep.pairing.front();
    rep.pairing_final = rep.pairing.back();
    rep.pairing_threshold = 0.25 * rep.norm.front() * rep.packet_norm.front();

    const WavePacket& last = packets.back();
    const Decomposition parts = decompose(last.psi, last.mu_t);
    const std::vector<cplx> main_c = coefficients(parts.main), small_c = coefficients(parts.small);
    rep.main_pairing = pair(c, main_c);
    rep.small_correction = pair(c, small_c);
    const Symbol& gamma = op.gamma();
    const double lambda0 = op.lambda0();
    const double dual = weighted_norm(parts.main, -params.s_prime, 0.5, gamma, lambda0);
    rep.hsprime_lower_bound = dual > 0 ? rep.main_pairing / dual : 0.0;
    rep.initial_hsprime = weighted_norm(packets[0].psi, params.s_prime, -0.5, gamma, lambda0);
    rep.growth_ratio = rep.initial_hsprime > 0 ? rep.hsprime_lower_bound / rep.initial_hsprime : 0.0;
    rep.gamma_ratio = gamma(lambda0, lambda0) / gamma(lambda0, params.M * lambda0);
    rep.predicted_growth = std::sqrt(rep.gamma_ratio) * std::pow(params.M, params.s_prime) *
                           std::pow(lambda0, params.s_prime - params.s);
    return rep;
}

}  // namespace degenwave
