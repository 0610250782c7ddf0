#include "degenwave/shear.hpp"

#include "degenwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace degenwave {

namespace {

// Real part of (ik)^n c e^{ikx}, doubled for k > 0 (conjugate partner).
double mode_term(long k, cplx c, int n, double x) {
    const double kk = static_cast<double>(k);
    cplx factor = std::pow(cplx(0.0, kk), n);
    const cplx e(std::cos(kk * x), std::sin(kk * x));
    const double re = (factor * c * e).real();
    return k == 0 ? re : 2.0 * re;
}

}  // namespace

ShearProfile::ShearProfile(std::vector<Mode> modes, double kappa, std::optional<Symbol> upsilon)
    : kappa_(kappa), upsilon_(std::move(upsilon)) {
    if (!(kappa >= 0) || !std::isfinite(kappa)) fail(ErrorCode::parameter, "kappa must be finite and nonnegative");
    if (kappa > 0 && !upsilon_) fail(ErrorCode::parameter, "dissipative shear needs an upsilon symbol");
    std::map<long, cplx> merged;
    for (const auto& m : modes) {
        if (m.k < 0) fail(ErrorCode::parameter, "shear modes are stored for k >= 0 only");
        if (m.k == 0 && std::abs(m.coeff.imag()) > 0) fail(ErrorCode::parameter, "zero mode of a real field must be real");
        merged[m.k] += m.coeff;
    }
    for (const auto& [k, c] : merged) modes_.push_back({k, c});
    if (kappa > 0 && !even()) fail(ErrorCode::parameter, "dissipative shear must be even (real cosine coefficients)");
    for (const auto& m : modes_) rates_.push_back(kappa_ > 0 ? kappa_ * (*upsilon_)(0.0, static_cast<double>(m.k)) : 0.0);
    std::ostringstream os;
    os << "modes:" << modes_.size();
    spec_ = os.str();
}

ShearProfile ShearProfile::cosine(long k, double amplitude, double kappa, std::optional<Symbol> upsilon) {
    if (k <= 0) fail(ErrorCode::parameter, "cosine shear needs k >= 1");
    // amplitude cos(kx) = (amplitude / 2) (e^{ikx} + e^{-ikx})
    ShearProfile p({{k, cplx(0.5 * amplitude, 0.0)}}, kappa, std::move(upsilon));
    std::ostringstream os;
    os.precision(17);
    os << "cos:" << k;
    if (amplitude != 1.0) os << "," << amplitude;
    p.spec_ = os.str();
    return p;
}

ShearProfile ShearProfile::linear(double slope) {
    if (!std::isfinite(slope)) fail(ErrorCode::parameter, "linear shear slope must be finite");
    ShearProfile p({}, 0.0, std::nullopt);
    p.slope_ = slope;
    std::ostringstream os;
    os.precision(17);
    os << "lin:" << slope;
    p.spec_ = os.str();
    return p;
}

ShearProfile ShearProfile::parse(const std::string& spec, double kappa, std::optional<Symbol> upsilon) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) fail(ErrorCode::parse, "shear spec needs 'kind:args', got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "cos") {
        std::stringstream ss(rest);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        try {
            std::size_t used = 0;
            const long k = std::stol(a, &used);
            if (used != a.size()) throw std::invalid_argument(a);
            const double amp = b.empty() ? 1.0 : std::stod(b);
            return cosine(k, amp, kappa, std::move(upsilon));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            fail(ErrorCode::parse, "malformed cosine shear spec '" + spec + "'");
        }
    }
    if (kind == "lin") {
        try {
            std::size_t used = 0;
            const double c = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument(rest);
            if (kappa > 0) fail(ErrorCode::parameter, "linear shear cannot be dissipative");
            return linear(c);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            fail(ErrorCode::parse, "malformed linear shear spec '" + spec + "'");
        }
    }
    if (kind == "coeffs") {
        std::ifstream in(rest);
        if (!in) fail(ErrorCode::io, "cannot open shear coefficient file '" + rest + "'");
        std::vector<Mode> modes;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            long k;
            double re, im;
            if (!(ls >> k >> re >> im)) {
                if (modes.empty()) continue;  // header row
                fail(ErrorCode::parse, "malformed row in shear coefficient file: " + line);
            }
            if (k < 0) continue;  // conjugate partner implied
            modes.push_back({k, cplx(re, im)});
        }
        ShearProfile p(std::move(modes), kappa, std::move(upsilon));
        p.spec_ = spec;
        return p;
    }
    fail(ErrorCode::parse, "unknown shear kind '" + kind + "'");
}

ShearProfile ShearProfile::with_dissipation(double kappa, std::optional<Symbol> upsilon) const {
    if (slope_ != 0.0 && kappa > 0) fail(ErrorCode::parameter, "linear shear cannot be dissipative");
    ShearProfile p(modes_, kappa, std::move(upsilon));
    p.slope_ = slope_;
    p.spec_ = spec_;
    return p;
}

bool ShearProfile::even() const {
    return std::all_of(modes_.begin(), modes_.end(), [](const Mode& m) { return m.coeff.imag() == 0.0; });
}

long ShearProfile::max_wavenumber() const { return modes_.empty() ? 0 : modes_.back().k; }

double ShearProfile::decay(long k, double t) const {
    if (kappa_ == 0.0) return 1.0;
    const long kk = std::labs(k);
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].k == kk) return std::exp(-rates_[i] * t);
    return std::exp(-kappa_ * (*upsilon_)(0.0, static_cast<double>(kk)) * t);
}

double ShearProfile::derivative(double t, int n, double x2) const {
    if (n < 0 || n > 6) fail(ErrorCode::capability, "shear derivatives are supported up to order 6");
    double s = 0.0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const double d = kappa_ > 0 ? std::exp(-rates_[i] * t) : 1.0;
        s += d * mode_term(modes_[i].k, modes_[i].coeff, n, x2);
    }
    if (n == 0) s += slope_ * x2;
    if (n == 1) s += slope_;
    return s;
}

double ShearProfile::multiplier_image(const Symbol& gamma, double t, int n, double x2) const {
    if (n < 0 || n > 4) fail(ErrorCode::capability, "multiplier image derivatives are supported up to order 4");
    double s = 0.0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const double d = kappa_ > 0 ? std::exp(-rates_[i] * t) : 1.0;
        const double g = gamma(0.0, static_cast<double>(modes_[i].k));
        s += d * g * mode_term(modes_[i].k, modes_[i].coeff, n, x2);
    }
    if (slope_ != 0.0 && n <= 1) s += gamma(0.0, 0.0) * slope_ * (n == 0 ? x2 : 1.0);
    return s;
}

ShearSample ShearProfile::sample(const Symbol& gamma, double t, double x2) const {
    ShearSample out;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const double kk = static_cast<double>(modes_[i].k);
        const double d = kappa_ > 0 ? std::exp(-rates_[i] * t) : 1.0;
        const double g = gamma(0.0, kk);
        const double w = modes_[i].k == 0 ? 1.0 : 2.0;
        const cplx base = w * d * modes_[i].coeff * cplx(std::cos(kk * x2), std::sin(kk * x2));
        cplx factor(1.0, 0.0);
        for (int n = 0; n < ShearSample::kOrders; ++n) {
            const double term = (factor * base).real();
            out.f[n] += term;
            out.gf[n] += g * term;
            out.f_t[n] -= rates_[i] * term;
            out.gf_t[n] -= rates_[i] * g * term;
            factor *= cplx(0.0, kk);
        }
    }
    if (slope_ != 0.0) {
        const double g0 = gamma(0.0, 0.0);
        out.f[0] += slope_ * x2;
        out.f[1] += slope_;
        out.gf[0] += g0 * slope_ * x2;
        out.gf[1] += g0 * slope_;
    }
    return out;
}

cplx ShearProfile::derivative_coeff(double t, int n, long k) const {
    if (k == 0 && n == 1 && slope_ != 0.0) return slope_;
    const long kk = std::labs(k);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].k != kk) continue;
        const double d = kappa_ > 0 ? std::exp(-rates_[i] * t) : 1.0;
        const cplx c = k >= 0 ? modes_[i].coeff : std::conj(modes_[i].coeff);
        return d * std::pow(cplx(0.0, static_cast<double>(k)), n) * c;
    }
    return 0.0;
}

cplx ShearProfile::multiplier_image_coeff(const Symbol& gamma, double t, int n, long k) const {
    return gamma(0.0, static_cast<double>(k)) * derivative_coeff(t, n, k);
}

int ShearProfile::degeneracy_sign() const {
    const double c = fpp0(0.0);
    return c > 0 ? 1 : (c < 0 ? -1 : 0);
}

double ShearProfile::tau_of_tf(double t) const {
    if (steady()) return t * std::abs(fpp0(0.0));
    return integrate([this](double s) { return std::abs(fpp0(s)); }, 0.0, t, 1e-13);
}

double ShearProfile::tf_of_tau(double tau) const {
    if (!(tau >= 0) || !std::isfinite(tau)) fail(ErrorCode::input_domain, "tau must be finite and nonnegative");
    const double f0 = std::abs(fpp0(0.0));
    if (tau == 0.0) return 0.0;
    if (steady()) return tau / f0;
    // |f''(t, 0)| must stay above this fraction of its initial value on the search interval.
    const double floor_ratio = 1e-6;
    double hi = tau / f0;
    while (tau_of_tf(hi) < tau) {
        hi *= 2.0;
        if (std::abs(fpp0(hi)) < floor_ratio * f0 || hi > 1e12)
            fail(ErrorCode::horizon, "tau is unreachable before f''(t, 0) decays below threshold");
    }
    const double t = find_root([&](double s) { return tau_of_tf(s) - tau; }, 0.0, hi, 1e-15);
    if (std::abs(fpp0(t)) < floor_ratio * f0)
        fail(ErrorCode::horizon, "tau is unreachable before f''(t, 0) decays below threshold");
    return t;
}

}  // namespace degenwave
