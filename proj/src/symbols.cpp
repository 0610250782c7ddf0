#include "degenwave/symbols.hpp"

#include "degenwave/errors.hpp"
#include "degenwave/numerics.hpp"
#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace degenwave {

using detail::exp_of;
using detail::Jet;
using detail::log_of;
using detail::pow_of;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Shared closed forms, instantiated for double and Jet.
template <class T>
T catalog_expr(SymbolKind kind, double beta, double alpha, const T& x1, const T& x2) {
    switch (kind) {
        case SymbolKind::power:
            return pow_of(x1 * x1 + x2 * x2 + 1.0, 0.5 * beta);
        case SymbolKind::log: {
            const T r = pow_of(x1 * x1 + x2 * x2, 0.5);
            return pow_of(log_of(r + 10.0), beta);
        }
        case SymbolKind::loglog: {
            const T r = pow_of(x1 * x1 + x2 * x2, 0.5);
            return pow_of(log_of(pow_of(log_of(r + 10.0), alpha) + 10.0), beta);
        }
        case SymbolKind::explog: {
            const T r = pow_of(x1 * x1 + x2 * x2, 0.5);
            return exp_of(pow_of(log_of(r + 10.0), alpha) * beta);
        }
        default:
            break;
    }
    fail(ErrorCode::internal, "catalog_expr called for a non-catalog kind");
}

bool uses_modulus(SymbolKind kind) {
    return kind == SymbolKind::log || kind == SymbolKind::loglog || kind == SymbolKind::explog;
}

void check_finite(double xi1, double xi2) {
    if (!std::isfinite(xi1) || !std::isfinite(xi2))
        fail(ErrorCode::input_domain, "symbol evaluated at a non-finite frequency");
}

}  // namespace

Symbol Symbol::power(double beta) {
    if (!(beta > 0) || !std::isfinite(beta)) fail(ErrorCode::parameter, "power symbol needs beta > 0");
    Symbol s;
    s.kind_ = SymbolKind::power;
    s.beta_ = beta;
    s.finish(-1.0);
    return s;
}

Symbol Symbol::log(double beta) {
    if (!(beta > 0) || !std::isfinite(beta)) fail(ErrorCode::parameter, "log symbol needs beta > 0");
    Symbol s;
    s.kind_ = SymbolKind::log;
    s.beta_ = beta;
    s.finish(-1.0);
    return s;
}

Symbol Symbol::loglog(double beta, double alpha) {
    if (!(beta > 0) || !(alpha > 0)) fail(ErrorCode::parameter, "loglog symbol needs beta, alpha > 0");
    Symbol s;
    s.kind_ = SymbolKind::loglog;
    s.beta_ = beta;
    s.alpha_ = alpha;
    s.finish(-1.0);
    return s;
}

Symbol Symbol::explog(double beta, double alpha) {
    if (!(beta > 0) || !(alpha > 0 && alpha < 1)) fail(ErrorCode::parameter, "explog symbol needs beta > 0, 0 < alpha < 1");
    Symbol s;
    s.kind_ = SymbolKind::explog;
    s.beta_ = beta;
    s.alpha_ = alpha;
    s.finish(-1.0);
    return s;
}

Symbol Symbol::constant(double c) {
    if (!(c > 0) || !std::isfinite(c)) fail(ErrorCode::parameter, "constant symbol needs c > 0");
    Symbol s;
    s.kind_ = SymbolKind::constant;
    s.beta_ = c;
    s.finish(-1.0);
    return s;
}

Symbol Symbol::custom(std::string name, PartialsFn partials, double xi0, double beta0) {
    if (!partials) fail(ErrorCode::parameter, "custom symbol needs a partials function");
    Symbol s;
    s.kind_ = SymbolKind::custom;
    s.name_ = std::move(name);
    s.xi0_ = xi0;
    s.custom_ = std::make_shared<const PartialsFn>(std::move(partials));
    s.finish(beta0);
    return s;
}

void Symbol::finish(double beta0) {
    beta0_ = beta0 > 0 ? beta0 : estimate_beta0(*this, xi0_, std::ldexp(1.0, 40));
}

Symbol Symbol::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                args.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                fail(ErrorCode::parse, "malformed number '" + item + "' in symbol spec '" + spec + "'");
            }
        }
    }
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            fail(ErrorCode::parse, "wrong number of parameters in symbol spec '" + spec + "'");
    };
    if (kind == "power") {
        need(1, 1);
        return power(args[0]);
    }
    if (kind == "log") {
        need(1, 1);
        return log(args[0]);
    }
    if (kind == "loglog") {
        need(1, 2);
        return loglog(args[0], args.size() > 1 ? args[1] : 1.0);
    }
    if (kind == "explog") {
        need(2, 2);
        return explog(args[0], args[1]);
    }
    if (kind == "const") {
        need(1, 1);
        return constant(args[0]);
    }
    fail(ErrorCode::parse, "unknown symbol kind '" + kind + "'");
}

std::string Symbol::spec() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case SymbolKind::power: os << "power:" << beta_; break;
        case SymbolKind::log: os << "log:" << beta_; break;
        case SymbolKind::loglog: os << "loglog:" << beta_ << "," << alpha_; break;
        case SymbolKind::explog: os << "explog:" << beta_ << "," << alpha_; break;
        case SymbolKind::constant: os << "const:" << beta_; break;
        case SymbolKind::custom: os << "custom:" << name_; break;
    }
    return os.str();
}

double Symbol::operator()(double xi1, double xi2) const {
    check_finite(xi1, xi2);
    switch (kind_) {
        case SymbolKind::constant: return beta_;
        case SymbolKind::custom: return (*custom_)(0, 0, xi1, xi2);
        default: return catalog_expr<double>(kind_, beta_, alpha_, xi1, xi2);
    }
}

double Symbol::partial(int n1, int n2, double xi1, double xi2) const {
    check_finite(xi1, xi2);
    if (n1 < 0 || n2 < 0 || n1 > detail::kMaxOrder || n2 > detail::kMaxOrder)
        fail(ErrorCode::capability, "symbol partials are supported up to order (4, 4)");
    if (n1 == 0 && n2 == 0) return (*this)(xi1, xi2);
    // Evenness in each variable makes odd partials vanish on the axes.
    if ((n1 % 2 == 1 && xi1 == 0.0) || (n2 % 2 == 1 && xi2 == 0.0)) return 0.0;
    switch (kind_) {
        case SymbolKind::constant: return 0.0;
        case SymbolKind::custom: return (*custom_)(n1, n2, xi1, xi2);
        default: break;
    }
    if (uses_modulus(kind_) && xi1 == 0.0 && xi2 == 0.0)
        fail(ErrorCode::capability, "even partials of |xi|-based symbols are undefined at the origin");
    const Jet x1 = Jet::variable(n1, n2, 0, xi1);
    const Jet x2 = Jet::variable(n1, n2, 1, xi2);
    const Jet g = catalog_expr<Jet>(kind_, beta_, alpha_, x1, x2);
    return g.coeff(n1, n2) * factorial(n1) * factorial(n2);
}

void Symbol::xi2_derivatives(double xi1, double xi2, int order, double* out) const {
    check_finite(xi1, xi2);
    if (order < 0 || order > detail::kMaxOrder)
        fail(ErrorCode::capability, "symbol partials are supported up to order (4, 4)");
    if (kind_ == SymbolKind::custom || kind_ == SymbolKind::constant ||
        (uses_modulus(kind_) && xi1 == 0.0 && xi2 == 0.0)) {
        for (int n = 0; n <= order; ++n) out[n] = partial(0, n, xi1, xi2);
        return;
    }
    const Jet x1(0, order, xi1);
    const Jet x2 = Jet::variable(0, order, 1, xi2);
    const Jet g = catalog_expr<Jet>(kind_, beta_, alpha_, x1, x2);
    for (int n = 0; n <= order; ++n) out[n] = g.coeff(0, n) * factorial(n);
}

double estimate_beta0(const Symbol& sym, double xi0, double xi_max) {
    double worst = -std::numeric_limits<double>::infinity();
    const int per_octave = 8;
    const int octaves = static_cast<int>(std::ceil(std::log2(xi_max / xi0)));
    const double directions[3][2] = {{0.0, 1.0}, {M_SQRT1_2, M_SQRT1_2}, {1.0, 0.0}};
    for (int j = 0; j <= octaves * per_octave; ++j) {
        const double r = xi0 * std::exp2(static_cast<double>(j) / per_octave);
        for (const auto& d : directions) {
            const double base = sym(r * d[0], r * d[1]);
            double sup = base;
            for (int q = 1; q <= 16; ++q) {
                const double c = 1.0 + q / 16.0;
                sup = std::max(sup, sym(c * r * d[0], c * r * d[1]));
            }
            worst = std::max(worst, std::log2(sup / base));
        }
    }
    return std::max(worst, 0.0) + 0.01;
}

RestrictedSymbol::RestrictedSymbol(Symbol parent, double lambda0) : parent_(std::move(parent)), lambda0_(lambda0) {
    if (!(lambda0 > 0) || !std::isfinite(lambda0)) fail(ErrorCode::parameter, "restricted symbol needs lambda0 > 0");
}

double RestrictedSymbol::inverse(double y) const {
    if (!std::isfinite(y)) fail(ErrorCode::input_domain, "inverse evaluated at a non-finite value");
    const double lo_val = (*this)(lambda0_);
    if (y < lo_val * (1.0 - 1e-15))
        fail(ErrorCode::domain, "value below the range of the restricted symbol");
    if (y <= lo_val) return lambda0_;
    double lo = lambda0_, hi = 2.0 * lambda0_;
    const double cap = lambda0_ * std::ldexp(1.0, 64);
    while ((*this)(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap) fail(ErrorCode::domain, "value beyond the bracket cap of the restricted inverse");
    }
    // Newton iteration safeguarded by the bracket [lo, hi]; bisection when a step leaves it.
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double d[2];
        derivatives(x, 1, d);
        const double r = d[0] - y;
        if (r == 0.0) return x;
        if (r < 0) lo = x;
        else hi = x;
        double next = d[1] > 0 ? x - r / d[1] : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4e-16 * x || hi - lo <= 4e-16 * hi) return next;
        x = next;
    }
    return x;
}

ValidationReport validate_assumptions(const Symbol& sym, const SamplePlan& plan) {
    ValidationReport rep;
    rep.symbol = sym.spec();
    rep.beta0_declared = sym.beta0();
    rep.growth_min_ratio = std::numeric_limits<double>::infinity();
    rep.assumption4_min_ratio = std::numeric_limits<double>::infinity();
    rep.assumption3_positive = true;
    double sup_log2 = -std::numeric_limits<double>::infinity();

    std::vector<double> grid;
    const int octaves = static_cast<int>(std::ceil(std::log2(plan.xi_max / plan.xi0)));
    for (int j = 0; j <= octaves * plan.points_per_octave; ++j) {
        const double v = plan.xi0 * std::exp2(static_cast<double>(j) / plan.points_per_octave);
        if (v <= plan.xi_max * (1 + 1e-12)) grid.push_back(v);
    }

    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t b = a; b < grid.size(); ++b) {
            const double x1 = grid[a], x2 = grid[b];
            ++rep.samples;
            const double g = sym(x1, x2);

            const double growth = sym(2 * x1, 2 * x2) / g;
            if (growth < rep.growth_min_ratio) {
                rep.growth_min_ratio = growth;
                rep.growth_witness[0] = x1;
                rep.growth_witness[1] = x2;
            }
            double sup = g;
            for (int q = 1; q <= 16; ++q) {
                const double c = 1.0 + q / 16.0;
                sup = std::max(sup, sym(c * x1, c * x2));
            }
            const double l2 = std::log2(sup / g);
            if (l2 > sup_log2) {
                sup_log2 = l2;
                rep.slow_variance_witness[0] = x1;
                rep.slow_variance_witness[1] = x2;
            }

            // w = xi2 d2 gamma and its partials up to order 2.
            const double d2 = sym.partial(0, 1, x1, x2);
            const double w = x2 * d2;
            if (!(w > 0)) {
                rep.assumption3_positive = false;
                rep.assumption3_witness[0] = x1;
                rep.assumption3_witness[1] = x2;
            } else {
                const double bracket = std::sqrt(1 + x1 * x1 + x2 * x2);
                const double w1 = x2 * sym.partial(1, 1, x1, x2);
                const double w2 = d2 + x2 * sym.partial(0, 2, x1, x2);
                const double w11 = x2 * sym.partial(2, 1, x1, x2);
                const double w12 = sym.partial(1, 1, x1, x2) + x2 * sym.partial(1, 2, x1, x2);
                const double w22 = 2 * sym.partial(0, 2, x1, x2) + x2 * sym.partial(0, 3, x1, x2);
                const double c1 = bracket * std::max(std::abs(w1), std::abs(w2)) / w;
                const double c2 = bracket * bracket * std::max({std::abs(w11), std::abs(w12), std::abs(w22)}) / w;
                const double c = std::max(c1, c2);
                if (c > rep.assumption3_constant) {
                    rep.assumption3_constant = c;
                    rep.assumption3_witness[0] = x1;
                    rep.assumption3_witness[1] = x2;
                }
            }
            const double lg = std::log(x2);
            const double ratio4 = w * lg * lg / g;
            if (ratio4 < rep.assumption4_min_ratio) {
                rep.assumption4_min_ratio = ratio4;
                rep.assumption4_witness[0] = x1;
                rep.assumption4_witness[1] = x2;
            }
        }
    }
    rep.beta0_measured = std::max(sup_log2, 0.0);
    rep.slow_variance_ok = rep.beta0_measured <= rep.beta0_declared;
    rep.growth_ok = rep.growth_min_ratio > 1.0;
    rep.assumption4_ok = rep.assumption4_min_ratio >= rep.assumption4_threshold;
    return rep;
}

}  // namespace degenwave
