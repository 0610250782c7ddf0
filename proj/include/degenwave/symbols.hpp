#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace degenwave {

enum class SymbolKind {
    power,     // <xi>^beta
    log,       // log^beta(10 + |xi|)
    loglog,    // log^beta(10 + log^alpha(10 + |xi|))
    explog,    // exp(beta * log^alpha(10 + |xi|))
    constant,  // c (test stub; violates growth)
    custom     // user closed form with user partials
};

// Partial derivative d^{n1}_{xi1} d^{n2}_{xi2} of a custom symbol.
using PartialsFn = std::function<double(int n1, int n2, double xi1, double xi2)>;

// Even, positive Fourier multiplier with exact partial derivatives up to
// order (4, 4). Immutable; cheap to copy.
class Symbol {
public:
    static Symbol power(double beta);
    static Symbol log(double beta);
    static Symbol loglog(double beta, double alpha = 1.0);
    static Symbol explog(double beta, double alpha);
    static Symbol constant(double c);
    // partials(0, 0, ...) is the value. beta0 <= 0 requests a grid estimate.
    static Symbol custom(std::string name, PartialsFn partials, double xi0 = 10.0, double beta0 = -1.0);

    // Grammar: kind ':' comma-separated reals, e.g. "power:2.0", "explog:1,0.5".
    static Symbol parse(const std::string& spec);

    SymbolKind kind() const { return kind_; }
    double beta() const { return beta_; }
    double alpha() const { return alpha_; }
    double beta0() const { return beta0_; }
    double xi0() const { return xi0_; }
    std::string spec() const;

    double operator()(double xi1, double xi2) const;
    double partial(int n1, int n2, double xi1, double xi2) const;

    // d^n/dxi2^n gamma(xi1, xi2) for n = 0..order (order <= 4), written to out[0..order].
    void xi2_derivatives(double xi1, double xi2, int order, double* out) const;

    // Radial profile r -> gamma(0, r).
    double radial(double r) const { return (*this)(0.0, r); }

private:
    Symbol() = default;
    void finish(double beta0);

    SymbolKind kind_ = SymbolKind::power;
    double beta_ = 1.0;
    double alpha_ = 1.0;
    double beta0_ = 0.0;
    double xi0_ = 10.0;
    std::string name_;
    std::shared_ptr<const PartialsFn> custom_;
};

// Sup over |xi| in [xi0, xi_max] of log2(sup_{|xi'| in [|xi|, 2|xi|]} gamma(xi') / gamma(xi)),
// plus a 0.01 margin.
double estimate_beta0(const Symbol& sym, double xi0, double xi_max);

// xi2 -> gamma(lambda0, xi2), monotone on [lambda0, inf).
class RestrictedSymbol {
public:
    RestrictedSymbol(Symbol parent, double lambda0);

    const Symbol& parent() const { return parent_; }
    double lambda0() const { return lambda0_; }

    double operator()(double xi) const { return parent_(lambda0_, xi); }
    double derivative(int n, double xi) const { return parent_.partial(0, n, lambda0_, xi); }
    void derivatives(double xi, int order, double* out) const { parent_.xi2_derivatives(lambda0_, xi, order, out); }

    // Unique xi >= lambda0 with value(xi) = y.
    double inverse(double y) const;

private:
    Symbol parent_;
    double lambda0_;
};

struct SamplePlan {
    double xi0 = 10.0;
    double xi_max = 1048576.0;  // 2^20
    int points_per_octave = 4;
};

struct ValidationReport {
    std::string symbol;
    double beta0_declared = 0.0;
    double beta0_measured = 0.0;  // grid sup log2 ratio, no margin
    bool slow_variance_ok = false;
    double slow_variance_witness[2] = {0, 0};

    double growth_min_ratio = 0.0;  // min gamma(2 xi)/gamma(xi)
    bool growth_ok = false;
    double growth_witness[2] = {0, 0};

    // Assumption 3: max over samples and |I| in {1, 2} of
    // <xi>^{|I|} |d^I(xi2 d2 gamma)| / (xi2 d2 gamma).
    double assumption3_constant = 0.0;
    bool assumption3_positive = false;
    double assumption3_witness[2] = {0, 0};

    // Assumption 4: min over samples of xi2 d2 gamma (log|xi2|)^2 / gamma.
    double assumption4_min_ratio = 0.0;
    bool assumption4_ok = false;
    double assumption4_witness[2] = {0, 0};
    double assumption4_threshold = 0.01;

    std::size_t samples = 0;
    bool all_ok() const { return slow_variance_ok && growth_ok && assumption3_positive && assumption4_ok; }
};

ValidationReport validate_assumptions(const Symbol& sym, const SamplePlan& plan = {});

}  // namespace degenwave
