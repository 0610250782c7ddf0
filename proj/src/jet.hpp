#pragma once

// Truncated bivariate Taylor polynomials used to differentiate the closed-form
// symbols exactly. A Jet holds c[i][j] = coefficient of d1^i d2^j about a base
// point, truncated at degrees (o1, o2) with o1, o2 <= kMaxOrder.

#include <array>
#include <cmath>

namespace degenwave::detail {

constexpr int kMaxOrder = 4;

class Jet {
public:
    Jet(int o1, int o2, double constant = 0.0) : o1_(o1), o2_(o2) {
        for (auto& row : c_) row.fill(0.0);
        c_[0][0] = constant;
    }

    static Jet variable(int o1, int o2, int which, double base) {
        Jet j(o1, o2, base);
        if (which == 0 && o1 >= 1) j.c_[1][0] = 1.0;
        if (which == 1 && o2 >= 1) j.c_[0][1] = 1.0;
        return j;
    }

    int o1() const { return o1_; }
    int o2() const { return o2_; }
    double value() const { return c_[0][0]; }
    double coeff(int i, int j) const { return c_[i][j]; }
    double& coeff(int i, int j) { return c_[i][j]; }

    Jet& operator+=(const Jet& b) {
        for (int i = 0; i <= o1_; ++i)
            for (int j = 0; j <= o2_; ++j) c_[i][j] += b.c_[i][j];
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0][0] += s;
        return *this;
    }
    Jet& operator*=(double s) {
        for (int i = 0; i <= o1_; ++i)
            for (int j = 0; j <= o2_; ++j) c_[i][j] *= s;
        return *this;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.o1_, a.o2_);
        for (int i = 0; i <= a.o1_; ++i)
            for (int j = 0; j <= a.o2_; ++j) {
                double s = 0.0;
                for (int p = 0; p <= i; ++p)
                    for (int q = 0; q <= j; ++q) s += a.c_[p][q] * b.c_[i - p][j - q];
                r.c_[i][j] = s;
            }
        return r;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }

    // g(u) for u = *this, given g^{(n)}(u0) for n = 0..o1+o2.
    template <class Derivs>
    Jet compose(const Derivs& g) const {
        const int degree = o1_ + o2_;
        Jet delta = *this;
        delta.c_[0][0] = 0.0;
        double fact = 1.0;
        for (int n = 2; n <= degree; ++n) fact *= n;
        Jet r(o1_, o2_, g[degree] / fact);
        for (int n = degree - 1; n >= 0; --n) {
            fact /= (n + 1);
            r = r * delta;
            r.c_[0][0] += g[n] / fact;
        }
        return r;
    }

private:
    int o1_, o2_;
    std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> c_;
};

inline double jet_value(double x) { return x; }
inline double jet_value(const Jet& x) { return x.value(); }

inline double pow_of(double u, double a) { return std::pow(u, a); }
inline double log_of(double u) { return std::log(u); }
inline double exp_of(double u) { return std::exp(u); }

inline Jet pow_of(const Jet& u, double a) {
    std::array<double, 2 * kMaxOrder + 1> g{};
    const double u0 = u.value();
    double coef = 1.0;
    for (int n = 0; n <= u.o1() + u.o2(); ++n) {
        g[n] = coef * std::pow(u0, a - n);
        coef *= (a - n);
    }
    return u.compose(g);
}

inline Jet log_of(const Jet& u) {
    std::array<double, 2 * kMaxOrder + 1> g{};
    const double u0 = u.value();
    g[0] = std::log(u0);
    double fact = 1.0;  // (n-1)!
    for (int n = 1; n <= u.o1() + u.o2(); ++n) {
        g[n] = ((n % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(u0, n);
        fact *= n;
    }
    return u.compose(g);
}

inline Jet exp_of(const Jet& u) {
    std::array<double, 2 * kMaxOrder + 1> g{};
    g.fill(std::exp(u.value()));
    return u.compose(g);
}

}  // namespace degenwave::detail
