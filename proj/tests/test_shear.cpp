#include "degenwave/shear.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace degenwave;
using degenwave::test::error_code_of;

TEST_CASE("steady cosine shear") {
    const ShearProfile f = ShearProfile::cosine(1);
    for (double t : {0.0, 0.7, 3.0}) CHECK(f.fpp0(t) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(f.steady());
    CHECK(f.even());
    CHECK(f.degeneracy_sign() == -1);
    CHECK(ShearProfile::cosine(2).derivative(0.0, 1, std::numbers::pi / 4) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("dissipative single mode decays at the upsilon rate") {
    const ShearProfile f = ShearProfile::cosine(1, 1.0, 1.0, Symbol::power(1.0));
    for (double t : {0.0, 0.3, 1.5})
        CHECK(f.fpp0(t) == doctest::Approx(-std::exp(-std::sqrt(2.0) * t)).epsilon(1e-14));
    CHECK(f.decay(1, 0.5) == doctest::Approx(std::exp(-0.5 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK_FALSE(f.steady());
}

TEST_CASE("multiplier image of a single mode") {
    const ShearProfile f = ShearProfile::cosine(1);
    const Symbol g = Symbol::power(1.0);
    for (double x : {0.0, 0.4, 2.0}) CHECK(f.multiplier_image(g, 0.0, 0, x) == doctest::Approx(std::sqrt(2.0) * std::cos(x)));
    CHECK(std::abs(f.multiplier_image(g, 0.0, 1, 0.0)) < 1e-15);
}

TEST_CASE("multi-mode profile matches a dense summation oracle") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::vector<ShearProfile::Mode> modes;
    for (long k = 1; k <= 64; ++k) modes.push_back({k, cplx(nd(rng), nd(rng)) / double(k * k)});
    const ShearProfile f(modes);
    const Symbol g = Symbol::log(1.0);
    for (double x : {0.0, 0.3, 1.7, 4.0}) {
        for (int n = 0; n <= 4; ++n) {
            double direct = 0.0, image = 0.0;
            for (const auto& m : modes) {
                const cplx ik = std::pow(cplx(0.0, double(m.k)), n);
                const double term = 2.0 * std::real(m.coeff * ik * std::exp(cplx(0.0, m.k * x)));
                direct += term;
                image += g(0.0, double(m.k)) * term;
            }
            CHECK(std::abs(f.derivative(0.0, n, x) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
            CHECK(std::abs(f.multiplier_image(g, 0.0, n, x) - image) <= 1e-12 * std::max(1.0, std::abs(image)));
        }
    }
}

TEST_CASE("Fourier coefficients of derivatives") {
    const ShearProfile f = ShearProfile::cosine(3, 2.0);
    CHECK(std::abs(f.derivative_coeff(0.0, 1, 3) - cplx(0.0, 3.0)) < 1e-15);
    CHECK(std::abs(f.derivative_coeff(0.0, 1, -3) - cplx(0.0, -3.0)) < 1e-15);
    CHECK(std::abs(f.derivative_coeff(0.0, 1, 2)) == 0.0);
    const ShearProfile lin = ShearProfile::linear(0.5);
    CHECK(lin.derivative(0.0, 1, 1.0) == 0.5);
    CHECK(lin.derivative(0.0, 2, 1.0) == 0.0);
    CHECK(std::abs(lin.derivative_coeff(0.0, 1, 0) - cplx(0.5)) < 1e-15);
}

TEST_CASE("sample bundles all orders and time derivatives") {
    const ShearProfile f = ShearProfile::cosine(1, 1.0, 1.0, Symbol::power(1.0));
    const Symbol g = Symbol::power(1.0);
    const ShearSample s = f.sample(g, 0.2, 0.5);
    const double h = 1e-5;
    for (int n = 0; n <= 4; ++n) {
        CHECK(s.f[n] == doctest::Approx(f.derivative(0.2, n, 0.5)).epsilon(1e-13));
        CHECK(s.gf[n] == doctest::Approx(f.multiplier_image(g, 0.2, n, 0.5)).epsilon(1e-13));
        const double fd = (f.derivative(0.2 + h, n, 0.5) - f.derivative(0.2 - h, n, 0.5)) / (2 * h);
        CHECK(s.f_t[n] == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("t_f and tau are inverse with closed forms") {
    const ShearProfile steady = ShearProfile::cosine(1);
    CHECK(steady.tf_of_tau(0.0) == 0.0);
    CHECK(steady.tf_of_tau(0.75) == doctest::Approx(0.75).epsilon(1e-13));
    const double c = std::sqrt(2.0);
    const ShearProfile diss = ShearProfile::cosine(1, 1.0, 1.0, Symbol::power(1.0));
    for (double tau : {0.1, 0.4, 0.6}) {
        CHECK(diss.tf_of_tau(tau) == doctest::Approx(-std::log(1.0 - c * tau) / c).epsilon(1e-10));
        CHECK(diss.tau_of_tf(diss.tf_of_tau(tau)) == doctest::Approx(tau).epsilon(1e-12));
    }
    CHECK(error_code_of([&] { diss.tf_of_tau(1.0 / c + 0.1); }) == ErrorCode::horizon);
}

TEST_CASE("spec parsing") {
    CHECK(ShearProfile::parse("cos:2").derivative(0.0, 0, 0.0) == doctest::Approx(1.0));
    CHECK(ShearProfile::parse("cos:1,3").derivative(0.0, 0, 0.0) == doctest::Approx(3.0));
    CHECK(ShearProfile::parse("lin:2").linear_slope() == 2.0);
    CHECK(ShearProfile::parse("cos:1,3").spec() == "cos:1,3");
    CHECK(error_code_of([] { ShearProfile::parse("sin:1"); }) == ErrorCode::parse);
    CHECK(error_code_of([] { ShearProfile::parse("coeffs:/nonexistent/file.csv"); }) == ErrorCode::io);
    CHECK(error_code_of([] { ShearProfile::cosine(0); }) == ErrorCode::parameter);
}
