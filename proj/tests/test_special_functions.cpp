#include "ellvee/special_functions.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ellvee;

namespace {

constexpr double tol = 1e-11;
constexpr double fd_tol = 1e-6;

struct Sample {
    Complex z;
    Complex tau;
};

std::vector<Sample> samples(std::uint64_t seed, int n, double zmax = 0.4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.8, 2.5), zz(-zmax, zmax);
    std::vector<Sample> out;
    while (static_cast<int>(out.size()) < n) {
        Complex z{zz(rng), zz(rng)};
        if (std::abs(z) > zmax || std::abs(z) < 0.05)
            continue;
        out.push_back({z, Complex{re(rng), im(rng)}});
    }
    return out;
}

// Taylor coefficients of x/(e^x - 1) by exact long division, times k!.
std::vector<Rational> bernoulli_by_division(unsigned n) {
    std::vector<Rational> d(n + 1), inv(n + 1);
    Rational fact = 1;
    for (unsigned k = 0; k <= n; ++k) {
        fact *= k + 1;
        d[k] = Rational{1} / fact;  // (e^x - 1)/x = sum x^k/(k+1)!
    }
    inv[0] = 1;
    for (unsigned k = 1; k <= n; ++k) {
        Rational s = 0;
        for (unsigned j = 1; j <= k; ++j)
            s += d[j] * inv[k - j];
        inv[k] = -s;
    }
    Rational kf = 1;
    for (unsigned k = 0; k <= n; ++k) {
        if (k > 0)
            kf *= k;
        inv[k] *= kf;
    }
    return inv;
}

// f^{(3,0)} by a 4-point circle stencil.
template <class F>
Complex third_derivative(F&& g, Complex x, double r = 0.01) {
    const Complex I{0.0, 1.0};
    Complex s = 0.0, ik = 1.0;
    for (int k = 0; k < 4; ++k) {
        s += g(x + r * ik) * std::pow(ik, -3);
        ik *= I;
    }
    return 6.0 / (4.0 * r * r * r) * s;
}

template <class F>
Complex first_derivative(F&& g, Complex x, double r = 0.01) {
    const Complex I{0.0, 1.0};
    Complex s = 0.0, ik = 1.0;
    for (int k = 0; k < 4; ++k) {
        s += g(x + r * ik) / ik;
        ik *= I;
    }
    return s / (4.0 * r);
}

template <class F>
Complex second_derivative(F&& g, Complex x, double r = 0.01) {
    const Complex I{0.0, 1.0};
    Complex s = 0.0, ik = 1.0;
    for (int k = 0; k < 4; ++k) {
        s += g(x + r * ik) / (ik * ik);
        ik *= I;
    }
    return 2.0 * s / (4.0 * r * r);
}

Complex fval(Complex z, Complex tau) { return f_value({z, ModularParameter(tau)}); }

}  // namespace

TEST(Bernoulli, KnownValues) {
    EXPECT_EQ(bernoulli(0), Rational(1));
    EXPECT_EQ(bernoulli(1), Rational(-1, 2));
    EXPECT_EQ(bernoulli(3), Rational(0));
    EXPECT_EQ(bernoulli(4), Rational(-1, 30));
}

TEST(Bernoulli, MatchesLongDivision) {
    auto ref = bernoulli_by_division(30);
    for (unsigned k = 0; k <= 30; ++k)
        EXPECT_EQ(bernoulli(k), ref[k]) << k;
}

TEST(Bernoulli, Polynomials) {
    for (Complex z : {Complex{0.3, 0.1}, Complex{-1.2, 0.7}, Complex{2.0, 0.0}}) {
        EXPECT_LT(std::abs(bernoulli_poly(2, z) - (z * z - z + 1.0 / 6.0)), 1e-14);
        EXPECT_LT(std::abs(bernoulli_poly(1, z) - (z - 0.5)), 1e-15);
    }
    for (unsigned n = 0; n < 10; ++n)
        EXPECT_NEAR(bernoulli_poly(n, 0.0).real(), bernoulli(n).get_d(), 1e-15);
}

TEST(Zeta, IntegerValues) {
    EXPECT_NEAR(zeta_int(2), pi * pi / 6.0, 1e-15);
    EXPECT_NEAR(zeta_int(4), std::pow(pi, 4) / 90.0, 1e-15);
    double s3 = 0.0;
    const int N = 200000;
    for (int k = N; k >= 1; --k)
        s3 += 1.0 / (double(k) * k * k);
    s3 += 1.0 / (2.0 * N * N) - 1.0 / (2.0 * N * N * N);
    EXPECT_NEAR(zeta_int(3), s3, 1e-15);
    EXPECT_NEAR(zeta_int(0), -0.5, 0);
    EXPECT_NEAR(zeta_int(-1), -1.0 / 12.0, 1e-16);
    EXPECT_EQ(zeta_int(-2), 0.0);
    EXPECT_THROW(zeta_int(1), DomainError);
}

TEST(Polylog, SpecialValues) {
    EXPECT_EQ(polylog(3, 0.0), Complex(0.0));
    EXPECT_NEAR(polylog(3, 1.0).real(), 1.2020569031595942, 1e-15);
    EXPECT_NEAR(polylog(2, -1.0).real(), -pi * pi / 12.0, 1e-14);
    EXPECT_NEAR(polylog(2, 0.5).real(), pi * pi / 12.0 - 0.5 * std::log(2.0) * std::log(2.0), 1e-15);
    EXPECT_THROW(polylog(1, 1.0), DomainError);
}

TEST(Polylog, AgreesWithDirectSeriesInsideDisc) {
    for (Complex z : {Complex{0.7, 0.2}, Complex{-0.6, -0.5}, Complex{0.1, 0.85}, Complex{0.3, 0.1}}) {
        for (int n = 2; n <= 4; ++n) {
            Complex s = 0.0, zk = 1.0;
            for (int k = 1; k < 4000; ++k) {
                zk *= z;
                s += zk / std::pow(double(k), n);
            }
            EXPECT_LT(std::abs(polylog(n, z) - s), 1e-13) << z << " n=" << n;
        }
    }
}

TEST(Polylog, InversionOutsideDisc) {
    // Li_2(z) + Li_2(1/z) = -pi^2/6 - log(-z)^2/2
    for (Complex z : {Complex{3.0, 1.0}, Complex{-2.5, -0.4}, Complex{0.5, 1.8}, Complex{-5.0, 0.0}}) {
        Complex l = std::log(-z);
        EXPECT_LT(std::abs(polylog(2, z) + polylog(2, 1.0 / z) + pi * pi / 6.0 + 0.5 * l * l), 1e-13) << z;
    }
}

TEST(Polylog, InversionFormulaAtThreeTenths) {
    const Complex z = 0.3;
    Complex lhs = polylog(3, std::exp(two_pi_i * z)) - polylog(3, std::exp(-two_pi_i * z)) +
                  std::pow(two_pi_i, 3) * bernoulli_poly(3, z) / 6.0;
    EXPECT_LT(std::abs(lhs), 1e-13);
}

TEST(Polylog, InvertedVariantAndRegion) {
    for (Complex z : {Complex{0.3, 0.2}, Complex{0.7, -0.3}, Complex{0.0, 0.4}, Complex{1.0, -0.2}}) {
        for (int n = 1; n <= 3; ++n)
            EXPECT_LT(std::abs(polylog_inverted(n, z) - polylog(n, std::exp(two_pi_i * z))), 1e-12);
    }
    EXPECT_THROW(polylog_inverted(3, Complex(1.2, 0.1)), DomainError);
    EXPECT_THROW(polylog_inverted(3, Complex(0.0, -0.1)), DomainError);
    EXPECT_THROW(polylog_inverted(3, Complex(-0.2, 0.3)), DomainError);
}

TEST(ModularParameterTest, Validation) {
    EXPECT_THROW(ModularParameter(Complex(0.1, 0.0)), DomainError);
    EXPECT_THROW(ModularParameter(Complex(0.1, -1.0)), DomainError);
    ModularParameter t(Complex(0.2, 1.3));
    EXPECT_NEAR(std::abs(t.q()), std::exp(-2 * pi * 1.3), 1e-16);
}

TEST(Theta, ZeroAndShift) {
    ModularParameter t(Complex(0.1, 1.1));
    EXPECT_LT(std::abs(theta1(0.0, t).value), 1e-16);
    for (const auto& s : samples(11, 20)) {
        ModularParameter tau(s.tau);
        auto a = theta1(s.z + 1.0, tau).value, b = theta1(s.z, tau).value;
        EXPECT_LT(std::abs(a + b), 1e-13 * (1 + std::abs(b)));
    }
}

TEST(Theta, HeatEquation) {
    for (const auto& s : samples(12, 50)) {
        auto j = theta1(s.z, ModularParameter(s.tau));
        EXPECT_LT(std::abs(j.dz2 - Complex(0.0, 4.0 * pi) * j.dtau), tol * (1 + std::abs(j.dz2)));
    }
}

TEST(Theta, DerivativesMatchFiniteDifferences) {
    for (const auto& s : samples(13, 10)) {
        ModularParameter tau(s.tau);
        auto g = [&](Complex x) { return theta1(x, tau).value; };
        auto j = theta1(s.z, tau);
        double scale = 1 + std::abs(j.dz3);
        EXPECT_LT(std::abs(first_derivative(g, s.z) - j.dz), fd_tol * scale);
        EXPECT_LT(std::abs(second_derivative(g, s.z) - j.dz2), fd_tol * scale);
        EXPECT_LT(std::abs(third_derivative(g, s.z) - j.dz3), fd_tol * scale);
        auto gt = [&](Complex x) { return theta1(s.z, ModularParameter(x)).value; };
        EXPECT_LT(std::abs(first_derivative(gt, s.tau) - j.dtau), fd_tol * scale);
    }
}

TEST(Theta, QuasiPeriodicityAwayFromStrip) {
    for (const auto& s : samples(14, 20)) {
        ModularParameter tau(s.tau);
        for (int k : {1, 2, -1, -3}) {
            Complex lhs = theta1(s.z + double(k) * s.tau, tau).value;
            Complex rhs = theta1(s.z, tau).value;
            for (int m = 0; m < std::abs(k); ++m) {
                Complex x = s.z + double(k > 0 ? m : -m - 1) * s.tau;
                Complex factor = -std::exp(-two_pi_i * s.tau / 2.0) * std::exp(-two_pi_i * x);
                rhs = k > 0 ? factor * rhs : rhs / factor;
            }
            EXPECT_LT(std::abs(lhs - rhs), 1e-12 * (std::abs(rhs) + 1e-300) + 1e-300) << k;
        }
    }
}

TEST(Theta, JetAwayFromStripMatchesFiniteDifferences) {
    ModularParameter tau(Complex(0.2, 0.9));
    const Complex z = Complex(0.3, 0.1) + 2.0 * tau.tau();
    auto j = theta1(z, tau);
    auto g = [&](Complex x) { return theta1(x, tau).value; };
    double scale = std::abs(j.value) + std::abs(j.dz3);
    EXPECT_LT(std::abs(first_derivative(g, z, 1e-3) - j.dz), fd_tol * scale);
    EXPECT_LT(std::abs(third_derivative(g, z, 1e-2) - j.dz3), fd_tol * scale);
    EXPECT_LT(std::abs(j.dz2 - Complex(0.0, 4.0 * pi) * j.dtau), tol * scale);
}

TEST(Theta, DerivativeAtZeroIsEtaCubed) {
    for (const auto& s : samples(15, 20)) {
        ModularParameter tau(s.tau);
        Complex eta = dedekind_eta(tau);
        auto j = theta1(0.0, tau);
        EXPECT_LT(std::abs(j.dz - 2.0 * pi * eta * eta * eta), tol * std::abs(j.dz));
    }
}

TEST(Theta, LogDerivative) {
    for (const auto& s : samples(16, 20)) {
        ModularParameter tau(s.tau);
        for (Complex z : {s.z, s.z + 1.7 * s.tau}) {
            auto j = theta1(z, tau);
            auto l = theta1_log_derivative(z, tau);
            EXPECT_LT(std::abs(l.d1 - j.dz / j.value), tol * (1 + std::abs(l.d1)));
            Complex d2 = j.dz2 / j.value - (j.dz / j.value) * (j.dz / j.value);
            EXPECT_LT(std::abs(l.d2 - d2), 1e-10 * (1 + std::abs(l.d2)));
        }
    }
}

TEST(Eisenstein, PeriodicityAndCoefficients) {
    ModularParameter t(Complex(0.13, 1.2)), t1(Complex(1.13, 1.2));
    for (unsigned k : {2u, 4u, 6u})
        EXPECT_LT(std::abs(eisenstein(k, t) - eisenstein(k, t1)), 1e-13);
    // first Fourier coefficient by the trapezoid rule over one period
    auto coeff = [](unsigned k) {
        const int M = 64;
        Complex s = 0.0;
        for (int j = 0; j < M; ++j) {
            Complex tau{double(j) / M, 1.0};
            s += eisenstein(k, ModularParameter(tau)) * std::exp(-two_pi_i * tau);
        }
        return s / double(M);
    };
    EXPECT_NEAR(coeff(4).real(), 240.0, 1e-9);
    EXPECT_NEAR(coeff(2).real(), -24.0, 1e-9);
    EXPECT_NEAR(coeff(6).real(), -504.0, 1e-9);
    EXPECT_THROW(eisenstein(3, t), DomainError);
}

TEST(Eisenstein, InversionLaws) {
    for (const auto& s : samples(17, 50)) {
        Complex tau = s.tau;
        ModularParameter t(tau), ti(-1.0 / tau);
        Complex e2 = std::pow(tau, -2) * eisenstein(2, ti) - eisenstein(2, t);
        EXPECT_LT(std::abs(e2 - 12.0 / (two_pi_i * tau)), tol);
        EXPECT_LT(std::abs(eisenstein(4, ti) - std::pow(tau, 4) * eisenstein(4, t)),
                  tol * std::abs(std::pow(tau, 4)));
    }
}

TEST(Eta, LogDerivativeIsE2) {
    for (const auto& s : samples(18, 50)) {
        ModularParameter t(s.tau);
        EXPECT_LT(std::abs(eta_log_derivative(t) - two_pi_i / 24.0 * eisenstein(2, t)), tol);
        auto g = [&](Complex x) { return std::log(dedekind_eta(ModularParameter(x))); };
        EXPECT_LT(std::abs(first_derivative(g, s.tau) - eta_log_derivative(t)), fd_tol);
    }
}

TEST(FValue, ZeroAndStrip) {
    EXPECT_EQ(fval(0.0, Complex(0.1, 1.0)), Complex(0.0));
    EXPECT_THROW(fval(Complex(0.1, 1.2), Complex(0.1, 1.0)), DomainError);
    EXPECT_THROW(f_third_all(Complex(0.1, -1.0), ModularParameter(Complex(0.1, 1.0))), DomainError);
}

TEST(FValue, ThirdDerivativesByFiniteDifferences) {
    for (const auto& s : samples(19, 6)) {
        // keep stencils clear of the principal-branch cut
        Complex z = Complex(std::abs(s.z.real()) + 0.05, s.z.imag());
        ModularParameter tau(s.tau);
        auto f = f_third_all(z, tau);
        auto g = [&](Complex x) { return fval(x, s.tau); };
        EXPECT_LT(std::abs(third_derivative(g, z) - f.d30), fd_tol * (1 + std::abs(f.d30)));
        auto d21 = first_derivative(
            [&](Complex t) { return second_derivative([&](Complex x) { return fval(x, t); }, z); }, s.tau);
        EXPECT_LT(std::abs(d21 - f.d21), fd_tol * (1 + std::abs(f.d21)));
        auto d12 = second_derivative(
            [&](Complex t) { return first_derivative([&](Complex x) { return fval(x, t); }, z); }, s.tau);
        EXPECT_LT(std::abs(d12 - f.d12), fd_tol * (1 + std::abs(f.d12)));
        auto d03 = third_derivative([&](Complex t) { return fval(z, t); }, s.tau);
        EXPECT_LT(std::abs(d03 - f.d03), fd_tol * (1 + std::abs(f.d03)));
    }
}

TEST(FValue, ReflectionDiffersByQuadratic) {
    for (const auto& s : samples(20, 6)) {
        Complex z = Complex(std::abs(s.z.real()) + 0.05, s.z.imag());
        auto g = [&](Complex x) { return fval(-x, s.tau) - fval(x, s.tau); };
        EXPECT_LT(std::abs(third_derivative(g, z)), fd_tol);
    }
}

TEST(FThird, ThetaLogDerivative) {
    for (const auto& s : samples(21, 50)) {
        ModularParameter tau(s.tau);
        auto j = theta1(s.z, tau);
        Complex r = f_third(3, 0, {s.z, tau}) + j.dz / j.value / two_pi_i;
        EXPECT_LT(std::abs(r), tol);
    }
}

TEST(FThird, Periodicity) {
    for (const auto& s : samples(22, 30)) {
        ModularParameter tau(s.tau);
        auto a = f_third_all(s.z, tau), b = f_third_all(s.z + 1.0, tau);
        for (int m = 0; m < 4; ++m)
            EXPECT_LT(std::abs(a.get(m) - b.get(m)), tol * (1 + std::abs(a.get(m))));
        // z and z + tau both inside the strip
        Complex z = Complex(s.z.real(), -0.3 * s.tau.imag());
        Complex shifted = z + s.tau;
        EXPECT_LT(std::abs(f_third(3, 0, {shifted, tau}) - f_third(3, 0, {z, tau}) - 1.0), tol);
    }
}

TEST(FThird, StripReductionMatchesDirectSeries) {
    for (const auto& s : samples(23, 30)) {
        ModularParameter tau(s.tau);
        // Im z in (Im tau / 2, Im tau): reduction shifts by one period
        Complex z = Complex(s.z.real(), 0.75 * s.tau.imag());
        auto direct = f_third_all(z, tau), reduced = f_third_anywhere(z, tau);
        for (int m = 0; m < 4; ++m)
            EXPECT_LT(std::abs(direct.get(m) - reduced.get(m)), tol * (1 + std::abs(direct.get(m)))) << m;
    }
}

TEST(FThird, Parity) {
    for (const auto& s : samples(24, 30)) {
        ModularParameter tau(s.tau);
        auto a = f_third_all(s.z, tau), b = f_third_all(-s.z, tau);
        EXPECT_LT(std::abs(a.d30 + b.d30), tol);
        EXPECT_LT(std::abs(a.d12 + b.d12), tol);
        EXPECT_LT(std::abs(a.d21 - b.d21), tol);
        EXPECT_LT(std::abs(a.d03 - b.d03), tol);
    }
}

TEST(FThird, ModularInversion) {
    for (const auto& s : samples(25, 30)) {
        const Complex z = s.z, t = s.tau;
        ModularParameter tau(t), ti(-1.0 / t);
        if (std::abs((z / t).imag()) >= ti.tau().imag())
            continue;
        auto F = f_third_all(z, tau), H = f_third_all(z / t, ti);
        Complex t2 = t * t, t3 = t2 * t, t4 = t3 * t, z2 = z * z, z3 = z2 * z;
        Complex r30 = H.d30 - (t * F.d30 - z);
        Complex r21 = H.d21 - (t2 * F.d21 + t * z * F.d30 - z2 / 2.0);
        Complex r12 = H.d12 - (t3 * F.d12 + 2.0 * t2 * z * F.d21 + t * z2 * F.d30 - z3 / 3.0);
        Complex r03 = H.d03 - (t4 * F.d03 + 3.0 * t3 * z * F.d12 + 3.0 * t2 * z2 * F.d21 + t * z3 * F.d30 -
                               z2 * z2 / 4.0);
        double scale = 1 + std::abs(t4 * F.d03);
        EXPECT_LT(std::abs(r30), tol * scale);
        EXPECT_LT(std::abs(r21), tol * scale);
        EXPECT_LT(std::abs(r12), tol * scale);
        EXPECT_LT(std::abs(r03), tol * scale);
    }
}

TEST(FThird, Errors) {
    ModularParameter tau(Complex(0.0, 1.0));
    EXPECT_THROW(f_third(2, 2, {0.1, tau}), std::out_of_range);
    EXPECT_THROW(f_third(3, 0, {0.0, tau}), DomainError);
    SeriesParams tiny{3, 1e-30};
    EXPECT_THROW(f_third(3, 0, {Complex(0.1, 0.1), tau}, tiny), SeriesError);
}

TEST(Li3OneTau3, IsE4Over120) {
    for (const auto& s : samples(26, 50)) {
        ModularParameter t(s.tau), t1(s.tau + 1.0);
        EXPECT_LT(std::abs(li3_one_tau3(t) - eisenstein(4, t) / 120.0), tol);
        EXPECT_LT(std::abs(li3_one_tau3(t) - li3_one_tau3(t1)), tol);
    }
    EXPECT_NEAR(li3_one_tau3(ModularParameter(Complex(0.0, 8.0))).real(), 1.0 / 120.0, 1e-18);
    // the tau^3 derivative of the q-series by finite differences
    ModularParameter t(Complex(0.1, 1.0));
    auto g = [](Complex x) {
        Complex q = std::exp(two_pi_i * x), s = 0.0, qn = 1.0;
        for (int n = 1; n < 200; ++n) {
            qn *= q;
            s += polylog(3, qn);
        }
        return 2.0 * s / std::pow(two_pi_i, 3) + x * x * x / 720.0;
    };
    EXPECT_LT(std::abs(third_derivative(g, t.tau()) - li3_one_tau3(t)), fd_tol);
}
