#pragma once

#include "ellvee/rational.hpp"

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellvee {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex two_pi_i{0.0, 2.0 * std::numbers::pi};

class SeriesError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Truncation controls for every q-series and power series.
struct SeriesParams {
    int max_terms = 4000;
    double target_tol = 1e-17;
};

/// tau in the upper half plane, with q = exp(2 pi i tau) cached.
class ModularParameter {
  public:
    explicit ModularParameter(Complex tau) : tau_(tau) {
        if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
            throw DomainError("tau must lie in the upper half plane");
        q_ = std::exp(two_pi_i * tau);
    }
    [[nodiscard]] Complex tau() const { return tau_; }
    [[nodiscard]] Complex q() const { return q_; }

  private:
    Complex tau_;
    Complex q_;
};

struct EllipticArg {
    Complex z;
    ModularParameter tau;
};

namespace detail {

// Stops after three consecutive negligible terms; throws at the term budget.
class Truncation {
  public:
    Truncation(const SeriesParams& p, const char* what) : p_(p), what_(what) {}
    bool done(double term_mag, double sum_mag) {
        ++n_;
        running_max_ = std::max(running_max_, sum_mag);
        if (term_mag <= p_.target_tol * (1.0 + running_max_)) {
            if (++quiet_ >= 3)
                return true;
        } else {
            quiet_ = 0;
        }
        if (n_ >= p_.max_terms)
            throw SeriesError(std::string(what_) + ": no convergence within " +
                              std::to_string(p_.max_terms) + " terms");
        return false;
    }

  private:
    const SeriesParams& p_;
    const char* what_;
    int n_ = 0, quiet_ = 0;
    double running_max_ = 0.0;
};

inline Complex cube(Complex x) { return x * x * x; }

}  // namespace detail

/// Exact Bernoulli numbers with B_1 = -1/2.
inline Rational bernoulli(unsigned n) {
    static std::mutex mu;
    static std::vector<Rational> cache{Rational{1}};
    std::lock_guard<std::mutex> lock(mu);
    while (cache.size() <= n) {
        const unsigned m = static_cast<unsigned>(cache.size());
        Rational s = 0;
        Integer binom;
        for (unsigned k = 0; k < m; ++k) {
            mpz_bin_uiui(binom.get_mpz_t(), m + 1, k);
            s += Rational{binom} * cache[k];
        }
        Rational b = -s / Rational{m + 1};
        b.canonicalize();
        cache.push_back(b);
    }
    return cache[n];
}

inline Complex bernoulli_poly(unsigned n, Complex x) {
    Complex s = 0.0;
    Integer binom;
    for (unsigned k = 0; k <= n; ++k) {
        mpz_bin_uiui(binom.get_mpz_t(), n, k);
        s += binom.get_d() * bernoulli(k).get_d() * std::pow(x, static_cast<int>(n - k));
    }
    return s;
}

inline double factorial(unsigned n) {
    double f = 1.0;
    for (unsigned k = 2; k <= n; ++k)
        f *= k;
    return f;
}

/// Riemann zeta at integers s != 1 (non-positive s via Bernoulli numbers).
inline double zeta_int(int s) {
    if (s == 1)
        throw DomainError("zeta has a pole at s = 1");
    if (s <= 0) {
        const unsigned m = static_cast<unsigned>(-s);
        double v = bernoulli(m + 1).get_d() / (m + 1);
        return (m % 2 == 0) ? v : -v;  // (-1)^m B_{m+1}/(m+1)
    }
    if (s % 2 == 0) {
        // (-1)^{s/2+1} B_s (2 pi)^s / (2 s!)
        double b = bernoulli(static_cast<unsigned>(s)).get_d();
        double v = std::abs(b) * std::pow(2.0 * pi, s) / (2.0 * factorial(static_cast<unsigned>(s)));
        return v;
    }
    // direct sum to N, then Euler-Maclaurin tail
    const int N = 20;
    double sum = 0.0;
    for (int k = N - 1; k >= 1; --k)
        sum += std::pow(static_cast<double>(k), -s);
    const double n = N;
    double tail = std::pow(n, 1 - s) / (s - 1) + 0.5 * std::pow(n, -s);
    double rising = s;  // s (s+1) ... (s+2j-2)
    for (unsigned j = 1; j <= 8; ++j) {
        tail += bernoulli(2 * j).get_d() / factorial(2 * j) * rising * std::pow(n, -s - 2 * static_cast<int>(j) + 1);
        rising *= (s + 2 * j - 1) * (s + 2 * j);
    }
    return sum + tail;
}

/// Li_n(z) for n >= 1 on the principal branch (cut along [1, inf)).
inline Complex polylog(int n, Complex z, const SeriesParams& p = {}) {
    if (n < 1)
        throw DomainError("polylog order must be >= 1");
    if (z == Complex{0.0, 0.0})
        return 0.0;
    if (n == 1) {
        if (z == Complex{1.0, 0.0})
            throw DomainError("Li_1 has a pole at z = 1");
        return -std::log(1.0 - z);
    }
    const double r = std::abs(z);
    if (r <= 0.5) {
        detail::Truncation tr(p, "polylog");
        Complex sum = 0.0, zk = 1.0;
        for (int k = 1;; ++k) {
            zk *= z;
            Complex term = zk / std::pow(static_cast<double>(k), n);
            sum += term;
            if (tr.done(std::abs(term), std::abs(sum)))
                return sum;
        }
    }
    if (r > 2.0) {
        Complex inner = polylog(n, 1.0 / z, p);
        Complex lg = std::log(-z);
        Complex corr = std::pow(two_pi_i, n) / factorial(static_cast<unsigned>(n)) *
                       bernoulli_poly(static_cast<unsigned>(n), 0.5 + lg / two_pi_i);
        return ((n - 1) % 2 == 0 ? inner : -inner) - corr;
    }
    if (z == Complex{1.0, 0.0})
        return zeta_int(n);
    // expansion in mu = log z, valid for |mu| < 2 pi
    const Complex mu = std::log(z);
    double harmonic = 0.0;
    for (int k = 1; k <= n - 1; ++k)
        harmonic += 1.0 / k;
    detail::Truncation tr(p, "polylog");
    Complex sum = 0.0, muk = 1.0;  // mu^k / k!
    for (int k = 0;; ++k) {
        if (k > 0)
            muk *= mu / static_cast<double>(k);
        Complex term;
        if (k == n - 1)
            term = muk * (harmonic - std::log(-mu));
        else
            term = muk * zeta_int(n - k);
        sum += term;
        if (k >= n && tr.done(std::abs(term), std::abs(sum)))
            return sum;
    }
}

/// Li_n(exp(2 pi i z)) through the inversion relation
/// Li_n(e^{2 pi i z}) + (-1)^n Li_n(e^{-2 pi i z}) = -(2 pi i)^n B_n(z)/n!.
inline Complex polylog_inverted(int n, Complex z, const SeriesParams& p = {}) {
    const bool ok = (z.imag() >= 0.0 && z.real() >= 0.0 && z.real() < 1.0) ||
                    (z.imag() < 0.0 && z.real() > 0.0 && z.real() <= 1.0);
    if (!ok)
        throw DomainError("polylog_inverted: argument outside the inversion region");
    if (n < 1)
        throw DomainError("polylog order must be >= 1");
    Complex other = polylog(n, std::exp(-two_pi_i * z), p);
    Complex rhs = -std::pow(two_pi_i, n) / factorial(static_cast<unsigned>(n)) *
                  bernoulli_poly(static_cast<unsigned>(n), z);
    return rhs - (n % 2 == 0 ? other : -other);
}

/// theta_1 and its derivatives: d/dz up to third order and d/dtau.
struct ThetaJet {
    Complex value, dz, dz2, dz3, dtau;
};

namespace detail {

inline ThetaJet theta1_strip(Complex z, const ModularParameter& tau, const SeriesParams& p) {
    const Complex q = tau.q();
    const Complex w = std::exp(two_pi_i * z);
    const Complex q8 = std::exp(two_pi_i * tau.tau() / 8.0);
    const Complex s = std::sin(pi * z), c = std::cos(pi * z);
    const Complex A = 2.0 * s * q8;
    const Complex A1 = 2.0 * pi * c * q8;
    const Complex A2 = -2.0 * pi * pi * s * q8;
    const Complex A3 = -2.0 * pi * pi * pi * c * q8;
    const Complex At = A * (two_pi_i / 8.0);

    const Complex k = two_pi_i, k2 = k * k, k3 = k2 * k;
    Complex P = 1.0, S1 = 0.0, S2 = 0.0, S3 = 0.0, St = 0.0;
    Complex qn = 1.0;
    Truncation tr(p, "theta1");
    for (int n = 1;; ++n) {
        qn *= q;
        const Complex x = qn * w, y = qn / w;
        P *= (1.0 - qn) * (1.0 - x) * (1.0 - y);
        const Complex gx = x / (1.0 - x), gy = y / (1.0 - y), gq = qn / (1.0 - qn);
        const Complex hx = x / ((1.0 - x) * (1.0 - x)), hy = y / ((1.0 - y) * (1.0 - y));
        const Complex kx = x * (1.0 + x) / cube(1.0 - x), ky = y * (1.0 + y) / cube(1.0 - y);
        S1 += -k * gx + k * gy;
        S2 += -k2 * hx - k2 * hy;
        S3 += -k3 * kx + k3 * ky;
        St += -k * static_cast<double>(n) * (gq + gx + gy);
        const double mag = n * std::max({std::abs(qn), std::abs(x), std::abs(y)});
        if (tr.done(mag, 1.0))
            break;
    }
    ThetaJet j;
    j.value = A * P;
    j.dz = (A1 + A * S1) * P;
    j.dz2 = (A2 + 2.0 * A1 * S1 + A * (S2 + S1 * S1)) * P;
    j.dz3 = (A3 + 3.0 * A2 * S1 + 3.0 * A1 * (S2 + S1 * S1) +
             A * (S3 + 3.0 * S1 * S2 + S1 * S1 * S1)) *
            P;
    j.dtau = (At + A * St) * P;
    return j;
}

}  // namespace detail

/// Odd Jacobi theta function theta_1(z|tau) = 2 q^{1/8} sin(pi z) prod(...) with its jet.
inline ThetaJet theta1(Complex z, const ModularParameter& tau, const SeriesParams& p = {}) {
    const double k = std::round(z.imag() / tau.tau().imag());
    const Complex z0 = z - k * tau.tau();
    ThetaJet j0 = detail::theta1_strip(z0, tau, p);
    if (k == 0.0)
        return j0;
    // theta1(z0 + k tau) = (-1)^k exp(pi i k^2 tau - 2 pi i k z) theta1(z0), z0 = z - k tau
    const Complex i_pi{0.0, pi};
    const double sign = std::fmod(std::abs(k), 2.0) == 0.0 ? 1.0 : -1.0;
    const Complex M = sign * std::exp(i_pi * k * k * tau.tau() - two_pi_i * k * z);
    const Complex a = -two_pi_i * k;  // dM/dz = a M
    const Complex b = i_pi * k * k;   // dM/dtau = b M
    ThetaJet j;
    j.value = M * j0.value;
    j.dz = M * (a * j0.value + j0.dz);
    j.dz2 = M * (a * a * j0.value + 2.0 * a * j0.dz + j0.dz2);
    j.dz3 = M * (a * a * a * j0.value + 3.0 * a * a * j0.dz + 3.0 * a * j0.dz2 + j0.dz3);
    j.dtau = M * (b * j0.value + j0.dtau - k * j0.dz);
    return j;
}

/// Logarithmic derivative of theta_1 in z and its z-derivative.
struct ThetaLog {
    Complex d1, d2;
};

inline ThetaLog theta1_log_derivative(Complex z, const ModularParameter& tau,
                                      const SeriesParams& p = {}) {
    const double kk = std::round(z.imag() / tau.tau().imag());
    const Complex z0 = z - kk * tau.tau();
    const Complex w = std::exp(two_pi_i * z0);
    if (std::abs(1.0 - w) < 1e-300)
        throw DomainError("theta1_log_derivative at a lattice point");
    const Complex q = tau.q();
    const Complex k = two_pi_i, k2 = k * k;
    Complex L = Complex{0.0, pi} * (w + 1.0) / (w - 1.0);
    Complex dL = 4.0 * pi * pi * w / ((w - 1.0) * (w - 1.0));
    Complex qn = 1.0;
    detail::Truncation tr(p, "theta1_log_derivative");
    for (int n = 1;; ++n) {
        qn *= q;
        const Complex x = qn * w, y = qn / w;
        L += -k * x / (1.0 - x) + k * y / (1.0 - y);
        dL += -k2 * x / ((1.0 - x) * (1.0 - x)) - k2 * y / ((1.0 - y) * (1.0 - y));
        if (tr.done(std::max(std::abs(x), std::abs(y)), std::abs(L)))
            break;
    }
    return {L - two_pi_i * kk, dL};
}

inline Complex dedekind_eta(const ModularParameter& tau, const SeriesParams& p = {}) {
    const Complex q = tau.q();
    Complex prod = 1.0, qn = 1.0;
    detail::Truncation tr(p, "dedekind_eta");
    for (int n = 1;; ++n) {
        qn *= q;
        prod *= 1.0 - qn;
        if (tr.done(std::abs(qn), 1.0))
            break;
    }
    return std::exp(two_pi_i * tau.tau() / 24.0) * prod;
}

/// d/dtau log eta(tau).
inline Complex eta_log_derivative(const ModularParameter& tau, const SeriesParams& p = {}) {
    const Complex q = tau.q();
    Complex sum = two_pi_i / 24.0, qn = 1.0;
    detail::Truncation tr(p, "eta_log_derivative");
    for (int n = 1;; ++n) {
        qn *= q;
        Complex term = -two_pi_i * static_cast<double>(n) * qn / (1.0 - qn);
        sum += term;
        if (tr.done(std::abs(term), std::abs(sum)))
            break;
    }
    return sum;
}

/// Normalised Eisenstein series E_k (k even, k >= 2) from divisor sums.
inline Complex eisenstein(unsigned k, const ModularParameter& tau, const SeriesParams& p = {}) {
    if (k < 2 || k % 2 != 0)
        throw DomainError("eisenstein weight must be even and >= 2");
    const double coeff = -2.0 * k / bernoulli(k).get_d();
    const Complex q = tau.q();
    Complex sum = 1.0, qn = 1.0;
    detail::Truncation tr(p, "eisenstein");
    for (int n = 1;; ++n) {
        qn *= q;
        double sigma = 0.0;
        for (int d = 1; d * d <= n; ++d) {
            if (n % d)
                continue;
            sigma += std::pow(static_cast<double>(d), static_cast<int>(k) - 1);
            const int e = n / d;
            if (e != d)
                sigma += std::pow(static_cast<double>(e), static_cast<int>(k) - 1);
        }
        Complex term = coeff * sigma * qn;
        sum += term;
        if (tr.done(std::abs(term), std::abs(sum)))
            break;
    }
    return sum;
}

inline void require_strip(Complex z, const ModularParameter& tau, const char* what) {
    if (!(std::abs(z.imag()) < tau.tau().imag()))
        throw DomainError(std::string(what) + ": |Im z| must be below Im tau");
}

/// Prepotential building block f(z, tau), principal branch.
inline Complex f_value(const EllipticArg& a, const SeriesParams& p = {}) {
    require_strip(a.z, a.tau, "f_value");
    if (a.z == Complex{0.0, 0.0})
        return 0.0;
    const Complex z = a.z, tau = a.tau.tau(), q = a.tau.q();
    const Complex zeta = std::exp(two_pi_i * z);
    const Complex norm = 1.0 / detail::cube(two_pi_i);
    Complex head = polylog(3, zeta, p) - zeta_int(3);
    Complex sum = 0.0, qn = 1.0;
    detail::Truncation tr(p, "f_value");
    for (int n = 1;; ++n) {
        qn *= q;
        Complex term = polylog(3, qn * zeta, p) + polylog(3, qn / zeta, p) - 2.0 * polylog(3, qn, p);
        sum += term;
        if (tr.done(std::abs(term), std::abs(sum)))
            break;
    }
    return norm * (head + sum) + z * z * z / 12.0 - z * z * tau / 24.0;
}

/// Third derivatives f_{z^{3-m} tau^m}, m = 0..3.
struct FThird {
    Complex d30, d21, d12, d03;
    [[nodiscard]] Complex get(int m) const {
        switch (m) {
        case 0: return d30;
        case 1: return d21;
        case 2: return d12;
        case 3: return d03;
        default: throw std::out_of_range("FThird index");
        }
    }
};

/// Third derivatives inside the strip |Im z| < Im tau.
inline FThird f_third_all(Complex z, const ModularParameter& tau, const SeriesParams& p = {}) {
    require_strip(z, tau, "f_third");
    const Complex zeta = std::exp(two_pi_i * z);
    if (std::abs(1.0 - zeta) < 1e-300)
        throw DomainError("f_third: lattice point");
    const Complex q = tau.q();
    FThird f{zeta / (1.0 - zeta) + 0.5, Complex{-1.0 / 12.0}, 0.0, 0.0};
    Complex qn = 1.0;
    detail::Truncation tr(p, "f_third");
    for (int n = 1;; ++n) {
        qn *= q;
        const Complex a = qn * zeta / (1.0 - qn * zeta);
        const Complex b = qn / zeta / (1.0 - qn / zeta);
        const Complex c = qn / (1.0 - qn);
        const double N = n;
        f.d30 += a - b;
        f.d21 += N * (a + b);
        f.d12 += N * N * (a - b);
        f.d03 += N * N * N * (a + b - 2.0 * c);
        const double mag = N * N * N * std::max({std::abs(a), std::abs(b), std::abs(c)});
        if (tr.done(mag, std::abs(f.d03) + std::abs(f.d30)))
            break;
    }
    return f;
}

/// f^{(m,n)}: m derivatives in z, n in tau, m + n = 3.
inline Complex f_third(int m, int n, const EllipticArg& a, const SeriesParams& p = {}) {
    if (m < 0 || n < 0 || m + n != 3)
        throw std::out_of_range("f_third: orders must be non-negative with m + n = 3");
    return f_third_all(a.z, a.tau, p).get(n);
}

/// Third derivatives for any z off the lattice: z = z0 + k tau with z0 in the strip,
/// then the quasi-periodic shift of each derivative is applied.
inline FThird f_third_anywhere(Complex z, const ModularParameter& tau, const SeriesParams& p = {}) {
    const double k = std::round(z.imag() / tau.tau().imag());
    const Complex z0 = z - k * tau.tau();
    FThird f = f_third_all(z0, tau, p);
    if (k == 0.0)
        return f;
    FThird F;
    F.d30 = f.d30 + k;
    F.d21 = f.d21 + k * k / 2.0 - k * F.d30;
    F.d12 = f.d12 + k * k * k / 3.0 - 2.0 * k * F.d21 - k * k * F.d30;
    F.d03 = f.d03 + k * k * k * k / 4.0 - 3.0 * k * F.d12 - 3.0 * k * k * F.d21 - k * k * k * F.d30;
    return F;
}

/// Third tau-derivative of the regularised Li_3(1, q)/(2 pi i)^3.
inline Complex li3_one_tau3(const ModularParameter& tau, const SeriesParams& p = {}) {
    const Complex q = tau.q();
    Complex sum = 1.0 / 120.0, qn = 1.0;
    detail::Truncation tr(p, "li3_one_tau3");
    for (int n = 1;; ++n) {
        qn *= q;
        const double N = n;
        Complex term = 2.0 * N * N * N * qn / (1.0 - qn);
        sum += term;
        if (tr.done(std::abs(term), std::abs(sum)))
            break;
    }
    return sum;
}

}  // namespace ellvee
