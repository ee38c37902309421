#pragma once

#include "ellvee/report.hpp"
#include "ellvee/special_functions.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellvee {

struct IdentityConfig {
    SeriesParams series;
    double lattice_guard = 1e-3;
};

namespace detail {

inline void require_off_lattice(Complex z, const ModularParameter& tau, double guard, const char* what) {
    const Complex t = tau.tau();
    const double k = std::round(z.imag() / t.imag());
    Complex w = z - k * t;
    w -= std::round(w.real());
    double best = std::abs(w);
    for (int m = -1; m <= 1; ++m)
        for (int n = -1; n <= 1; ++n)
            best = std::min(best, std::abs(w - double(m) - double(n) * t));
    if (best < guard)
        throw DomainError(std::string(what) + ": argument too close to the lattice");
}

}  // namespace detail

/// theta1'''(0)/theta1'(0) from the differentiated series.
inline Complex theta_cubic_ratio(const ModularParameter& tau, const SeriesParams& sp = {}) {
    ThetaJet j = theta1(0.0, tau, sp);
    return j.dz3 / j.dz;
}

/// Same constant via 12 pi i eta'/eta.
inline Complex theta_cubic_ratio_eta(const ModularParameter& tau, const SeriesParams& sp = {}) {
    return 12.0 * pi * Complex(0, 1) * eta_log_derivative(tau, sp);
}

/// Theta form of the three-term identity, c = -a - b.
inline Complex fs_theta(Complex a, Complex b, const ModularParameter& tau, const IdentityConfig& cfg = {}) {
    const Complex c = -a - b;
    std::array<Complex, 3> L, Q;
    const std::array<Complex, 3> args{a, b, c};
    for (std::size_t k = 0; k < 3; ++k) {
        detail::require_off_lattice(args[k], tau, cfg.lattice_guard, "fs_theta");
        ThetaJet j = theta1(args[k], tau, cfg.series);
        L[k] = j.dz / j.value;
        Q[k] = j.dz2 / j.value;
    }
    return L[0] * L[1] + L[1] * L[2] + L[2] * L[0] + 0.5 * (Q[0] + Q[1] + Q[2]) -
           0.5 * theta_cubic_ratio(tau, cfg.series);
}

/// The same identity written with third derivatives of f.
inline Complex fs_f(Complex a, Complex b, const ModularParameter& tau, const IdentityConfig& cfg = {}) {
    const Complex c = -a - b;
    std::array<FThird, 3> f;
    const std::array<Complex, 3> args{a, b, c};
    for (std::size_t k = 0; k < 3; ++k) {
        detail::require_off_lattice(args[k], tau, cfg.lattice_guard, "fs_f");
        f[k] = f_third_anywhere(args[k], tau, cfg.series);
    }
    return f[0].d30 * f[1].d30 + f[1].d30 * f[2].d30 + f[2].d30 * f[0].d30 -
           (f[0].d21 + f[1].d21 + f[2].d21);
}

enum class Rank2 { A2, B2, G2 };

inline std::string rank2_name(Rank2 g) {
    switch (g) {
    case Rank2::A2: return "A2";
    case Rank2::B2: return "B2";
    case Rank2::G2: return "G2";
    }
    return "?";
}

/// Simple-root coordinates: Gram matrix of (alpha, beta), positive roots, k_alpha.
struct Rank2Data {
    std::array<std::array<double, 2>, 2> gram;
    std::vector<std::array<int, 2>> positive;
    std::vector<double> k;
};

inline Rank2Data rank2_data(Rank2 g, double k_short, double k_long) {
    switch (g) {
    case Rank2::A2:
        return {{{{2, -1}, {-1, 2}}}, {{1, 0}, {0, 1}, {1, 1}}, {k_long, k_long, k_long}};
    case Rank2::B2:
        return {{{{2, -1}, {-1, 1}}}, {{1, 0}, {0, 1}, {1, 1}, {1, 2}}, {k_long, k_short, k_short, k_long}};
    case Rank2::G2:
        return {{{{6, -3}, {-3, 2}}},
                {{1, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}, {2, 3}},
                {k_long, k_short, k_short, k_short, k_long, k_long}};
    }
    throw std::invalid_argument("rank2_data: unknown group");
}

inline Rank2Data rank2_data(Rank2 g) {
    switch (g) {
    case Rank2::A2: return rank2_data(g, 1, 1);
    case Rank2::B2: return rank2_data(g, 2, 1);
    case Rank2::G2: return rank2_data(g, 10, 6);
    }
    throw std::invalid_argument("rank2_data: unknown group");
}

/// sum over unordered pairs alpha != beta of (alpha,beta) f30 f30 + sum k f21;
/// z in simple-root coordinates, z_alpha = (alpha, z).
inline Complex rank2_identity(const Rank2Data& d, std::array<Complex, 2> z, const ModularParameter& tau,
                              const IdentityConfig& cfg = {}) {
    auto form = [&](std::array<double, 2> x, std::array<Complex, 2> y) {
        Complex s = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                s += x[i] * d.gram[i][j] * y[j];
        return s;
    };
    std::vector<FThird> f;
    std::vector<std::array<double, 2>> r;
    for (const auto& p : d.positive) {
        r.push_back({double(p[0]), double(p[1])});
        const Complex za = form(r.back(), z);
        detail::require_off_lattice(za, tau, cfg.lattice_guard, "rank2_identity");
        f.push_back(f_third_anywhere(za, tau, cfg.series));
    }
    Complex s = 0;
    for (std::size_t a = 0; a < r.size(); ++a) {
        s += d.k[a] * f[a].d21;
        for (std::size_t b = a + 1; b < r.size(); ++b)
            s += form(r[a], {r[b][0], r[b][1]}) * f[a].d30 * f[b].d30;
    }
    return s;
}

inline Complex rank2_identity(Rank2 g, std::array<Complex, 2> z, const ModularParameter& tau,
                              const IdentityConfig& cfg = {}) {
    return rank2_identity(rank2_data(g), z, tau, cfg);
}

/// The two A2 identities in x, y; the second is compared with -E4/108.
inline Complex a2_identity(int which, Complex x, Complex y, const ModularParameter& tau,
                           const IdentityConfig& cfg = {}) {
    if (which != 1 && which != 2)
        throw std::invalid_argument("a2_identity: which must be 1 or 2");
    for (Complex w : {x, y, x + y})
        detail::require_off_lattice(w, tau, cfg.lattice_guard, "a2_identity");
    const FThird X = f_third_anywhere(x, tau, cfg.series), Y = f_third_anywhere(y, tau, cfg.series),
                 S = f_third_anywhere(x + y, tau, cfg.series);
    if (which == 1)
        return S.d30 * (X.d21 - Y.d21) + Y.d30 * (S.d21 - X.d21) + X.d12 - 0.5 * Y.d12 + 0.5 * S.d12;
    const Complex lhs = X.d30 * (S.d12 - Y.d12) + Y.d30 * (S.d12 - X.d12) -
                        (2.0 / 3.0) * S.d30 * (X.d12 + Y.d12) + (2.0 / 3.0) * S.d21 * X.d21 +
                        (2.0 / 3.0) * S.d21 * Y.d21 - (8.0 / 3.0) * X.d21 * Y.d21 + (10.0 / 9.0) * S.d03;
    return lhs + eisenstein(4, tau, cfg.series) / 108.0;
}

// ---------------------------------------------------------------------------
// report

struct IdentityRunConfig {
    IdentityConfig eval;
    double tol = 1e-10;
    std::size_t samples = 50;
    std::uint64_t seed = 20240601;
    double z_max = 0.4;
    double min_separation = 0.05;
};

/// Seeded (a, b, tau) with a, b, a + b and every rank-2 pairing kept away from 0.
struct IdentitySample {
    Complex a, b;
    ModularParameter tau;
};

inline std::vector<IdentitySample> identity_samples(const IdentityRunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.8, 2.5), zz(-cfg.z_max, cfg.z_max);
    std::vector<IdentitySample> out;
    while (out.size() < cfg.samples) {
        Complex tau(re(rng), im(rng));
        Complex a(zz(rng), zz(rng)), b(zz(rng), zz(rng));
        if (std::abs(a) > cfg.z_max || std::abs(b) > cfg.z_max)
            continue;
        bool ok = true;
        for (Complex w : {a, b, a + b, a - b, a + 2.0 * b, 2.0 * a + b, a + 3.0 * b, 2.0 * a + 3.0 * b})
            ok = ok && std::abs(w) >= cfg.min_separation;
        if (ok)
            out.push_back({a, b, ModularParameter(tau)});
    }
    return out;
}

inline Report check_identities(const IdentityRunConfig& cfg) {
    Report r;
    r.check = "identities";
    r.target = "theta/f";
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    double fs = 0, fsf = 0, cubic = 0, a2 = 0, b2 = 0, g2 = 0, i1 = 0, i2 = 0;
    for (const auto& s : identity_samples(cfg)) {
        auto fold = [&](double& slot, Complex v) {
            const double x = std::abs(v);
            r.absorb(x, cfg.tol);
            slot = std::max(slot, x);
        };
        fold(fs, fs_theta(s.a, s.b, s.tau, cfg.eval));
        fold(fsf, fs_f(s.a, s.b, s.tau, cfg.eval));
        fold(cubic, theta_cubic_ratio(s.tau, cfg.eval.series) - theta_cubic_ratio_eta(s.tau, cfg.eval.series));
        // z in simple-root coordinates with the pairings of the simple roots equal to (a, b)
        auto zfor = [&](Rank2 g) {
            auto d = rank2_data(g);
            const double det = d.gram[0][0] * d.gram[1][1] - d.gram[0][1] * d.gram[1][0];
            return std::array<Complex, 2>{(d.gram[1][1] * s.a - d.gram[0][1] * s.b) / det,
                                          (d.gram[0][0] * s.b - d.gram[1][0] * s.a) / det};
        };
        fold(a2, rank2_identity(Rank2::A2, zfor(Rank2::A2), s.tau, cfg.eval));
        fold(b2, rank2_identity(Rank2::B2, zfor(Rank2::B2), s.tau, cfg.eval));
        fold(g2, rank2_identity(Rank2::G2, zfor(Rank2::G2), s.tau, cfg.eval));
        fold(i1, a2_identity(1, s.a, s.b, s.tau, cfg.eval));
        fold(i2, a2_identity(2, s.a, s.b, s.tau, cfg.eval));
    }
    r.details["fs_theta"] = format_sci(fs);
    r.details["fs_f"] = format_sci(fsf);
    r.details["theta_cubic_vs_eta"] = format_sci(cubic);
    r.details["rank2_A2"] = format_sci(a2);
    r.details["rank2_B2"] = format_sci(b2);
    r.details["rank2_G2"] = format_sci(g2);
    r.details["a2_identity_1"] = format_sci(i1);
    r.details["a2_identity_2"] = format_sci(i2);
    return r;
}

/// Heat equation, eta'/eta, E2 anomaly, trilogarithm inversion, f30 against
/// theta1'/theta1, and Li3(1, q) third derivative against E4/120.
inline Report check_special_functions(const IdentityRunConfig& cfg) {
    Report r;
    r.check = "special_functions";
    r.target = "theta/eta/eisenstein/polylog";
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.8, 2.5), zz(-cfg.z_max, cfg.z_max),
        xr(0.05, 0.95), xi(-0.3, 0.3);
    const auto& sp = cfg.eval.series;
    double heat = 0, eta = 0, anomaly = 0, inversion = 0, f30 = 0, li3 = 0;
    auto fold = [&](double& slot, double x) {
        r.absorb(x, cfg.tol);
        slot = std::max(slot, x);
    };
    for (std::size_t k = 0; k < cfg.samples;) {
        const Complex z(zz(rng), zz(rng)), tau(re(rng), im(rng)), x(xr(rng), xi(rng));
        if (std::abs(z) > cfg.z_max || std::abs(z) < cfg.min_separation)
            continue;
        ++k;
        const ModularParameter t(tau), ti(-1.0 / tau);
        const ThetaJet j = theta1(z, t, sp);
        fold(heat, std::abs(j.dz2 - Complex(0.0, 4.0 * pi) * j.dtau) / (1.0 + std::abs(j.dz2)));
        fold(eta, std::abs(eta_log_derivative(t, sp) - two_pi_i / 24.0 * eisenstein(2, t, sp)));
        fold(anomaly, std::abs(std::pow(tau, -2) * eisenstein(2, ti, sp) - eisenstein(2, t, sp) -
                               12.0 / (two_pi_i * tau)));
        const Complex inv = polylog(3, std::exp(two_pi_i * x), sp) - polylog(3, std::exp(-two_pi_i * x), sp) +
                            std::pow(two_pi_i, 3) * bernoulli_poly(3, x) / 6.0;
        fold(inversion, std::abs(inv) / (1.0 + std::abs(polylog(3, std::exp(two_pi_i * x), sp))));
        fold(f30, std::abs(f_third(3, 0, {z, t}, sp) + j.dz / j.value / two_pi_i));
        fold(li3, std::abs(li3_one_tau3(t, sp) - eisenstein(4, t, sp) / 120.0));
    }
    r.details["heat_equation"] = format_sci(heat);
    r.details["eta_log_derivative"] = format_sci(eta);
    r.details["e2_anomaly"] = format_sci(anomaly);
    r.details["polylog_inversion"] = format_sci(inversion);
    r.details["f30_theta"] = format_sci(f30);
    r.details["li3_one_tau3"] = format_sci(li3);
    return r;
}

}  // namespace ellvee
