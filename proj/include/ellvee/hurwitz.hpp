#pragma once

#include "ellvee/report.hpp"
#include "ellvee/root_systems.hpp"
#include "ellvee/special_functions.hpp"
#include "ellvee/vee_systems.hpp"
#include "ellvee/wdvv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellvee {

class HurwitzError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SuperFamily { A, B };

inline std::string super_name(SuperFamily f, int N) { return (f == SuperFamily::A ? "A" : "B") + std::to_string(N); }

/// lambda(v) = exp(2 pi i u) prod theta1(v - z_i) / theta1(v)^deg.
/// A_N: z = (c_0, .., c_{N-1}, -sum c); B_N: z = (+-z_1, .., +-z_N).
/// Moduli vector m = (u, coordinates, tau).
struct Superpotential {
    SuperFamily family = SuperFamily::A;
    int N = 1;
    CVector m;

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(N) + 2; }
    [[nodiscard]] Complex u() const { return m.front(); }
    [[nodiscard]] Complex tau() const { return m.back(); }
    [[nodiscard]] int degree() const { return family == SuperFamily::A ? N + 1 : 2 * N; }

    [[nodiscard]] CVector zeros() const {
        CVector z;
        if (family == SuperFamily::A) {
            Complex s = 0;
            for (int i = 1; i <= N; ++i) {
                z.push_back(m[i]);
                s += m[i];
            }
            z.push_back(-s);
        } else {
            for (int i = 1; i <= N; ++i) {
                z.push_back(m[i]);
                z.push_back(-m[i]);
            }
        }
        return z;
    }
};

struct HurwitzConfig {
    SeriesParams series;
    int grid = 40;
    int max_iter = 60;
    double newton_tol = 1e-14;
    double dedupe = 1e-7;
    double fd_step = 1e-5;
    double pole_guard = 1e-3;
};

inline Superpotential make_superpotential(SuperFamily f, int N, Complex u, const CVector& coords, Complex tau,
                                          double guard = 1e-3) {
    if (N < 1)
        throw std::invalid_argument("superpotential: N must be >= 1");
    if (coords.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("superpotential: expected " + std::to_string(N) + " coordinates");
    if (!(tau.imag() > 0.0))
        throw DomainError("superpotential: tau must lie in the upper half plane");
    Superpotential S{f, N, {}};
    S.m.push_back(u);
    S.m.insert(S.m.end(), coords.begin(), coords.end());
    S.m.push_back(tau);
    auto z = S.zeros();
    // zeros distinct from each other and from the pole, otherwise the degree drops
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (detail::lattice_distance(z[i], tau) < guard)
            throw DomainError("superpotential: zero collides with the pole");
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (detail::lattice_distance(z[i] - z[j], tau) < guard)
                throw DomainError("superpotential: colliding zeros");
    }
    return S;
}

/// Moduli dimension matches the catalog system of the same rank.
inline VSystem closed_form_system(SuperFamily f, int N) {
    return catalog(f == SuperFamily::A ? "AN" : "BN", {{"N", N}});
}

namespace detail {

inline void require_off_poles(const Superpotential& S, Complex v, double guard) {
    const Complex t = S.tau();
    if (lattice_distance(v, t) < guard)
        throw DomainError("superpotential: v at a pole");
    for (Complex z : S.zeros())
        if (lattice_distance(v - z, t) < guard)
            throw DomainError("superpotential: v at a zero");
}

inline Complex reduce_to_cell(Complex v, Complex tau) {
    v -= std::floor(v.imag() / tau.imag()) * tau;
    v -= std::floor(v.real());
    return v;
}

}  // namespace detail

inline Complex lambda_eval(const Superpotential& S, Complex v, const HurwitzConfig& cfg = {}) {
    detail::require_off_poles(S, v, cfg.pole_guard);
    const ModularParameter tau(S.tau());
    Complex r = std::exp(two_pi_i * S.u());
    for (Complex z : S.zeros())
        r *= theta1(v - z, tau, cfg.series).value;
    return r / std::pow(theta1(v, tau, cfg.series).value, S.degree());
}

/// d/dv log lambda (order 1) and its v-derivative (order 2).
inline Complex dlog_lambda(const Superpotential& S, Complex v, int order, const HurwitzConfig& cfg = {}) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("dlog_lambda: order must be 1 or 2");
    detail::require_off_poles(S, v, cfg.pole_guard);
    const ModularParameter tau(S.tau());
    auto pick = [&](Complex x) {
        ThetaLog t = theta1_log_derivative(x, tau, cfg.series);
        return order == 1 ? t.d1 : t.d2;
    };
    Complex s = 0;
    for (Complex z : S.zeros())
        s += pick(v - z);
    return s - double(S.degree()) * pick(v);
}

/// log(lambda_1(v) / lambda_2(v)) for nearby moduli, one factor at a time.
inline Complex log_ratio(const Superpotential& S1, const Superpotential& S2, Complex v, const HurwitzConfig& cfg = {}) {
    const ModularParameter t1(S1.tau()), t2(S2.tau());
    auto z1 = S1.zeros(), z2 = S2.zeros();
    Complex s = two_pi_i * (S1.u() - S2.u());
    for (std::size_t i = 0; i < z1.size(); ++i)
        s += std::log(theta1(v - z1[i], t1, cfg.series).value / theta1(v - z2[i], t2, cfg.series).value);
    s -= double(S1.degree()) * std::log(theta1(v, t1, cfg.series).value / theta1(v, t2, cfg.series).value);
    return s;
}

/// d/dm_k log lambda at fixed v; central differences with one Richardson step.
inline Complex moduli_derivative(const Superpotential& S, std::size_t k, Complex v, const HurwitzConfig& cfg = {}) {
    auto D = [&](double h) {
        Superpotential a = S, b = S;
        a.m[k] += h;
        b.m[k] -= h;
        return log_ratio(a, b, v, cfg) / (2.0 * h);
    };
    return (4.0 * D(cfg.fd_step / 2) - D(cfg.fd_step)) / 3.0;
}

struct CriticalPoint {
    Complex v;       // reduced to the cell [0,1) + [0,1) tau
    Complex omega2;  // second v-derivative of log lambda
    Complex value;   // lambda(v)
};

namespace detail {

inline std::vector<Complex> newton_scan(const Superpotential& S, int grid, const HurwitzConfig& cfg) {
    const Complex t = S.tau();
    std::vector<Complex> found;
    const Complex offset(0.013, 0.007);
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            Complex v = double(a) / grid + double(b) / grid * t + offset;
            bool ok = false;
            try {
                for (int it = 0; it < cfg.max_iter; ++it) {
                    const Complex dv = dlog_lambda(S, v, 1, cfg) / dlog_lambda(S, v, 2, cfg);
                    if (!std::isfinite(dv.real()) || !std::isfinite(dv.imag()))
                        break;
                    v -= dv;
                    if (std::abs(dv) < cfg.newton_tol * (1.0 + std::abs(v))) {
                        ok = true;
                        break;
                    }
                }
                if (ok)
                    require_off_poles(S, v, cfg.pole_guard);
            } catch (const DomainError&) {
                ok = false;
            }
            if (!ok)
                continue;
            v = reduce_to_cell(v, t);
            bool dup = false;
            for (Complex p : found)
                dup = dup || lattice_distance(v - p, t) < cfg.dedupe;
            if (!dup)
                found.push_back(v);
        }
    return found;
}

}  // namespace detail

/// Zeros of d log lambda in the cell by Newton from a seed grid, refined
/// twice when basins are missed. Throws HurwitzError unless exactly deg + 1
/// simple critical points are found.
inline std::vector<CriticalPoint> critical_points(const Superpotential& S, const HurwitzConfig& cfg = {}) {
    const auto expected = static_cast<std::size_t>(S.degree() + 1);
    std::vector<Complex> found;
    for (int level = 0, grid = cfg.grid; level < 3; ++level, grid *= 2) {
        found = detail::newton_scan(S, grid, cfg);
        if (found.size() >= expected)
            break;
    }
    if (found.size() != expected)
        throw HurwitzError("critical_points: found " + std::to_string(found.size()) + ", expected " +
                           std::to_string(expected));
    auto key = [](double x) { return std::round(x * 1e9); };
    std::sort(found.begin(), found.end(), [&](Complex x, Complex y) {
        return key(x.real()) != key(y.real()) ? x.real() < y.real() : x.imag() < y.imag();
    });
    std::vector<CriticalPoint> out;
    for (Complex v : found) {
        const Complex w2 = dlog_lambda(S, v, 2, cfg);
        if (std::abs(w2) < 1e-8)
            throw HurwitzError("critical_points: degenerate critical point");
        out.push_back({v, w2, lambda_eval(S, v, cfg)});
    }
    return out;
}

/// Smallest gap between critical values. For B_N, lambda(-v) = lambda(v) so
/// values are only compared between points not related by v -> -v.
inline double critical_value_gap(const Superpotential& S, const std::vector<CriticalPoint>& cps) {
    double gap = INFINITY;
    for (std::size_t i = 0; i < cps.size(); ++i)
        for (std::size_t j = i + 1; j < cps.size(); ++j) {
            if (S.family == SuperFamily::B && detail::lattice_distance(cps[i].v + cps[j].v, S.tau()) < 1e-6)
                continue;
            gap = std::min(gap, std::abs(cps[i].value - cps[j].value) / (1.0 + std::abs(cps[i].value)));
        }
    return gap;
}

/// Residue metric and c* in the moduli basis (u, coordinates, tau).
struct ResidueData {
    std::size_t dim = 0;
    std::vector<CriticalPoint> points;
    std::vector<Complex> g;      // dim^2
    std::vector<Complex> cstar;  // dim^3

    [[nodiscard]] Complex G(std::size_t a, std::size_t b) const { return g[a * dim + b]; }
    [[nodiscard]] Complex C(std::size_t a, std::size_t b, std::size_t c) const {
        return cstar[(a * dim + b) * dim + c];
    }
};

inline ResidueData residues(const Superpotential& S, const HurwitzConfig& cfg = {}) {
    ResidueData R;
    R.dim = S.dim();
    R.points = critical_points(S, cfg);
    const std::size_t D = R.dim;
    R.g.assign(D * D, 0.0);
    R.cstar.assign(D * D * D, 0.0);
    for (const auto& cp : R.points) {
        std::vector<Complex> d(D);
        for (std::size_t k = 0; k < D; ++k)
            d[k] = moduli_derivative(S, k, cp.v, cfg);
        for (std::size_t a = 0; a < D; ++a)
            for (std::size_t b = 0; b < D; ++b) {
                R.g[a * D + b] += d[a] * d[b] / cp.omega2;
                for (std::size_t c = 0; c < D; ++c)
                    R.cstar[(a * D + b) * D + c] += d[a] * d[b] * d[c] / (cp.omega2 * two_pi_i);
            }
    }
    return R;
}

struct ClosedFormComparison {
    double unity = 0;      // c*(d_u, a, b) - g(a, b)
    double metric = 0;     // g - closed-form metric
    double structure = 0;  // c* - closed-form c
    double du_analytic = 0;
    double value_gap = 0;
    std::size_t count = 0;
};

inline ClosedFormComparison compare_closed_form(const Superpotential& S, const Prepotential& P,
                                                const HurwitzConfig& cfg = {}, ResidueData* keep = nullptr) {
    if (P.n + 2 != S.dim())
        throw std::invalid_argument("compare_closed_form: dimension mismatch");
    ResidueData R = residues(S, cfg);
    ModuliPoint pt{S.u(), CVector(S.m.begin() + 1, S.m.end() - 1), ModularParameter(S.tau())};
    StructureTensor c = c_tensor(P, pt, EvalConfig{cfg.series, cfg.pole_guard});
    ClosedFormComparison out;
    out.count = R.points.size();
    const std::size_t D = R.dim;
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) {
            out.unity = std::max(out.unity, std::abs(R.C(0, a, b) - R.G(a, b)));
            out.metric = std::max(out.metric, std::abs(R.G(a, b) - c.eta(a, b)));
            for (std::size_t e = 0; e < D; ++e)
                out.structure = std::max(out.structure, std::abs(R.C(a, b, e) - c(a, b, e)));
        }
    for (const auto& cp : R.points)
        out.du_analytic = std::max(out.du_analytic, std::abs(moduli_derivative(S, 0, cp.v, cfg) - two_pi_i));
    out.value_gap = critical_value_gap(S, R.points);
    if (keep)
        *keep = std::move(R);
    return out;
}

// ---------------------------------------------------------------------------
// report

struct HurwitzRunConfig {
    HurwitzConfig eval;
    double tol = 1e-6;
    std::size_t samples = 5;
    std::uint64_t seed = 20240601;
    SampleRegion region;
};

/// Seeded moduli points admissible for the closed-form system.
inline std::vector<Superpotential> hurwitz_samples(SuperFamily f, int N, const Prepotential& P,
                                                   const HurwitzRunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), im(cfg.region.tau_im_min, cfg.region.tau_im_max),
        re(-cfg.region.tau_re_max, cfg.region.tau_re_max);
    const double sep = separation(P, cfg.region);
    std::vector<Superpotential> out;
    while (out.size() < cfg.samples) {
        const Complex tau(re(rng), im(rng));
        const Complex u(unit(rng), unit(rng));
        CVector c(static_cast<std::size_t>(N));
        for (auto& x : c)
            x = Complex(unit(rng), unit(rng)) * (cfg.region.z_norm_max / std::sqrt(2.0 * N));
        ModuliPoint pt{u, c, ModularParameter(tau)};
        if (!admissible(P, pt, sep))
            continue;
        try {
            out.push_back(make_superpotential(f, N, u, c, tau, sep));
        } catch (const DomainError&) {
        }
    }
    return out;
}

inline Report check_hurwitz(SuperFamily f, int N, const HurwitzRunConfig& cfg) {
    Report r;
    r.check = "hurwitz";
    r.target = super_name(f, N);
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    const Prepotential P = make_prepotential(closed_form_system(f, N), false);
    r.details["closed_form"] = P.system.name;
    const auto samples = hurwitz_samples(f, N, P, cfg);
    auto rows = detail::parallel_map<std::pair<ClosedFormComparison, ResidueData>>(
        samples.size(), [&](std::size_t i) {
            ResidueData R;
            auto c = compare_closed_form(samples[i], P, cfg.eval, &R);
            return std::make_pair(c, std::move(R));
        });
    double unity = 0, metric = 0, structure = 0, du = 0, spread = 0, gap = INFINITY;
    auto counts = nlohmann::json::array();
    for (const auto& [c, R] : rows) {
        unity = std::max(unity, c.unity);
        metric = std::max(metric, c.metric);
        structure = std::max(structure, c.structure);
        du = std::max(du, c.du_analytic);
        gap = std::min(gap, c.value_gap);
        counts.push_back(c.count);
        for (std::size_t k = 0; k < R.g.size(); ++k)
            spread = std::max(spread, std::abs(R.g[k] - rows.front().second.g[k]));
    }
    for (double x : {unity, metric, structure, du, spread})
        r.absorb(x, cfg.tol);
    if (!(gap > 1e-8))
        r.status = Status::fail;
    r.details["critical_points"] = counts;
    r.details["expected_count"] = f == SuperFamily::A ? N + 2 : 2 * N + 1;
    r.details["unity"] = format_sci(unity);
    r.details["metric_vs_closed_form"] = format_sci(metric);
    r.details["cstar_vs_closed_form"] = format_sci(structure);
    r.details["metric_spread"] = format_sci(spread);
    r.details["du_analytic"] = format_sci(du);
    r.details["critical_value_gap"] = format_sci(gap);
    auto pts = nlohmann::json::array();
    for (const auto& cp : rows.front().second.points)
        pts.push_back(complex_json(cp.v));
    r.details["first_sample_points"] = pts;
    return r;
}

// ---------------------------------------------------------------------------
// Jacobian of the basic invariants: exp(2 pi i h u) prod_{alpha > 0} theta1(z_alpha)/theta1'(0)

struct JacobianSystem {
    RootSystem rs;
    std::vector<std::vector<double>> positive;
    std::vector<std::vector<double>> coroots;  // simple coroots
    std::vector<std::vector<double>> simple;
    int hvee = 0;
};

inline JacobianSystem jacobian_system(Family family, int rank) {
    JacobianSystem J;
    J.rs = build(family, rank);
    Rational longest = 0;
    for (const auto& r : J.rs.roots)
        longest = std::max(longest, J.rs.form(r, r));
    if (longest != 2)
        throw std::invalid_argument("jacobian: needs a reduced system with long roots of norm 2");
    for (std::size_t i = 0; i < J.rs.ambient_dim(); ++i)
        for (std::size_t j = 0; j < J.rs.ambient_dim(); ++j)
            if ((i == j) != (J.rs.form.gram()(i, j) == 1))
                throw std::invalid_argument("jacobian: expects the euclidean realisation");
    auto dbl = [](const RationalVector& v) {
        std::vector<double> x;
        for (std::size_t i = 0; i < v.size(); ++i)
            x.push_back(to_double(v[i]));
        return x;
    };
    for (const auto& r : J.rs.positive_roots())
        J.positive.push_back(dbl(r));
    const auto simple = J.rs.simple_roots();
    for (const auto& a : simple) {
        J.simple.push_back(dbl(a));
        const Rational s = Rational(2) / J.rs.form(a, a);
        std::vector<double> c = dbl(a);
        for (auto& x : c)
            x *= to_double(s);
        J.coroots.push_back(c);
    }
    Rational h = 0;
    for (const auto& p : J.rs.positive_roots())
        h += J.rs.form(p, simple[0]) * J.rs.form(p, simple[0]);
    h /= J.rs.form(simple[0], simple[0]);
    if (h.get_den() != 1)
        throw std::logic_error("jacobian: non-integral dual Coxeter number");
    J.hvee = static_cast<int>(h.get_num().get_si());
    return J;
}

inline Complex jacobian(const JacobianSystem& J, Complex u, const CVector& z, const ModularParameter& tau,
                        const SeriesParams& sp = {}, double guard = 1e-3) {
    if (z.size() != J.rs.ambient_dim())
        throw std::invalid_argument("jacobian: dimension mismatch");
    const Complex d0 = theta1(0.0, tau, sp).dz;
    Complex r = std::exp(two_pi_i * double(J.hvee) * u);
    for (const auto& a : J.positive) {
        Complex za = 0;
        for (std::size_t i = 0; i < z.size(); ++i)
            za += a[i] * z[i];
        if (detail::lattice_distance(za, tau.tau()) < guard)
            throw DomainError("jacobian: root pairing on the lattice");
        r *= theta1(za, tau, sp).value / d0;
    }
    return r;
}

struct JacobianLaws {
    double du = 0, shift = 0, quasi = 0, quasi_printed = 0, tshift = 0, modular = 0, reflection = 0;
};

inline JacobianLaws jacobian_residuals(const JacobianSystem& J, Complex u, const CVector& z,
                                       const ModularParameter& tau, const SeriesParams& sp = {}) {
    auto rel = [](Complex a, Complex b) { return std::abs(a - b) / std::abs(b); };
    auto dot = [](const std::vector<double>& a, const CVector& x) {
        Complex s = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += a[i] * x[i];
        return s;
    };
    const Complex t = tau.tau();
    const double h = J.hvee;
    const Complex j0 = jacobian(J, u, z, tau, sp);
    JacobianLaws L;
    auto D = [&](double e) {
        return std::log(jacobian(J, u + e, z, tau, sp) / jacobian(J, u - e, z, tau, sp)) / (2.0 * e * two_pi_i);
    };
    L.du = std::abs((4.0 * D(5e-6) - D(1e-5)) / 3.0 - h) / h;
    for (const auto& q : J.coroots) {
        CVector a = z, b = z;
        Complex qq = 0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            a[i] += q[i];
            b[i] += q[i] * t;
            qq += q[i] * q[i];
        }
        const Complex qz = dot(q, z);
        L.shift = std::max(L.shift, rel(jacobian(J, u, a, tau, sp), j0));
        const Complex jb = jacobian(J, u, b, tau, sp);
        L.quasi = std::max(L.quasi, rel(jb, std::exp(-two_pi_i * h * qz - Complex(0, pi) * h * qq * t) * j0));
        L.quasi_printed = std::max(L.quasi_printed, rel(jb, std::exp(-two_pi_i * h * qz) * j0));
    }
    L.tshift = rel(jacobian(J, u, z, ModularParameter(t + 1.0), sp), j0);
    CVector zt = z;
    Complex zz = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        zt[i] /= t;
        zz += z[i] * z[i];
    }
    const double np = double(J.positive.size());
    L.modular = rel(jacobian(J, u, zt, ModularParameter(-1.0 / t), sp),
                    std::pow(t, -np) * std::exp(Complex(0, pi) * h * zz / t) * j0);
    for (const auto& a : J.simple) {
        CVector w = z;
        double aa = 0;
        for (double x : a)
            aa += x * x;
        const Complex c = dot(a, z) * (2.0 / aa);
        for (std::size_t i = 0; i < z.size(); ++i)
            w[i] -= c * a[i];
        L.reflection = std::max(L.reflection, rel(jacobian(J, u, w, tau, sp), -j0));
    }
    return L;
}

struct JacobianRunConfig {
    SeriesParams series;
    double tol = 1e-9;
    std::size_t samples = 20;
    std::uint64_t seed = 20240601;
    SampleRegion region;
};

inline Report check_jacobian(Family family, int rank, const JacobianRunConfig& cfg) {
    const JacobianSystem J = jacobian_system(family, rank);
    Report r;
    r.check = "jacobian";
    r.target = family_name(family);
    if (!std::isdigit(static_cast<unsigned char>(r.target.back())))
        r.target += std::to_string(rank);
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), im(cfg.region.tau_im_min, cfg.region.tau_im_max),
        re(-cfg.region.tau_re_max, cfg.region.tau_re_max);
    const std::size_t n = J.rs.ambient_dim();
    const double sep = std::min(cfg.region.min_separation,
                                0.3 * cfg.region.z_norm_max / std::sqrt(double(J.positive.size())));
    JacobianLaws worst;
    std::size_t taken = 0;
    while (taken < cfg.samples) {
        const Complex tau(re(rng), im(rng));
        const Complex u(unit(rng), unit(rng));
        // z in the span of the roots, |z| up to z_norm_max
        CVector z(n, 0.0);
        for (const auto& a : J.simple) {
            const Complex x(unit(rng), unit(rng));
            for (std::size_t i = 0; i < n; ++i)
                z[i] += x * a[i];
        }
        double norm = 0;
        for (auto x : z)
            norm += std::norm(x);
        const double scale = cfg.region.z_norm_max * (0.2 + 0.8 * (unit(rng) + 1.0) / 2.0) / std::sqrt(norm);
        for (auto& x : z)
            x *= scale;
        bool ok = true;
        for (const auto& a : J.positive) {
            Complex za = 0;
            for (std::size_t i = 0; i < n; ++i)
                za += a[i] * z[i];
            ok = ok && detail::lattice_distance(za, tau) >= sep && detail::lattice_distance(za / tau, -1.0 / tau) >= sep;
        }
        if (!ok)
            continue;
        ++taken;
        auto L = jacobian_residuals(J, u, z, ModularParameter(tau), cfg.series);
        worst.du = std::max(worst.du, L.du);
        worst.shift = std::max(worst.shift, L.shift);
        worst.quasi = std::max(worst.quasi, L.quasi);
        worst.quasi_printed = std::max(worst.quasi_printed, L.quasi_printed);
        worst.tshift = std::max(worst.tshift, L.tshift);
        worst.modular = std::max(worst.modular, L.modular);
        worst.reflection = std::max(worst.reflection, L.reflection);
    }
    for (double x : {worst.du, worst.shift, worst.quasi, worst.tshift, worst.modular, worst.reflection})
        r.absorb(x, cfg.tol);
    r.details["hvee"] = J.hvee;
    r.details["shift_lattice"] = "coroot";
    r.details["u_eigenvalue"] = format_sci(worst.du);
    r.details["lattice_shift"] = format_sci(worst.shift);
    r.details["quasi_periodicity"] = format_sci(worst.quasi);
    r.details["quasi_periodicity_without_tau_term"] = format_sci(worst.quasi_printed);
    r.details["tau_shift"] = format_sci(worst.tshift);
    r.details["modular"] = format_sci(worst.modular);
    r.details["reflection_sign"] = format_sci(worst.reflection);
    return r;
}

}  // namespace ellvee
