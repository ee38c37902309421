#pragma once

#include "ellvee/report.hpp"
#include "ellvee/special_functions.hpp"
#include "ellvee/vee_systems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellvee {

using CVector = std::vector<Complex>;

/// (u, z, tau); z in the coordinates of the system's form.
struct ModuliPoint {
    Complex u;
    CVector z;
    ModularParameter tau;
};

struct EvalConfig {
    SeriesParams series;
    double pole_guard = 1e-3;
};

/// F = u^2 tau/2 - u (z,z)/2 + sum h f(z_alpha, tau) [+ mu Li3(1,q)/(2 pi i)^3].
struct Prepotential {
    VSystem system;
    bool corrected = false;
    Rational mu = 0;
    Rational hvee = 0;

    // double views, filled by make_prepotential
    std::size_t n = 0;
    std::vector<std::vector<double>> covectors;
    std::vector<double> weights;
    std::vector<std::vector<double>> gram, gram_inv;

    [[nodiscard]] std::string label() const {
        return system.name + (corrected ? "" : " uncorrected");
    }
};

inline Prepotential make_prepotential(const VSystem& V, bool corrected) {
    V.validate();
    Prepotential P;
    P.system = V;
    P.corrected = corrected;
    auto sm = second_moment(V);
    if (!sm.ok)
        throw std::invalid_argument("prepotential: system is not well distributed");
    P.hvee = sm.hvee;
    P.mu = corrected ? Rational(Rational(10, 3) * sm.hvee * sm.hvee) : Rational(0);
    P.n = V.dim();
    for (std::size_t k = 0; k < V.vectors.size(); ++k) {
        auto a = V.covector(k);
        std::vector<double> row(P.n);
        for (std::size_t i = 0; i < P.n; ++i)
            row[i] = to_double(a[i]);
        P.covectors.push_back(row);
        P.weights.push_back(to_double(V.vectors[k].h));
    }
    const auto& G = V.form.gram();
    auto Gi = inverse(G);
    P.gram.assign(P.n, std::vector<double>(P.n));
    P.gram_inv = P.gram;
    for (std::size_t i = 0; i < P.n; ++i)
        for (std::size_t j = 0; j < P.n; ++j) {
            P.gram[i][j] = to_double(G(i, j));
            P.gram_inv[i][j] = to_double(Gi(i, j));
        }
    return P;
}

/// Symmetric rank-3 array with its flat metric.
class StructureTensor {
  public:
    explicit StructureTensor(std::size_t dim)
        : dim_(dim), c_(dim * dim * dim), eta_(dim * dim), eta_inv_(dim * dim) {}

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] Complex operator()(std::size_t a, std::size_t b, std::size_t c) const {
        return c_[(a * dim_ + b) * dim_ + c];
    }
    /// Sets all permutations.
    void set(std::size_t a, std::size_t b, std::size_t c, Complex v) {
        for (auto [x, y, w] : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                               std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}})
            c_[(x * dim_ + y) * dim_ + w] = v;
    }
    [[nodiscard]] double eta(std::size_t a, std::size_t b) const { return eta_[a * dim_ + b]; }
    [[nodiscard]] double eta_inv(std::size_t a, std::size_t b) const { return eta_inv_[a * dim_ + b]; }
    void set_eta(std::size_t a, std::size_t b, double v) { eta_[a * dim_ + b] = eta_[b * dim_ + a] = v; }
    void set_eta_inv(std::size_t a, std::size_t b, double v) {
        eta_inv_[a * dim_ + b] = eta_inv_[b * dim_ + a] = v;
    }

  private:
    std::size_t dim_;
    std::vector<Complex> c_;
    std::vector<double> eta_, eta_inv_;
};

namespace detail {

inline Complex pairing(const std::vector<double>& a, const CVector& z) {
    Complex s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * z[i];
    return s;
}

inline Complex form_value(const std::vector<std::vector<double>>& G, const CVector& x, const CVector& y) {
    Complex s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            s += x[i] * G[i][j] * y[j];
    return s;
}

inline double lattice_distance(Complex z, Complex tau) {
    const double k = std::round(z.imag() / tau.imag());
    Complex w = z - k * tau;
    w -= std::round(w.real());
    double best = std::abs(w);
    for (int m = -1; m <= 1; ++m)
        for (int n = -1; n <= 1; ++n)
            best = std::min(best, std::abs(w - double(m) - double(n) * tau));
    return best;
}

inline void check_dims(const Prepotential& P, const ModuliPoint& pt) {
    if (pt.z.size() != P.n)
        throw std::invalid_argument("moduli point dimension does not match the system");
}

// Indices 0 = u, 1..N = z, N+1 = tau; metric du dtau + dtau du - (dz, dz).
inline void set_flat_part(StructureTensor& c, const Prepotential& P) {
    const std::size_t N = P.n, t = N + 1;
    c.set(0, 0, t, 1.0);
    c.set_eta(0, t, 1.0);
    c.set_eta_inv(0, t, 1.0);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            c.set(0, 1 + i, 1 + j, -P.gram[i][j]);
            c.set_eta(1 + i, 1 + j, -P.gram[i][j]);
            c.set_eta_inv(1 + i, 1 + j, -P.gram_inv[i][j]);
        }
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
    std::vector<std::future<T>> jobs;
    jobs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        jobs.push_back(std::async(std::launch::async, fn, i));
    std::vector<T> out;
    out.reserve(n);
    for (auto& j : jobs)
        out.push_back(j.get());
    return out;
}

}  // namespace detail

/// Moduli-point invariants: strip and pole guard for every pairing.
inline bool admissible(const Prepotential& P, const ModuliPoint& pt, double guard = 1e-3) {
    detail::check_dims(P, pt);
    const Complex tau = pt.tau.tau();
    for (const auto& a : P.covectors) {
        Complex za = detail::pairing(a, pt.z);
        if (!(std::abs(za.imag()) < tau.imag()) || detail::lattice_distance(za, tau) < guard)
            return false;
    }
    return true;
}

/// Third derivatives of the prepotential. Pairings outside the strip are
/// reduced by quasi-periodicity.
inline StructureTensor c_tensor(const Prepotential& P, const ModuliPoint& pt, const EvalConfig& cfg = {}) {
    detail::check_dims(P, pt);
    const std::size_t N = P.n, t = N + 1;
    StructureTensor c(N + 2);
    detail::set_flat_part(c, P);

    std::vector<Complex> T3(N * N * N), T2(N * N), T1(N);
    Complex T0 = 0;
    for (std::size_t k = 0; k < P.covectors.size(); ++k) {
        const auto& a = P.covectors[k];
        const double h = P.weights[k];
        const Complex za = detail::pairing(a, pt.z);
        if (detail::lattice_distance(za, pt.tau.tau()) < cfg.pole_guard)
            throw DomainError("c_tensor: pairing within the pole guard of the lattice");
        const FThird f = f_third_anywhere(za, pt.tau, cfg.series);
        for (std::size_t i = 0; i < N; ++i) {
            if (a[i] == 0.0)
                continue;
            T1[i] += h * a[i] * f.d12;
            for (std::size_t j = 0; j < N; ++j) {
                T2[i * N + j] += h * a[i] * a[j] * f.d21;
                for (std::size_t l = 0; l < N; ++l)
                    T3[(i * N + j) * N + l] += h * a[i] * a[j] * a[l] * f.d30;
            }
        }
        T0 += h * f.d03;
    }
    if (P.corrected)
        T0 += to_double(P.mu) * li3_one_tau3(pt.tau, cfg.series);

    for (std::size_t i = 0; i < N; ++i) {
        c.set(t, t, 1 + i, T1[i]);
        for (std::size_t j = i; j < N; ++j) {
            c.set(t, 1 + i, 1 + j, T2[i * N + j]);
            for (std::size_t l = j; l < N; ++l)
                c.set(1 + i, 1 + j, 1 + l, T3[(i * N + j) * N + l]);
        }
    }
    c.set(t, t, t, T0);
    return c;
}

/// Coordinate associators; all indices run over 1..N, stored 0-based.
struct Associators {
    std::size_t n = 0;
    std::vector<Complex> d1, d2, d3;

    [[nodiscard]] Complex D1(std::size_t i, std::size_t j) const { return d1[i * n + j]; }
    [[nodiscard]] Complex D2(std::size_t i, std::size_t j, std::size_t k) const {
        return d2[(i * n + j) * n + k];
    }
    [[nodiscard]] Complex D3(std::size_t i, std::size_t j, std::size_t r, std::size_t s) const {
        return d3[((i * n + j) * n + r) * n + s];
    }
    [[nodiscard]] double max_abs() const {
        double m = 0;
        for (const auto* v : {&d1, &d2, &d3})
            for (const auto& x : *v)
                m = std::max(m, std::abs(x));
        return m;
    }
};

inline Associators associators(const StructureTensor& c) {
    const std::size_t N = c.dim() - 2, t = N + 1;
    Associators A;
    A.n = N;
    A.d1.resize(N * N);
    A.d2.resize(N * N * N);
    A.d3.resize(N * N * N * N);
    auto g = [&](std::size_t i, std::size_t j) { return c.eta(1 + i, 1 + j); };
    auto gi = [&](std::size_t p, std::size_t q) { return c.eta_inv(1 + p, 1 + q); };
    auto C = [&](std::size_t a, std::size_t b, std::size_t d) { return c(a, b, d); };
    auto contract = [&](auto x, auto y) {
        Complex s = 0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = 0; q < N; ++q)
                s += gi(p, q) * x(p) * y(q);
        return s;
    };
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            A.d1[i * N + j] =
                g(i, j) * C(t, t, t) +
                contract([&](std::size_t p) { return C(t, t, 1 + p); },
                         [&](std::size_t q) { return C(1 + i, 1 + j, 1 + q); }) -
                contract([&](std::size_t p) { return C(t, 1 + i, 1 + p); },
                         [&](std::size_t q) { return C(t, 1 + j, 1 + q); });
            for (std::size_t k = 0; k < N; ++k) {
                A.d2[(i * N + j) * N + k] =
                    g(j, k) * C(t, t, 1 + i) - g(i, j) * C(t, t, 1 + k) +
                    contract([&](std::size_t p) { return C(t, 1 + i, 1 + p); },
                             [&](std::size_t q) { return C(1 + j, 1 + k, 1 + q); }) -
                    contract([&](std::size_t p) { return C(t, 1 + k, 1 + p); },
                             [&](std::size_t q) { return C(1 + i, 1 + j, 1 + q); });
            }
            for (std::size_t r = 0; r < N; ++r)
                for (std::size_t s = 0; s < N; ++s)
                    A.d3[((i * N + j) * N + r) * N + s] =
                        g(i, j) * C(t, 1 + r, 1 + s) + g(r, s) * C(t, 1 + i, 1 + j) -
                        g(i, s) * C(t, 1 + r, 1 + j) - g(r, j) * C(t, 1 + i, 1 + s) +
                        contract([&](std::size_t p) { return C(1 + i, 1 + j, 1 + p); },
                                 [&](std::size_t q) { return C(1 + r, 1 + s, 1 + q); }) -
                        contract([&](std::size_t p) { return C(1 + i, 1 + s, 1 + p); },
                                 [&](std::size_t q) { return C(1 + r, 1 + j, 1 + q); });
        }
    return A;
}

inline Associators associators(const Prepotential& P, const ModuliPoint& pt, const EvalConfig& cfg = {}) {
    return associators(c_tensor(P, pt, cfg));
}

/// Same quantities from the expanded sums over pairs of vectors, evaluated on
/// coordinate vectors; independent of c_tensor.
inline Associators expanded_associators(const Prepotential& P, const ModuliPoint& pt,
                                        const EvalConfig& cfg = {}) {
    detail::check_dims(P, pt);
    const std::size_t N = P.n, M = P.covectors.size();
    std::vector<FThird> f(M);
    for (std::size_t k = 0; k < M; ++k) {
        const Complex za = detail::pairing(P.covectors[k], pt.z);
        if (detail::lattice_distance(za, pt.tau.tau()) < cfg.pole_guard)
            throw DomainError("expanded_associators: pairing within the pole guard of the lattice");
        f[k] = f_third_anywhere(za, pt.tau, cfg.series);
    }
    // (alpha, beta) = a^T G^{-1} b on covectors
    std::vector<double> ab(M * M);
    for (std::size_t x = 0; x < M; ++x)
        for (std::size_t y = 0; y < M; ++y) {
            double s = 0;
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j)
                    s += P.covectors[x][i] * P.gram_inv[i][j] * P.covectors[y][j];
            ab[x * M + y] = s;
        }
    const auto& G = P.gram;
    const auto& a = P.covectors;
    const auto& h = P.weights;
    auto wedge = [&](std::size_t x, std::size_t y, std::size_t i, std::size_t j) {
        return a[x][i] * a[y][j] - a[x][j] * a[y][i];
    };
    Complex S03 = 0;
    for (std::size_t x = 0; x < M; ++x)
        S03 += h[x] * f[x].d03;
    if (P.corrected)
        S03 += to_double(P.mu) * li3_one_tau3(pt.tau, cfg.series);

    Associators A;
    A.n = N;
    A.d1.assign(N * N, 0.0);
    A.d2.assign(N * N * N, 0.0);
    A.d3.assign(N * N * N * N, 0.0);
    for (std::size_t u = 0; u < N; ++u)
        for (std::size_t v = 0; v < N; ++v) {
            Complex s = -G[u][v] * S03;
            for (std::size_t x = 0; x < M; ++x)
                for (std::size_t y = 0; y < M; ++y)
                    s += h[x] * h[y] * ab[x * M + y] * a[x][v] *
                         (a[y][u] * f[y].d21 * f[x].d21 - a[x][u] * f[y].d12 * f[x].d30);
            A.d1[u * N + v] = s;
        }
    for (std::size_t u = 0; u < N; ++u)
        for (std::size_t v = 0; v < N; ++v)
            for (std::size_t w = 0; w < N; ++w) {
                Complex s = 0;
                for (std::size_t x = 0; x < M; ++x)
                    s += h[x] * (G[u][v] * a[x][w] - G[w][v] * a[x][u]) * f[x].d12;
                for (std::size_t x = 0; x < M; ++x)
                    for (std::size_t y = 0; y < M; ++y)
                        s += h[x] * h[y] * ab[x * M + y] * a[x][v] * wedge(x, y, u, w) * f[y].d21 *
                             f[x].d30;
                A.d2[(u * N + v) * N + w] = s;
            }
    for (std::size_t u = 0; u < N; ++u)
        for (std::size_t v = 0; v < N; ++v)
            for (std::size_t w = 0; w < N; ++w)
                for (std::size_t xx = 0; xx < N; ++xx) {
                    Complex s = 0;
                    for (std::size_t x = 0; x < M; ++x)
                        s += h[x] *
                             (a[x][v] * a[x][w] * G[u][xx] - a[x][xx] * a[x][w] * G[u][v] +
                              a[x][u] * a[x][xx] * G[v][w] - a[x][u] * a[x][v] * G[w][xx]) *
                             f[x].d21;
                    for (std::size_t x = 0; x < M; ++x)
                        for (std::size_t y = 0; y < M; ++y)
                            if (x != y && ab[x * M + y] != 0.0)
                                s -= 0.5 * h[x] * h[y] * ab[x * M + y] * wedge(x, y, u, w) *
                                 wedge(x, y, v, xx) * f[x].d30 * f[y].d30;
                    A.d3[((u * N + v) * N + w) * N + xx] = s;
                }
    return A;
}

/// max |c_{ab}^l c_{lcd} - c_{db}^l c_{lca}| over all index values.
inline double full_associator(const StructureTensor& c) {
    const std::size_t D = c.dim();
    // raise the last index once
    std::vector<Complex> up(D * D * D);
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b)
            for (std::size_t m = 0; m < D; ++m) {
                Complex s = 0;
                for (std::size_t l = 0; l < D; ++l)
                    if (c.eta_inv(l, m) != 0.0)
                        s += c(a, b, l) * c.eta_inv(l, m);
                up[(a * D + b) * D + m] = s;
            }
    auto prod = [&](std::size_t a, std::size_t b, std::size_t cc, std::size_t d) {
        Complex s = 0;
        for (std::size_t m = 0; m < D; ++m)
            s += up[(a * D + b) * D + m] * c(m, cc, d);
        return s;
    };
    double worst = 0;
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b)
            for (std::size_t cc = 0; cc < D; ++cc)
                for (std::size_t d = a + 1; d < D; ++d)
                    worst = std::max(worst, std::abs(prod(a, b, cc, d) - prod(d, b, cc, a)));
    return worst;
}

/// Size of the individual products c_ab^l c_lcd, for relative associators.
inline double associator_scale(const StructureTensor& c) {
    const std::size_t D = c.dim();
    double mc = 0, me = 0;
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) {
            me = std::max(me, std::abs(c.eta_inv(a, b)));
            for (std::size_t d = 0; d < D; ++d)
                mc = std::max(mc, std::abs(c(a, b, d)));
        }
    return std::max(1.0, mc * mc * me);
}

/// Largest deviation from full symmetry and from c_{0ab} = eta_{ab}.
inline double unity_symmetry_defect(const StructureTensor& c) {
    const std::size_t D = c.dim();
    double worst = 0;
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) {
            worst = std::max(worst, std::abs(c(0, a, b) - c.eta(a, b)));
            for (std::size_t d = 0; d < D; ++d)
                worst = std::max({worst, std::abs(c(a, b, d) - c(b, a, d)),
                                  std::abs(c(a, b, d) - c(a, d, b))});
        }
    return worst;
}

// ---------------------------------------------------------------------------
// sampling

struct SampleRegion {
    double tau_im_min = 0.8;
    double tau_im_max = 2.5;
    double tau_re_max = 0.5;
    double z_norm_max = 0.4;
    double min_separation = 0.05;
};

/// Seeded points with every pairing in the strip and away from the lattice.
/// The separation shrinks like 1/sqrt(#pairings) so large systems stay sampleable.
/// `accept` may impose further conditions.
inline double separation(const Prepotential& P, const SampleRegion& R) {
    const double pairs = std::max<double>(1.0, double(P.covectors.size()) / 2.0);
    return std::min(R.min_separation, 0.3 * R.z_norm_max / std::sqrt(pairs));
}

inline std::vector<ModuliPoint> sample_points(const Prepotential& P, std::size_t count, std::uint64_t seed,
                                              const SampleRegion& R = {},
                                              const std::function<bool(const ModuliPoint&)>& accept = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t N = P.n;
    // Cholesky factor of G, so z = L^{-T} y has (z, z) = |y|^2
    std::vector<std::vector<double>> L(N, std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = P.gram[i][j];
            for (std::size_t k = 0; k < j; ++k)
                s -= L[i][k] * L[j][k];
            if (i == j) {
                if (!(s > 0))
                    throw std::invalid_argument("sampling needs a positive definite form");
                L[i][i] = std::sqrt(s);
            } else {
                L[i][j] = s / L[j][j];
            }
        }
    const double sep = separation(P, R);
    std::vector<ModuliPoint> out;
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 10000 * (count + 1))
            throw std::runtime_error("sample_points: could not find admissible points");
        Complex tau{R.tau_re_max * (2 * unit(rng) - 1),
                    R.tau_im_min + (R.tau_im_max - R.tau_im_min) * unit(rng)};
        std::vector<double> y(2 * N);
        double norm = 0;
        for (auto& v : y) {
            v = normal(rng);
            norm += v * v;
        }
        const double radius = R.z_norm_max * std::pow(unit(rng), 1.0 / double(2 * N)) / std::sqrt(norm);
        CVector w(N);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = radius * Complex(y[i], y[N + i]);
        CVector z(N);
        for (std::size_t ii = N; ii-- > 0;) {  // solve L^T z = w
            Complex s = w[ii];
            for (std::size_t k = ii + 1; k < N; ++k)
                s -= L[k][ii] * z[k];
            z[ii] = s / L[ii][ii];
        }
        Complex u{2 * unit(rng) - 1, 2 * unit(rng) - 1};
        ModuliPoint pt{u, z, ModularParameter(tau)};
        if (!admissible(P, pt, sep))
            continue;
        if (accept && !accept(pt))
            continue;
        out.push_back(pt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// transformation laws

/// (u - (z,z)/2tau, z/tau, -1/tau)
inline ModuliPoint modular_image(const Prepotential& P, const ModuliPoint& pt) {
    const Complex tau = pt.tau.tau();
    CVector z(pt.z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = pt.z[i] / tau;
    return {pt.u - detail::form_value(P.gram, pt.z, pt.z) / (2.0 * tau), z, ModularParameter(-1.0 / tau)};
}

struct LawResiduals {
    double c_laws = 0;
    double delta_laws = 0;
    double invariance = 0;  // z + p for periodicity, tau + 1 for modularity
};

namespace detail {

inline double rel(Complex lhs, Complex rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(rhs)); }

// t_a, lowered with eta; t^a = (u, z, tau)
inline CVector lower(const StructureTensor& c, const CVector& t) {
    CVector out(t.size());
    for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = 0; b < t.size(); ++b)
            out[a] += c.eta(a, b) * t[b];
    return out;
}

inline double max_entry_diff(const StructureTensor& x, const StructureTensor& y) {
    double m = 0;
    const std::size_t D = x.dim();
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b)
            for (std::size_t d = 0; d < D; ++d)
                m = std::max(m, rel(x(a, b, d), y(a, b, d)));
    return m;
}

}  // namespace detail

/// Residuals of the S-transformation laws of c and of the associators, plus
/// invariance under tau -> tau + 1.
inline LawResiduals modularity_residuals(const Prepotential& P, const ModuliPoint& pt, const EvalConfig& cfg = {}) {
    const ModuliPoint im = modular_image(P, pt);
    if (!admissible(P, im, cfg.pole_guard))
        throw DomainError("modularity: image point leaves the convergence strip");
    const std::size_t N = P.n, T = N + 1, D = N + 2;
    const Complex tau = pt.tau.tau();
    const StructureTensor c = c_tensor(P, pt, cfg), ch = c_tensor(P, im, cfg);
    CVector t(D);
    t[0] = pt.u;
    for (std::size_t i = 0; i < N; ++i)
        t[1 + i] = pt.z[i];
    t[T] = tau;
    const CVector tl = detail::lower(c, t);
    Complex tt = 0;
    for (std::size_t a = 0; a < D; ++a)
        tt += tl[a] * t[a];
    auto g = [&](std::size_t i, std::size_t j) { return c.eta(1 + i, 1 + j); };
    auto zl = [&](std::size_t i) { return tl[1 + i]; };

    LawResiduals r;
    for (std::size_t i = 0; i < N; ++i) {
        Complex s2 = 0;
        for (std::size_t a = 0; a < D; ++a)
            for (std::size_t b = 0; b < D; ++b)
                s2 += c(1 + i, a, b) * t[a] * t[b];
        r.c_laws = std::max(r.c_laws, detail::rel(ch(T, T, 1 + i), tau * s2 - zl(i) * tt));
        for (std::size_t j = 0; j < N; ++j) {
            Complex s1 = 0;
            for (std::size_t a = 0; a < D; ++a)
                s1 += c(1 + i, 1 + j, a) * t[a];
            r.c_laws = std::max(r.c_laws, detail::rel(ch(T, 1 + i, 1 + j),
                                                      tau * s1 - 0.5 * g(i, j) * tt - zl(i) * zl(j)));
            for (std::size_t k = 0; k < N; ++k)
                r.c_laws = std::max(r.c_laws,
                                    detail::rel(ch(1 + i, 1 + j, 1 + k),
                                                tau * c(1 + i, 1 + j, 1 + k) - g(i, j) * zl(k) -
                                                    g(j, k) * zl(i) - g(k, i) * zl(j)));
        }
    }
    Complex s3 = 0;
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b)
            for (std::size_t d = 0; d < D; ++d)
                s3 += c(a, b, d) * t[a] * t[b] * t[d];
    r.c_laws = std::max(r.c_laws, detail::rel(ch(T, T, T), tau * s3 - 0.75 * tt * tt));

    const Associators A = associators(c), Ah = associators(ch);
    const CVector& z = pt.z;
    const Complex t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            Complex rhs1 = t4 * A.D1(i, j);
            for (std::size_t a = 0; a < N; ++a) {
                rhs1 -= t3 * z[a] * (A.D2(i, j, a) + A.D2(j, i, a));
                for (std::size_t b = 0; b < N; ++b)
                    rhs1 += t2 * z[a] * z[b] * A.D3(a, b, i, j);
            }
            r.delta_laws = std::max(r.delta_laws, detail::rel(Ah.D1(i, j), rhs1));
            for (std::size_t k = 0; k < N; ++k) {
                Complex rhs2 = t3 * A.D2(i, j, k);
                for (std::size_t a = 0; a < N; ++a)
                    rhs2 += t2 * z[a] * A.D3(i, a, k, j);
                r.delta_laws = std::max(r.delta_laws, detail::rel(Ah.D2(i, j, k), rhs2));
                for (std::size_t s = 0; s < N; ++s)
                    r.delta_laws = std::max(r.delta_laws,
                                            detail::rel(Ah.D3(i, j, k, s), t2 * A.D3(i, j, k, s)));
            }
        }

    ModuliPoint shifted{pt.u, pt.z, ModularParameter(tau + 1.0)};
    r.invariance = detail::max_entry_diff(c_tensor(P, shifted, cfg), c);
    return r;
}

/// Residuals of the tau-shift laws z -> z + p tau, plus invariance under z -> z + p.
inline LawResiduals periodicity_residuals(const Prepotential& P, const ModuliPoint& pt, const RationalVector& p,
                                          const EvalConfig& cfg = {}) {
    if (p.size() != P.n)
        throw std::invalid_argument("periodicity: lattice vector has the wrong dimension");
    if (!in_dual_lattice(P.system, p))
        throw std::invalid_argument("periodicity: (p, alpha) is not integral for every alpha");
    const std::size_t N = P.n, T = N + 1;
    const Complex tau = pt.tau.tau();
    CVector pv(N);
    for (std::size_t i = 0; i < N; ++i)
        pv[i] = to_double(p[i]);
    ModuliPoint sh = pt, sp = pt;
    for (std::size_t i = 0; i < N; ++i) {
        sh.z[i] += pv[i] * tau;
        sp.z[i] += pv[i];
    }
    const StructureTensor c = c_tensor(P, pt, cfg), cs = c_tensor(P, sh, cfg);
    auto g = [&](std::size_t i, std::size_t j) { return c.eta(1 + i, 1 + j); };
    CVector pl(N);
    Complex pp = 0;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j)
            pl[i] += g(i, j) * pv[j];
        pp += pl[i] * pv[i];
    }
    auto Z = [](std::size_t i) { return 1 + i; };

    LawResiduals r;
    Complex rhs3 = c(T, T, T) - 0.75 * pp * pp;
    for (std::size_t a = 0; a < N; ++a) {
        rhs3 -= 3.0 * pv[a] * c(T, T, Z(a));
        for (std::size_t b = 0; b < N; ++b) {
            rhs3 += 3.0 * pv[a] * pv[b] * c(T, Z(a), Z(b));
            for (std::size_t d = 0; d < N; ++d)
                rhs3 -= pv[a] * pv[b] * pv[d] * c(Z(a), Z(b), Z(d));
        }
    }
    r.c_laws = detail::rel(cs(T, T, T), rhs3);
    for (std::size_t i = 0; i < N; ++i) {
        Complex rhs2 = c(T, T, Z(i)) + pp * pl[i];
        for (std::size_t a = 0; a < N; ++a) {
            rhs2 -= 2.0 * pv[a] * c(T, Z(a), Z(i));
            for (std::size_t b = 0; b < N; ++b)
                rhs2 += pv[a] * pv[b] * c(Z(a), Z(b), Z(i));
        }
        r.c_laws = std::max(r.c_laws, detail::rel(cs(T, T, Z(i)), rhs2));
        for (std::size_t j = 0; j < N; ++j) {
            Complex rhs1 = c(T, Z(i), Z(j)) - (pl[i] * pl[j] + 0.5 * pp * g(i, j));
            for (std::size_t a = 0; a < N; ++a)
                rhs1 -= pv[a] * c(Z(i), Z(j), Z(a));
            r.c_laws = std::max(r.c_laws, detail::rel(cs(T, Z(i), Z(j)), rhs1));
            for (std::size_t k = 0; k < N; ++k)
                r.c_laws = std::max(r.c_laws, detail::rel(cs(Z(i), Z(j), Z(k)),
                                                          c(Z(i), Z(j), Z(k)) + pl[i] * g(j, k) +
                                                              pl[j] * g(k, i) + pl[k] * g(i, j)));
        }
    }

    const Associators A = associators(c), As = associators(cs);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            Complex rhs1 = A.D1(i, j);
            for (std::size_t a = 0; a < N; ++a) {
                rhs1 += pv[a] * (A.D2(i, j, a) + A.D2(j, i, a));
                for (std::size_t b = 0; b < N; ++b)
                    rhs1 += pv[a] * pv[b] * A.D3(i, j, a, b);
            }
            r.delta_laws = std::max(r.delta_laws, detail::rel(As.D1(i, j), rhs1));
            for (std::size_t k = 0; k < N; ++k) {
                Complex rhs2 = A.D2(i, j, k);
                for (std::size_t a = 0; a < N; ++a)
                    rhs2 += pv[a] * A.D3(i, j, k, a);
                r.delta_laws = std::max(r.delta_laws, detail::rel(As.D2(i, j, k), rhs2));
                for (std::size_t s = 0; s < N; ++s)
                    r.delta_laws = std::max(r.delta_laws, detail::rel(As.D3(i, j, k, s), A.D3(i, j, k, s)));
            }
        }
    r.invariance = detail::max_entry_diff(c_tensor(P, sp, cfg), c);
    return r;
}

// ---------------------------------------------------------------------------
// limits

enum class LimitKind { rational, trig_I, trig_II };

inline std::string limit_name(LimitKind k) {
    switch (k) {
    case LimitKind::rational: return "rational";
    case LimitKind::trig_I: return "trig_I";
    case LimitKind::trig_II: return "trig_II";
    }
    return "?";
}

/// The trigonometric branch allowed by h-vee.
inline LimitKind trig_branch(const Prepotential& P) { return P.hvee == 0 ? LimitKind::trig_I : LimitKind::trig_II; }

inline void require_branch(const Prepotential& P, LimitKind k) {
    if (k == LimitKind::trig_I && P.hvee != 0)
        throw std::invalid_argument("trigonometric limit I needs h-vee = 0");
    if (k == LimitKind::trig_II && P.hvee == 0)
        throw std::invalid_argument("trigonometric limit II needs h-vee != 0");
}

/// Limit prepotential. Trig II carries u^3/6 - u (z,z)/2.
inline Complex limit_prepotential(const Prepotential& P, LimitKind k, Complex u, const CVector& z,
                                  const SeriesParams& sp = {}) {
    require_branch(P, k);
    Complex s = 0;
    for (std::size_t x = 0; x < P.covectors.size(); ++x) {
        const Complex za = detail::pairing(P.covectors[x], z);
        if (k == LimitKind::rational)
            s += P.weights[x] * za * za * std::log(za);
        else
            s += P.weights[x] * polylog(3, std::exp(two_pi_i * za), sp);
    }
    if (k == LimitKind::trig_II)
        return u * u * u / 6.0 - 0.5 * u * detail::form_value(P.gram, z, z) +
               std::sqrt(3.0 / to_double(P.hvee)) / detail::cube(two_pi_i) * s;
    return s;
}

/// Third derivatives of the limit prepotential. Rational and trig I live on z
/// alone with metric (,); trig II has index 0 = u and metric du^2 - (dz,dz).
inline StructureTensor limit_tensor(const Prepotential& P, LimitKind k, const CVector& z, double guard = 1e-3) {
    require_branch(P, k);
    if (z.size() != P.n)
        throw std::invalid_argument("limit point dimension does not match the system");
    const std::size_t N = P.n, off = k == LimitKind::trig_II ? 1 : 0;
    StructureTensor c(N + off);
    std::vector<Complex> T3(N * N * N);
    for (std::size_t x = 0; x < P.covectors.size(); ++x) {
        const auto& a = P.covectors[x];
        const Complex za = detail::pairing(a, z);
        Complex kern;
        if (k == LimitKind::rational) {
            if (std::abs(za) < guard)
                throw DomainError("limit_tensor: pairing within the pole guard");
            kern = 2.0 / za;
        } else {
            const Complex w = std::exp(two_pi_i * za);
            if (std::abs(1.0 - w) < guard)
                throw DomainError("limit_tensor: pairing within the pole guard");
            kern = w / (1.0 - w) * (k == LimitKind::trig_I ? detail::cube(two_pi_i)
                                                           : Complex(std::sqrt(3.0 / to_double(P.hvee))));
        }
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                for (std::size_t l = 0; l < N; ++l)
                    T3[(i * N + j) * N + l] += P.weights[x] * a[i] * a[j] * a[l] * kern;
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j)
            for (std::size_t l = j; l < N; ++l)
                c.set(off + i, off + j, off + l, T3[(i * N + j) * N + l]);
    const double sign = off ? -1.0 : 1.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            c.set_eta(off + i, off + j, sign * P.gram[i][j]);
            c.set_eta_inv(off + i, off + j, sign * P.gram_inv[i][j]);
        }
    if (off) {
        c.set(0, 0, 0, 1.0);
        c.set_eta(0, 0, 1.0);
        c.set_eta_inv(0, 0, 1.0);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                c.set(0, 1 + i, 1 + j, -P.gram[i][j]);
    }
    return c;
}

// ---------------------------------------------------------------------------
// A1 scalar equation

/// h30 h12 - h21^2 + 4 h03
inline Complex a1_delta(const FThird& h) { return h.d30 * h.d12 - h.d21 * h.d21 + 4.0 * h.d03; }

/// Third derivatives of h = f(2z) - 4 f(z).
inline FThird a1_h(Complex z, const ModularParameter& tau, const SeriesParams& sp = {}) {
    const FThird a = f_third_anywhere(2.0 * z, tau, sp), b = f_third_anywhere(z, tau, sp);
    return {8.0 * a.d30 - 4.0 * b.d30, 4.0 * a.d21 - 4.0 * b.d21, 2.0 * a.d12 - 4.0 * b.d12,
            a.d03 - 4.0 * b.d03};
}

/// Third derivatives of (3/4) f(z) + (15/8) Li3(1,q)/(2 pi i)^3, the elliptic
/// trilogarithm combination (3/4)[Li3(e^{2 pi i z}, q) + (3/2) Li3(1, q)]/(2 pi i)^3.
inline FThird a1_htilde_raw(Complex z, const ModularParameter& tau, const SeriesParams& sp = {}) {
    const FThird a = f_third_anywhere(z, tau, sp);
    return {0.75 * a.d30, 0.75 * a.d21, 0.75 * a.d12, 0.75 * a.d03 + 1.875 * li3_one_tau3(tau, sp)};
}

/// The same function in the variable of h, i.e. evaluated at 2z.
inline FThird a1_htilde(Complex z, const ModularParameter& tau, const SeriesParams& sp = {}) {
    const FThird a = a1_htilde_raw(2.0 * z, tau, sp);
    return {8.0 * a.d30, 4.0 * a.d21, 2.0 * a.d12, a.d03};
}

// ---------------------------------------------------------------------------
// reports

struct WdvvConfig {
    EvalConfig eval;
    double tol = 1e-9;
    std::size_t samples = 20;
    std::uint64_t seed = 20240601;
    SampleRegion region;
};

inline Report check_associators(const Prepotential& P, const WdvvConfig& cfg) {
    Report r;
    r.check = "wdvv.associators";
    r.target = P.label();
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    auto pts = sample_points(P, cfg.samples, cfg.seed, cfg.region);
    struct Row {
        double coord, expanded, cross, full, unity;
    };
    auto rows = detail::parallel_map<Row>(pts.size(), [&](std::size_t i) {
        auto c = c_tensor(P, pts[i], cfg.eval);
        auto A = associators(c);
        auto B = expanded_associators(P, pts[i], cfg.eval);
        double cross = 0;
        for (const auto& [x, y] : {std::pair{&A.d1, &B.d1}, std::pair{&A.d2, &B.d2}, std::pair{&A.d3, &B.d3}})
            for (std::size_t k = 0; k < x->size(); ++k)
                cross = std::max(cross, std::abs((*x)[k] - (*y)[k]));
        return Row{A.max_abs(), B.max_abs(), cross, full_associator(c), unity_symmetry_defect(c)};
    });
    double mc = 0, me = 0, mx = 0, mf = 0, mu = 0;
    for (const auto& row : rows) {
        r.absorb(row.coord, cfg.tol);
        r.absorb(row.expanded, cfg.tol);
        r.absorb(row.cross, cfg.tol);
        r.absorb(row.full, cfg.tol);
        r.absorb(row.unity, cfg.tol);
        mc = std::max(mc, row.coord);
        me = std::max(me, row.expanded);
        mx = std::max(mx, row.cross);
        mf = std::max(mf, row.full);
        mu = std::max(mu, row.unity);
    }
    r.details["points"] = pts.size();
    r.details["hvee"] = to_string(P.hvee);
    r.details["mu"] = to_string(P.mu);
    r.details["coordinate"] = format_sci(mc);
    r.details["expanded"] = format_sci(me);
    r.details["route_difference"] = format_sci(mx);
    r.details["full"] = format_sci(mf);
    r.details["unity_symmetry"] = format_sci(mu);
    return r;
}

/// Uncorrected prepotential: Delta1 - (hvee^2/36) E4 (u,v) must vanish.
inline Report check_e4_defect(const Prepotential& P, const WdvvConfig& cfg) {
    Report r;
    r.check = "wdvv.e4_defect";
    r.target = P.label();
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    auto pts = sample_points(P, cfg.samples, cfg.seed, cfg.region);
    const double m = to_double(P.hvee * P.hvee) / 36.0;
    auto res = detail::parallel_map<double>(pts.size(), [&](std::size_t i) {
        auto A = associators(P, pts[i], cfg.eval);
        const Complex e4 = eisenstein(4, pts[i].tau, cfg.eval.series);
        const double mu = to_double(P.mu);
        double worst = 0;
        for (std::size_t a = 0; a < P.n; ++a)
            for (std::size_t b = 0; b < P.n; ++b)
                worst = std::max(worst, std::abs(A.D1(a, b) - (m - mu / 120.0) * e4 * P.gram[a][b]));
        return worst;
    });
    for (double x : res)
        r.absorb(x, cfg.tol);
    r.details["coefficient"] = to_string(P.hvee * P.hvee / 36 - P.mu / 120);
    return r;
}

namespace detail {

inline bool image_ok(const Prepotential& P, const ModuliPoint& pt, double sep) {
    return admissible(P, modular_image(P, pt), sep);
}

}  // namespace detail

inline Report check_modularity(const Prepotential& P, const WdvvConfig& cfg) {
    Report r;
    r.check = "wdvv.modularity";
    r.target = P.label();
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    if (!quartic_check(P.system).ok) {
        r.status = Status::fail;
        r.details["failed"] = "quartic";
        return r;
    }
    auto pts = sample_points(P, cfg.samples, cfg.seed, cfg.region, [&](const ModuliPoint& pt) {
        return detail::image_ok(P, pt, separation(P, cfg.region));
    });
    auto res = detail::parallel_map<LawResiduals>(
        pts.size(), [&](std::size_t i) { return modularity_residuals(P, pts[i], cfg.eval); });
    double a = 0, b = 0, c = 0;
    for (const auto& x : res) {
        r.absorb(x.c_laws, cfg.tol);
        r.absorb(x.delta_laws, cfg.tol);
        r.absorb(x.invariance, cfg.tol);
        a = std::max(a, x.c_laws);
        b = std::max(b, x.delta_laws);
        c = std::max(c, x.invariance);
    }
    r.details["c_laws"] = format_sci(a);
    r.details["delta_laws"] = format_sci(b);
    r.details["tau_plus_one"] = format_sci(c);
    return r;
}

/// Uses every dual-lattice basis vector when p is not given.
inline Report check_periodicity(const Prepotential& P, const WdvvConfig& cfg,
                                std::vector<RationalVector> shifts = {}) {
    Report r;
    r.check = "wdvv.periodicity";
    r.target = P.label();
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    if (shifts.empty()) {
        auto lat = lattice_check(P.system);
        if (!lat.ok) {
            r.status = Status::fail;
            r.details["failed"] = "lattice";
            return r;
        }
        shifts = lat.basis;
    }
    auto pts = sample_points(P, cfg.samples, cfg.seed, cfg.region);
    double a = 0, b = 0, c = 0;
    nlohmann::json used = nlohmann::json::array();
    for (const auto& p : shifts) {
        used.push_back(to_json(p));
        auto res = detail::parallel_map<LawResiduals>(
            pts.size(), [&](std::size_t i) { return periodicity_residuals(P, pts[i], p, cfg.eval); });
        for (const auto& x : res) {
            r.absorb(x.c_laws, cfg.tol);
            r.absorb(x.delta_laws, cfg.tol);
            r.absorb(x.invariance, cfg.tol);
            a = std::max(a, x.c_laws);
            b = std::max(b, x.delta_laws);
            c = std::max(c, x.invariance);
        }
    }
    r.details["shifts"] = used;
    r.details["c_laws"] = format_sci(a);
    r.details["delta_laws"] = format_sci(b);
    r.details["z_plus_p"] = format_sci(c);
    return r;
}

/// Rational limit and the trigonometric branch selected by h-vee.
inline Report check_limits(const Prepotential& P, const WdvvConfig& cfg) {
    Report r;
    r.check = "wdvv.limits";
    r.target = P.system.name;
    r.seed = cfg.seed;
    r.tolerances["tol"] = cfg.tol;
    auto pts = sample_points(P, cfg.samples, cfg.seed, cfg.region);
    // gated relative to the size of the products; trigonometric kernels carry (2 pi i)^3
    for (LimitKind k : {LimitKind::rational, trig_branch(P)}) {
        double worst = 0, worst_rel = 0;
        for (const auto& pt : pts) {
            auto c = limit_tensor(P, k, pt.z, cfg.eval.pole_guard);
            const double x = full_associator(c);
            r.absorb(x / associator_scale(c), cfg.tol);
            worst = std::max(worst, x);
            worst_rel = std::max(worst_rel, x / associator_scale(c));
        }
        r.details[limit_name(k)] = format_sci(worst);
        r.details[limit_name(k) + "_relative"] = format_sci(worst_rel);
    }
    return r;
}

}  // namespace ellvee
