#include "ellvee/wdvv.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ellvee;
using namespace std::complex_literals;

namespace {

constexpr double tol = 1e-9;

Prepotential prep(const std::string& name, std::map<std::string, Rational> params = {}, bool corrected = true) {
    return make_prepotential(catalog(name, params), corrected);
}

WdvvConfig quick(std::size_t n = 6, std::uint64_t seed = 11) {
    WdvvConfig c;
    c.samples = n;
    c.seed = seed;
    return c;
}

// Third derivative of s -> g(s) at 0 from a 16-point circle of radius r.
Complex third_derivative(const std::function<Complex(Complex)>& g, double r = 0.02) {
    const int M = 16;
    Complex s = 0;
    for (int j = 0; j < M; ++j) {
        Complex w = std::polar(1.0, 2 * pi * j / M);
        s += g(r * w) * std::pow(w, -3);
    }
    return 6.0 * s / (double(M) * r * r * r);
}

Complex prepotential_value(const Prepotential& P, Complex u, const CVector& z, Complex tau) {
    ModularParameter T(tau);
    Complex zz = 0;
    for (std::size_t i = 0; i < P.n; ++i)
        for (std::size_t j = 0; j < P.n; ++j)
            zz += z[i] * P.gram[i][j] * z[j];
    Complex s = 0.5 * u * u * tau - 0.5 * u * zz;
    for (std::size_t k = 0; k < P.covectors.size(); ++k) {
        Complex za = 0;
        for (std::size_t i = 0; i < P.n; ++i)
            za += P.covectors[k][i] * z[i];
        s += P.weights[k] * f_value({za, T});
    }
    return s;
}

Complex contract3(const StructureTensor& c, const CVector& v) {
    Complex s = 0;
    for (std::size_t a = 0; a < c.dim(); ++a)
        for (std::size_t b = 0; b < c.dim(); ++b)
            for (std::size_t d = 0; d < c.dim(); ++d)
                s += c(a, b, d) * v[a] * v[b] * v[d];
    return s;
}

CVector random_direction(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> d(-1, 1);
    CVector v(n);
    for (auto& x : v)
        x = {d(rng), d(rng)};
    return v;
}

}  // namespace

TEST(CTensor, UnitySymmetryAndCorrection) {
    auto P = prep("A2");
    auto U = prep("A2", {}, false);
    for (const auto& pt : sample_points(P, 5, 3)) {
        auto c = c_tensor(P, pt);
        const std::size_t N = P.n;
        EXPECT_EQ(c(0, 0, N + 1), Complex(1.0));
        EXPECT_EQ(unity_symmetry_defect(c), 0.0);
        for (std::size_t a = 0; a < c.dim(); ++a)
            for (std::size_t b = 0; b < c.dim(); ++b)
                EXPECT_EQ(c(0, a, b), Complex(c.eta(a, b)));
        auto cu = c_tensor(U, pt);
        Complex diff = c(N + 1, N + 1, N + 1) - cu(N + 1, N + 1, N + 1);
        EXPECT_LT(std::abs(diff - (10.0 / 3.0) * eisenstein(4, pt.tau) / 120.0), 1e-11);
    }
}

TEST(CTensor, MatchesDirectionalDerivativesOfF) {
    std::mt19937_64 rng(5);
    for (const char* name : {"A2", "B2"}) {
        auto P = prep(name, {}, false);
        // f uses the principal branch of Li3(e^{2 pi i z}); stay clear of its cut at Re z in Z
        auto off_cut = [&](const ModuliPoint& pt) {
            for (const auto& a : P.covectors) {
                Complex za = 0;
                for (std::size_t i = 0; i < P.n; ++i)
                    za += a[i] * pt.z[i];
                if (std::abs(za.real()) < 0.15)
                    return false;
            }
            return true;
        };
        for (const auto& pt : sample_points(P, 3, 17, {}, off_cut)) {
            auto c = c_tensor(P, pt);
            for (int rep = 0; rep < 3; ++rep) {
                CVector v = random_direction(rng, P.n + 2);
                auto g = [&](Complex s) {
                    CVector z(P.n);
                    for (std::size_t i = 0; i < P.n; ++i)
                        z[i] = pt.z[i] + s * v[1 + i];
                    return prepotential_value(P, pt.u + s * v[0], z, pt.tau.tau() + s * v[P.n + 1]);
                };
                Complex fd = third_derivative(g, 0.01);
                EXPECT_LT(std::abs(fd - contract3(c, v)) / (1 + std::abs(fd)), 1e-6) << name;
            }
        }
    }
}

TEST(CTensor, Parity) {
    auto P = prep("B2");
    for (auto pt : sample_points(P, 4, 8)) {
        auto c = c_tensor(P, pt);
        for (auto& x : pt.z)
            x = -x;
        auto m = c_tensor(P, pt);
        const std::size_t t = P.n + 1;
        EXPECT_NEAR(std::abs(m(t, t, t) - c(t, t, t)), 0, 1e-11);
        for (std::size_t i = 1; i <= P.n; ++i) {
            EXPECT_NEAR(std::abs(m(t, t, i) + c(t, t, i)), 0, 1e-11);
            for (std::size_t j = 1; j <= P.n; ++j) {
                EXPECT_NEAR(std::abs(m(t, i, j) - c(t, i, j)), 0, 1e-11);
                for (std::size_t k = 1; k <= P.n; ++k)
                    EXPECT_NEAR(std::abs(m(i, j, k) + c(i, j, k)), 0, 1e-11);
            }
        }
    }
}

TEST(CTensor, PoleGuardAndDimensions) {
    auto P = prep("A2");
    ModuliPoint pt{0.0, {0.0, 0.0}, ModularParameter(Complex(0, 1))};
    EXPECT_THROW(c_tensor(P, pt), DomainError);
    ModuliPoint bad{0.0, {0.1}, ModularParameter(Complex(0, 1))};
    EXPECT_THROW(c_tensor(P, bad), std::invalid_argument);
    EXPECT_FALSE(admissible(P, pt));
}

TEST(CTensor, BoundedAsImTauGrows) {
    auto P = prep("A2");
    CVector z{0.13 + 0.02i, -0.07 + 0.05i};
    double prev = -1;
    for (double y : {4.0, 6.0, 8.0}) {
        auto c = c_tensor(P, {0.2, z, ModularParameter(Complex(0.1, y))});
        double m = 0;
        for (std::size_t a = 0; a < c.dim(); ++a)
            for (std::size_t b = 0; b < c.dim(); ++b)
                for (std::size_t d = 0; d < c.dim(); ++d)
                    m = std::max(m, std::abs(c(a, b, d)));
        EXPECT_LT(m, 100.0);
        if (prev >= 0) {
            EXPECT_NEAR(m, prev, 1e-6);
        }
        prev = m;
    }
}

TEST(Associators, RoutesAgreeAndVanish) {
    for (auto [name, params] : std::vector<std::pair<std::string, std::map<std::string, Rational>>>{
             {"A2", {}}, {"B2", {}}, {"A1_2", {}}, {"G2", {{"h", Rational(1, 2)}}}, {"AN", {{"N", 3}}},
             {"BN", {{"N", 3}}}, {"F4", {{"h", 2}}}}) {
        auto r = check_associators(prep(name, params), quick(4));
        EXPECT_EQ(r.status, Status::pass) << name << " " << r.details.dump();
    }
}

TEST(Associators, A14UncorrectedVanishes) {
    auto P = prep("A1_4", {{"nu", Rational(1, 2)}}, false);
    EXPECT_EQ(P.hvee, 0);
    auto r = check_associators(P, quick(20));
    EXPECT_EQ(r.status, Status::pass) << r.details.dump();
}

TEST(Associators, UncorrectedA2LeavesE4Multiple) {
    auto U = prep("A2", {}, false);
    EXPECT_EQ(U.hvee, 1);
    auto r = check_e4_defect(U, quick(10));
    EXPECT_EQ(r.status, Status::pass) << r.details.dump();
    EXPECT_EQ(r.details["coefficient"], "1/36");
    // negative control: the associators themselves do not vanish
    EXPECT_EQ(check_associators(U, quick(3)).status, Status::fail);
    auto A = associators(U, sample_points(U, 1, 2)[0]);
    EXPECT_GT(std::abs(A.D1(0, 0)), 1e-3);
    for (const auto* v : {&A.d2, &A.d3})
        for (const auto& x : *v)
            EXPECT_LT(std::abs(x), tol);
}

TEST(Associators, RoutesAgreeEntrywiseWhenNonzero) {
    auto U = prep("B2", {}, false);
    for (const auto& pt : sample_points(U, 3, 4)) {
        auto A = associators(U, pt), B = expanded_associators(U, pt);
        EXPECT_GT(A.max_abs(), 1e-3);
        for (std::size_t k = 0; k < A.d1.size(); ++k)
            EXPECT_LT(std::abs(A.d1[k] - B.d1[k]), 1e-10);
    }
}

TEST(Associators, FullAssociatorDetectsRootsOnlyA3) {
    auto rs = build(Family::A, 3);
    std::vector<VVector> vs;
    for (const auto& a : rs.roots)
        vs.push_back({a, 1});
    auto P = make_prepotential(restrict_to_span("A3 roots", rs.form, vs), true);
    auto pt = sample_points(P, 1, 9)[0];
    EXPECT_GT(full_associator(c_tensor(P, pt)), 1e-4);
}

TEST(Modularity, LawsHold) {
    for (bool corrected : {true, false}) {
        auto r = check_modularity(prep("A2", {}, corrected), quick(6));
        EXPECT_EQ(r.status, Status::pass) << r.details.dump();
    }
    auto r = check_modularity(prep("AN", {{"N", 3}}), quick(4));
    EXPECT_EQ(r.status, Status::pass) << r.details.dump();
}

TEST(Modularity, ImaginaryAxis) {
    auto P = prep("A2", {}, false);
    for (double y : {0.9, 1.0, 1.3}) {
        ModuliPoint pt{0.3 - 0.1i, {0.11 + 0.02i, -0.05 + 0.04i}, ModularParameter(Complex(0, y))};
        auto res = modularity_residuals(P, pt);
        EXPECT_LT(res.c_laws, tol);
        EXPECT_LT(res.delta_laws, tol);
        EXPECT_LT(res.invariance, tol);
    }
}

TEST(Modularity, NeedsQuarticCondition) {
    auto rs = build(Family::A, 3);
    std::vector<VVector> vs;
    for (const auto& a : rs.roots)
        vs.push_back({a, 1});
    auto A3 = restrict_to_span("A3 roots", rs.form, vs);
    auto r = check_modularity(make_prepotential(A3, false), quick(2));
    EXPECT_EQ(r.status, Status::fail);
}

TEST(Periodicity, LawsHold) {
    auto P = prep("AN", {{"N", 3}});
    RationalVector p{1, -1, 0};
    ASSERT_TRUE(in_dual_lattice(P.system, p));
    auto r = check_periodicity(P, quick(4), {p});
    EXPECT_EQ(r.status, Status::pass) << r.details.dump();
    auto all = check_periodicity(prep("A2", {}, false), quick(4));
    EXPECT_EQ(all.status, Status::pass) << all.details.dump();
}

TEST(Periodicity, NonIntegralShiftRejected) {
    auto P = prep("A2");
    auto pt = sample_points(P, 1, 1)[0];
    EXPECT_THROW(periodicity_residuals(P, pt, RationalVector{Rational(1, 2), 0}), std::invalid_argument);
}

TEST(Limits, AssociatorsVanish) {
    auto A2 = prep("A2");
    auto r = check_limits(A2, quick(20));
    EXPECT_EQ(r.status, Status::pass) << r.details.dump();
    EXPECT_TRUE(r.details.contains("trig_II"));
    for (const char* k : {"rational", "trig_II"})
        EXPECT_LT(std::stod(r.details[k].get<std::string>()), 1e-9) << k;
    auto A14 = prep("A1_4", {{"nu", Rational(1, 2)}}, false);
    auto r2 = check_limits(A14, quick(10));
    EXPECT_EQ(r2.status, Status::pass) << r2.details.dump();
    EXPECT_TRUE(r2.details.contains("trig_I"));
    auto r3 = check_limits(prep("B2"), quick(5));
    EXPECT_EQ(r3.status, Status::pass) << r3.details.dump();
    // trigonometric entries of size (2 pi)^3/|z|: gated relative to the products
    auto r4 = check_limits(prep("AN", {{"N", 3}}), quick(20));
    EXPECT_EQ(r4.status, Status::pass) << r4.details.dump();
    EXPECT_LT(std::stod(r4.details["trig_I_relative"].get<std::string>()), 1e-13);
}

TEST(Limits, WrongBranch) {
    auto A2 = prep("A2");
    EXPECT_THROW(limit_tensor(A2, LimitKind::trig_I, {0.1, 0.2}), std::invalid_argument);
    auto A14 = prep("A1_4", {{"nu", Rational(1, 2)}}, false);
    EXPECT_THROW(limit_tensor(A14, LimitKind::trig_II, {0.1}), std::invalid_argument);
}

TEST(Limits, TensorMatchesPrepotential) {
    std::mt19937_64 rng(3);
    auto A2 = prep("A2");
    CVector z{0.12 + 0.03i, -0.21 + 0.05i};
    for (LimitKind k : {LimitKind::rational, LimitKind::trig_II}) {
        auto c = limit_tensor(A2, k, z);
        const std::size_t off = k == LimitKind::trig_II ? 1 : 0;
        for (int rep = 0; rep < 3; ++rep) {
            CVector v = random_direction(rng, c.dim());
            auto g = [&](Complex s) {
                CVector w(2);
                for (std::size_t i = 0; i < 2; ++i)
                    w[i] = z[i] + s * v[off + i];
                return limit_prepotential(A2, k, off ? 0.4 + s * v[0] : 0.0, w);
            };
            Complex fd = third_derivative(g, 0.01);
            EXPECT_LT(std::abs(fd - contract3(c, v)) / (1 + std::abs(fd)), 1e-6) << limit_name(k);
        }
    }
    auto A14 = prep("A1_4", {{"nu", Rational(1, 2)}}, false);
    auto c = limit_tensor(A14, LimitKind::trig_I, {0.13 + 0.02i});
    auto g = [&](Complex s) { return limit_prepotential(A14, LimitKind::trig_I, 0.0, {0.13 + 0.02i + s}); };
    Complex fd = third_derivative(g, 0.01);
    EXPECT_LT(std::abs(fd - c(0, 0, 0)) / std::abs(fd), 1e-6);
}

TEST(A1Equation, BothSolutions) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.8, 2.5), zz(-0.2, 0.2);
    for (int k = 0; k < 20; ++k) {
        ModularParameter tau(Complex(re(rng), im(rng)));
        Complex z(zz(rng), zz(rng));
        if (std::abs(z) < 0.03)
            continue;
        EXPECT_LT(std::abs(a1_delta(a1_h(z, tau))), tol);
        EXPECT_LT(std::abs(a1_delta(a1_htilde(z, tau))), tol);
        // in its own variable the coefficient of h03 becomes 1/4
        FThird raw = a1_htilde_raw(z, tau);
        EXPECT_LT(std::abs(raw.d30 * raw.d12 - raw.d21 * raw.d21 + 0.25 * raw.d03), tol);
        EXPECT_GT(std::abs(a1_delta(raw)), 1e-6);
    }
}

TEST(Sampling, DeterministicAndInRegion) {
    auto P = prep("B2");
    auto a = sample_points(P, 10, 99), b = sample_points(P, 10, 99), c = sample_points(P, 10, 100);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].z, b[k].z);
        EXPECT_EQ(a[k].tau.tau(), b[k].tau.tau());
        EXPECT_NE(a[k].z, c[k].z);
        const Complex t = a[k].tau.tau();
        EXPECT_GE(t.imag(), 0.8);
        EXPECT_LE(t.imag(), 2.5);
        EXPECT_LE(std::abs(t.real()), 0.5);
        double n2 = 0;
        for (std::size_t i = 0; i < P.n; ++i)
            for (std::size_t j = 0; j < P.n; ++j)
                n2 += P.gram[i][j] * (a[k].z[i].real() * a[k].z[j].real() + a[k].z[i].imag() * a[k].z[j].imag());
        EXPECT_LE(std::sqrt(n2), 0.4 + 1e-12);
        EXPECT_TRUE(admissible(P, a[k], 0.05));
    }
    EXPECT_EQ(to_json(check_associators(P, quick(3))).dump(), to_json(check_associators(P, quick(3))).dump());
}
