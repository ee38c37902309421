#include "ellvee/identities.hpp"

#include <gtest/gtest.h>

using namespace ellvee;

namespace {

constexpr double tol = 1e-10;

std::vector<IdentitySample> points(std::size_t n = 50, std::uint64_t seed = 7) {
    IdentityRunConfig c;
    c.samples = n;
    c.seed = seed;
    return identity_samples(c);
}

std::array<Complex, 2> simple_coords(Rank2 g, Complex a, Complex b) {
    auto d = rank2_data(g);
    const double det = d.gram[0][0] * d.gram[1][1] - d.gram[0][1] * d.gram[1][0];
    return {(d.gram[1][1] * a - d.gram[0][1] * b) / det, (d.gram[0][0] * b - d.gram[1][0] * a) / det};
}

}  // namespace

TEST(FrobeniusStickelberger, ThetaForm) {
    for (const auto& s : points()) {
        EXPECT_LT(std::abs(fs_theta(s.a, s.b, s.tau)), tol);
        EXPECT_NEAR(std::abs(fs_theta(s.a, s.b, s.tau) - fs_theta(s.b, s.a, s.tau)), 0.0, 1e-14);
        const Complex c = -s.a - s.b;
        EXPECT_LT(std::abs(fs_theta(s.b, c, s.tau)), tol);
        EXPECT_LT(std::abs(fs_theta(s.a + 1.0, s.b, s.tau)), tol);
    }
}

TEST(FrobeniusStickelberger, FForm) {
    for (const auto& s : points()) {
        EXPECT_LT(std::abs(fs_f(s.a, s.b, s.tau)), tol);
        // rational limit of the same structure: 1/a 1/b + cyclic = 0
        const Complex c = -s.a - s.b;
        EXPECT_LT(std::abs(1.0 / (s.a * s.b) + 1.0 / (s.b * c) + 1.0 / (c * s.a)), 1e-12);
    }
}

TEST(FrobeniusStickelberger, CubicConstantTwoWays) {
    for (const auto& s : points(20)) {
        const Complex x = theta_cubic_ratio(s.tau), y = theta_cubic_ratio_eta(s.tau);
        EXPECT_LT(std::abs(x - y), 1e-11);
        EXPECT_LT(std::abs(x + pi * pi * eisenstein(2, s.tau)), 1e-10);
    }
}

TEST(FrobeniusStickelberger, LatticeArgumentRejected) {
    ModularParameter tau(Complex(0.1, 1.2));
    EXPECT_THROW(fs_theta(0.0, 0.2, tau), DomainError);
    EXPECT_THROW(fs_f(0.2, -0.2, tau), DomainError);
    EXPECT_THROW(fs_theta(tau.tau(), 0.2, tau), DomainError);
}

TEST(Rank2, AllGroupsVanish) {
    for (const auto& s : points()) {
        for (Rank2 g : {Rank2::A2, Rank2::B2, Rank2::G2})
            EXPECT_LT(std::abs(rank2_identity(g, simple_coords(g, s.a, s.b), s.tau)), tol) << rank2_name(g);
    }
}

TEST(Rank2, A2IsMinusTheThreeTermIdentity) {
    for (const auto& s : points(10)) {
        auto z = simple_coords(Rank2::A2, s.a, s.b);
        // with a = (alpha, z), b = (beta, z) the three-term identity is evaluated at (a, b, -a-b)
        EXPECT_LT(std::abs(rank2_identity(Rank2::A2, z, s.tau) + fs_f(s.a, s.b, s.tau)), 1e-12);
    }
}

TEST(Rank2, WrongConstantsFail) {
    auto s = points(1, 3)[0];
    auto B = rank2_data(Rank2::B2, 1, 2);
    auto G = rank2_data(Rank2::G2, 6, 10);
    EXPECT_GT(std::abs(rank2_identity(B, simple_coords(Rank2::B2, s.a, s.b), s.tau)), 1e-6);
    EXPECT_GT(std::abs(rank2_identity(G, simple_coords(Rank2::G2, s.a, s.b), s.tau)), 1e-6);
    auto A = rank2_data(Rank2::A2, 2, 2);
    EXPECT_GT(std::abs(rank2_identity(A, simple_coords(Rank2::A2, s.a, s.b), s.tau)), 1e-6);
}

TEST(Rank2, RejectsRootHyperplane) {
    ModularParameter tau(Complex(0, 1.1));
    EXPECT_THROW(rank2_identity(Rank2::B2, {0.1, 0.0}, tau), DomainError);  // (1,2) root pairing 0
}

TEST(A2Identities, BothHold) {
    for (const auto& s : points()) {
        EXPECT_LT(std::abs(a2_identity(1, s.a, s.b, s.tau)), tol);
        EXPECT_LT(std::abs(a2_identity(2, s.a, s.b, s.tau)), tol);
        EXPECT_NEAR(std::abs(a2_identity(2, s.a, s.b, s.tau) - a2_identity(2, s.b, s.a, s.tau)), 0.0, 1e-13);
    }
}

TEST(A2Identities, ConstantMatters) {
    auto s = points(1, 5)[0];
    const Complex with = a2_identity(2, s.a, s.b, s.tau);
    const Complex e4 = eisenstein(4, s.tau) / 108.0;
    const Complex lhs = with - e4;
    EXPECT_GT(std::abs(lhs), 5e-3);       // no right-hand side
    EXPECT_GT(std::abs(lhs - e4), 5e-3);  // opposite sign
    EXPECT_THROW(a2_identity(3, s.a, s.b, s.tau), std::invalid_argument);
    EXPECT_THROW(a2_identity(1, 0.2, -0.2, s.tau), DomainError);
}

TEST(Report, AllIdentities) {
    IdentityRunConfig cfg;
    auto r = check_identities(cfg);
    EXPECT_EQ(r.status, Status::pass) << r.details.dump();
    EXPECT_EQ(to_json(r).dump(), to_json(check_identities(cfg)).dump());
}

TEST(Report, SpecialFunctions) {
    IdentityRunConfig cfg;
    cfg.tol = 1e-11;
    auto r = check_special_functions(cfg);
    EXPECT_EQ(r.status, Status::pass) << r.details.dump();
    EXPECT_EQ(to_json(r).dump(), to_json(check_special_functions(cfg)).dump());
}
