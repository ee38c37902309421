#pragma once

#include "ellvee/rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellvee {

enum class Family { A, B, C, D, BC, G2, F4, E6, E7, E8 };

inline std::string family_name(Family f) {
    switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::BC: return "BC";
    case Family::G2: return "G2";
    case Family::F4: return "F4";
    case Family::E6: return "E6";
    case Family::E7: return "E7";
    case Family::E8: return "E8";
    }
    return "?";
}

inline Family parse_family(const std::string& s) {
    for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::BC, Family::G2, Family::F4,
                     Family::E6, Family::E7, Family::E8})
        if (family_name(f) == s)
            return f;
    throw std::invalid_argument("unknown root system family: " + s);
}

/// v - 2 (alpha, v)/(alpha, alpha) alpha.
inline RationalVector reflect(const RationalVector& alpha, const RationalVector& v, const BilinearForm& form) {
    Rational aa = form(alpha, alpha);
    if (aa == 0)
        throw std::invalid_argument("cannot reflect in an isotropic vector");
    Rational c = 2 * form(alpha, v) / aa;
    return v - c * alpha;
}

/// Closure of {seed} under the reflections in the generators.
inline std::vector<RationalVector> orbit(const std::vector<RationalVector>& generators,
                                         const RationalVector& seed, const BilinearForm& form,
                                         std::size_t bound = 200000) {
    if (generators.empty())
        throw std::invalid_argument("orbit needs at least one generator");
    std::set<RationalVector> seen{seed};
    std::vector<RationalVector> frontier{seed};
    while (!frontier.empty()) {
        std::vector<RationalVector> next;
        for (const auto& v : frontier)
            for (const auto& g : generators) {
                auto w = reflect(g, v, form);
                if (seen.insert(w).second) {
                    if (seen.size() > bound)
                        throw std::runtime_error("orbit exceeds the safety bound");
                    next.push_back(std::move(w));
                }
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

struct RootSystem {
    Family family = Family::A;
    int rank = 0;
    BilinearForm form;
    std::vector<RationalVector> roots;  // sorted
    bool zero_sum = false;              // A_N: roots lie on sum(x) = 0

    [[nodiscard]] std::size_t ambient_dim() const { return form.dim(); }

    [[nodiscard]] bool contains(const RationalVector& v) const {
        return std::binary_search(roots.begin(), roots.end(), v);
    }

    [[nodiscard]] std::vector<RationalVector> positive_roots() const {
        std::vector<RationalVector> out;
        for (const auto& r : roots)
            if (height(r) > 0)
                out.push_back(r);
        return out;
    }

    /// Positive roots that are not a sum of two positive roots.
    [[nodiscard]] std::vector<RationalVector> simple_roots() const {
        auto pos = positive_roots();
        std::set<RationalVector> sums;
        for (std::size_t i = 0; i < pos.size(); ++i)
            for (std::size_t j = i; j < pos.size(); ++j)
                sums.insert(pos[i] + pos[j]);
        std::vector<RationalVector> out;
        for (const auto& r : pos)
            if (!sums.count(r))
                out.push_back(r);
        return out;
    }

    [[nodiscard]] std::vector<Rational> squared_norms() const {
        std::set<Rational> n;
        for (const auto& r : roots)
            n.insert(form(r, r));
        return {n.begin(), n.end()};
    }

  private:
    // generic functional (1, 1/10, 1/100, ...) on coordinates
    [[nodiscard]] static Rational height(const RationalVector& v) {
        Rational s = 0, w = 1;
        for (const auto& c : v) {
            s += w * c;
            w /= 10;
        }
        return s;
    }
};

namespace detail {

inline RationalVector unit(std::size_t n, std::size_t i, const Rational& s = 1) {
    RationalVector v(n);
    v[i] = s;
    return v;
}

inline void add_signed_pairs(std::vector<RationalVector>& out, std::size_t n, const Rational& s) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (int si : {1, -1})
                for (int sj : {1, -1}) {
                    RationalVector v(n);
                    v[i] = s * si;
                    v[j] = s * sj;
                    out.push_back(v);
                }
}

inline void add_signed_units(std::vector<RationalVector>& out, std::size_t n, const Rational& s) {
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(unit(n, i, s));
        out.push_back(unit(n, i, -s));
    }
}

// all (+-1/2, ..., +-1/2); parity filter: -1 none, 0 even minus signs, 1 odd
inline void add_half_vectors(std::vector<RationalVector>& out, std::size_t n, int parity) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const int minus = __builtin_popcount(mask);
        if (parity >= 0 && minus % 2 != parity)
            continue;
        RationalVector v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = (mask >> i & 1u) ? Rational(-1, 2) : Rational(1, 2);
        out.push_back(v);
    }
}

inline std::vector<RationalVector> e8_roots() {
    std::vector<RationalVector> r;
    add_signed_pairs(r, 8, 1);
    add_half_vectors(r, 8, 0);
    return r;
}

}  // namespace detail

/// Conventional exact realisation of a root system.
inline RootSystem build(Family family, int rank) {
    if (rank < 1)
        throw std::invalid_argument("rank must be >= 1");
    auto bad = [&] {
        return std::invalid_argument("unsupported root system " + family_name(family) + std::to_string(rank));
    };
    RootSystem rs;
    rs.family = family;
    rs.rank = rank;
    const auto n = static_cast<std::size_t>(rank);
    std::vector<RationalVector> r;
    switch (family) {
    case Family::A:
        rs.form = BilinearForm::euclidean(n + 1);
        rs.zero_sum = true;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j <= n; ++j)
                if (i != j)
                    r.push_back(detail::unit(n + 1, i) - detail::unit(n + 1, j));
        break;
    case Family::B:
        rs.form = BilinearForm::euclidean(n);
        detail::add_signed_pairs(r, n, 1);
        detail::add_signed_units(r, n, 1);
        break;
    case Family::C:
        rs.form = BilinearForm::euclidean(n);
        detail::add_signed_pairs(r, n, 1);
        detail::add_signed_units(r, n, 2);
        break;
    case Family::D:
        if (rank < 2)
            throw bad();
        rs.form = BilinearForm::euclidean(n);
        detail::add_signed_pairs(r, n, 1);
        break;
    case Family::BC:
        rs.form = BilinearForm::euclidean(n, 2);
        detail::add_signed_pairs(r, n, Rational(1, 2));
        detail::add_signed_units(r, n, 1);
        detail::add_signed_units(r, n, Rational(1, 2));
        break;
    case Family::G2: {
        if (rank != 2)
            throw bad();
        RationalMatrix g(2, 2);
        g(0, 0) = 6;
        g(0, 1) = g(1, 0) = -3;
        g(1, 1) = 2;
        rs.form = BilinearForm(g);
        for (auto [a, b] : {std::pair{1, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}, {2, 3}}) {
            r.push_back(RationalVector{a, b});
            r.push_back(RationalVector{-a, -b});
        }
        break;
    }
    case Family::F4:
        if (rank != 4)
            throw bad();
        rs.form = BilinearForm::euclidean(4);
        detail::add_signed_pairs(r, 4, 1);
        detail::add_signed_units(r, 4, 1);
        detail::add_half_vectors(r, 4, -1);
        break;
    case Family::E8:
    case Family::E7:
    case Family::E6: {
        const int want = family == Family::E8 ? 8 : family == Family::E7 ? 7 : 6;
        if (rank != want)
            throw bad();
        rs.form = BilinearForm::euclidean(8);
        RationalVector c7(8), c6(8);
        c7[6] = 1;
        c7[7] = 1;
        c6[5] = 1;
        c6[6] = -1;
        for (auto& v : detail::e8_roots()) {
            if (family != Family::E8 && rs.form(v, c7) != 0)
                continue;
            if (family == Family::E6 && rs.form(v, c6) != 0)
                continue;
            r.push_back(v);
        }
        break;
    }
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    rs.roots = std::move(r);
    return rs;
}

/// A_N fundamental weight: sum_{r <= i} e_r - i/(N+1) sum_r e_r, in Q^{N+1}.
inline RationalVector fundamental_weight(Family family, int N, int i) {
    if (family != Family::A)
        throw std::invalid_argument("fundamental weights are provided for type A only");
    if (N < 1 || i < 1 || i > N)
        throw std::out_of_range("fundamental weight index out of range");
    RationalVector w(static_cast<std::size_t>(N) + 1);
    const Rational shift = ratio(i, N + 1);
    for (int r = 0; r <= N; ++r)
        w[static_cast<std::size_t>(r)] = (r < i ? Rational(1) : Rational(0)) - shift;
    return w;
}

/// beta^(i) = e_i - (1/(N+1)) sum_r e_r, i = 1..N+1 (the Weyl orbit of -Delta_(N)).
inline RationalVector a_beta(int N, int i) {
    if (N < 1 || i < 1 || i > N + 1)
        throw std::out_of_range("beta index out of range");
    RationalVector b(static_cast<std::size_t>(N) + 1);
    for (int r = 0; r <= N; ++r)
        b[static_cast<std::size_t>(r)] = (r == i - 1 ? Rational(1) : Rational(0)) - Rational(1, N + 1);
    return b;
}

inline nlohmann::json to_json(const RationalVector& v) {
    auto a = nlohmann::json::array();
    for (const auto& c : v)
        a.push_back(to_string(c));
    return a;
}

inline nlohmann::json to_json(const RationalMatrix& m) {
    auto a = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(to_string(m(i, j)));
        a.push_back(row);
    }
    return a;
}

inline RationalVector vector_from_json(const nlohmann::json& j) {
    if (!j.is_array())
        throw std::invalid_argument("vector must be a JSON array");
    std::vector<Rational> c;
    for (const auto& x : j) {
        if (x.is_string())
            c.push_back(parse_rational(x.get<std::string>()));
        else if (x.is_number_integer())
            c.emplace_back(static_cast<long>(x.get<long long>()));
        else
            throw std::invalid_argument("rational entries must be strings \"p/q\" or integers");
    }
    return RationalVector(std::move(c));
}

inline RationalMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("matrix must be a non-empty JSON array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    RationalMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        auto row = vector_from_json(j[i]);
        if (row.size() != cols)
            throw std::invalid_argument("ragged matrix");
        for (std::size_t k = 0; k < cols; ++k)
            m(i, k) = row[k];
    }
    return m;
}

inline nlohmann::json to_json(const RootSystem& rs) {
    nlohmann::json j;
    j["family"] = family_name(rs.family);
    j["rank"] = rs.rank;
    j["form"] = to_json(rs.form.gram());
    auto roots = nlohmann::json::array();
    for (const auto& r : rs.roots)
        roots.push_back(to_json(r));
    j["roots"] = roots;
    return j;
}

inline RootSystem root_system_from_json(const nlohmann::json& j) {
    RootSystem rs;
    rs.family = parse_family(j.at("family").get<std::string>());
    rs.rank = j.at("rank").get<int>();
    rs.form = BilinearForm(matrix_from_json(j.at("form")));
    for (const auto& r : j.at("roots"))
        rs.roots.push_back(vector_from_json(r));
    std::sort(rs.roots.begin(), rs.roots.end());
    rs.zero_sum = rs.family == Family::A;
    return rs;
}

}  // namespace ellvee
