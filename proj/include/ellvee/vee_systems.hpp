#pragma once

#include "ellvee/rational.hpp"
#include "ellvee/report.hpp"
#include "ellvee/root_systems.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellvee {

struct VVector {
    RationalVector v;
    Rational h;
};

/// Finite multiset of (alpha, h_alpha) with a bilinear form on the ambient space.
struct VSystem {
    std::string name;
    BilinearForm form;
    std::vector<VVector> vectors;
    std::map<std::string, Rational> params;

    [[nodiscard]] std::size_t dim() const { return form.dim(); }
    [[nodiscard]] RationalVector covector(std::size_t i) const { return form.lower(vectors[i].v); }

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const {
        if (vectors.empty())
            throw std::invalid_argument("system has no vectors");
        std::map<RationalVector, Rational> h;
        for (const auto& x : vectors) {
            if (x.v.size() != dim())
                throw std::invalid_argument("vector dimension does not match the form");
            if (x.v.is_zero())
                throw std::invalid_argument("zero vector in system");
            if (h.count(x.v))
                throw std::invalid_argument("repeated vector in system");
            h[x.v] = x.h;
        }
        for (const auto& x : vectors) {
            auto it = h.find(-x.v);
            if (it == h.end())
                throw std::invalid_argument("system is not closed under negation");
            if (it->second != x.h)
                throw std::invalid_argument("h_{-alpha} differs from h_alpha");
        }
        RationalMatrix m(vectors.size(), dim());
        for (std::size_t i = 0; i < vectors.size(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                m(i, j) = vectors[i].v[j];
        if (rank(m) != dim())
            throw std::invalid_argument("vectors do not span the space");
    }
};

// ---------------------------------------------------------------------------
// second moment and quartic condition

struct SecondMoment {
    bool ok = false;
    Rational hvee;
    RationalMatrix moment;     // sum h (G a)(G a)^T
    RationalMatrix deviation;  // moment - 2 hvee G
};

inline SecondMoment second_moment(const VSystem& V) {
    const std::size_t n = V.dim();
    SecondMoment r;
    r.moment = RationalMatrix(n, n);
    for (std::size_t k = 0; k < V.vectors.size(); ++k) {
        auto a = V.covector(k);
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] == 0)
                continue;
            Rational ha = V.vectors[k].h * a[i];
            for (std::size_t j = 0; j < n; ++j)
                r.moment(i, j) += ha * a[j];
        }
    }
    const auto& G = V.form.gram();
    std::size_t pi = 0, pj = 0;
    while (G(pi, pj) == 0) {
        if (++pj == n) {
            pj = 0;
            ++pi;
        }
    }
    r.hvee = r.moment(pi, pj) / (2 * G(pi, pj));
    r.deviation = RationalMatrix(n, n);
    r.ok = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            r.deviation(i, j) = r.moment(i, j) - 2 * r.hvee * G(i, j);
            if (r.deviation(i, j) != 0)
                r.ok = false;
        }
    return r;
}

struct QuarticDeviation {
    std::array<std::size_t, 4> index;
    Rational value;
};

struct QuarticResult {
    bool ok = true;
    std::vector<QuarticDeviation> deviations;
};

/// sum h a_i a_j a_k a_l == G_ij G_kl + G_ik G_jl + G_il G_jk for i <= j <= k <= l.
inline QuarticResult quartic_check(const VSystem& V) {
    const std::size_t n = V.dim();
    const auto& G = V.form.gram();
    std::vector<RationalVector> cov;
    std::vector<Rational> h;
    // negation pairs contribute equally; keep one representative each
    std::set<RationalVector> seen;
    for (std::size_t k = 0; k < V.vectors.size(); ++k) {
        if (seen.count(-V.vectors[k].v))
            continue;
        seen.insert(V.vectors[k].v);
        cov.push_back(V.covector(k));
        h.push_back(2 * V.vectors[k].h);
    }
    QuarticResult r;
    Rational acc, t;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            std::vector<Rational> hij(cov.size());
            for (std::size_t k = 0; k < cov.size(); ++k)
                hij[k] = h[k] * cov[k][i] * cov[k][j];
            for (std::size_t k = j; k < n; ++k)
                for (std::size_t l = k; l < n; ++l) {
                    acc = 0;
                    for (std::size_t m = 0; m < cov.size(); ++m) {
                        if (hij[m] == 0 || cov[m][k] == 0 || cov[m][l] == 0)
                            continue;
                        t = hij[m] * cov[m][k];
                        acc += t * cov[m][l];
                    }
                    Rational target = G(i, j) * G(k, l) + G(i, k) * G(j, l) + G(i, l) * G(j, k);
                    if (acc != target) {
                        r.ok = false;
                        r.deviations.push_back({{i, j, k, l}, acc - target});
                    }
                }
        }
    return r;
}

// ---------------------------------------------------------------------------
// 2-planes through a vector

struct PlaneSlice {
    std::size_t alpha = 0;  // index into V.vectors
    RationalVector alpha_perp;
    std::vector<std::size_t> members;                   // indices, excluding the line through alpha
    std::vector<std::pair<Rational, Rational>> coeffs;  // beta = a alpha + b alpha_perp
    std::vector<std::size_t> line;                      // vectors on the line through alpha
};

inline RationalVector perp_component(const BilinearForm& form, const RationalVector& alpha,
                                     const RationalVector& beta) {
    return beta - (form(alpha, beta) / form(alpha, alpha)) * alpha;
}

/// Partition of the system minus the line through alpha into planes through alpha.
inline std::vector<PlaneSlice> plane_decomposition(const VSystem& V, std::size_t alpha) {
    if (alpha >= V.vectors.size())
        throw std::out_of_range("alpha index out of range");
    const auto& a = V.vectors[alpha].v;
    if (V.form(a, a) == 0)
        throw std::invalid_argument("plane_decomposition needs a non-isotropic alpha");
    std::vector<PlaneSlice> slices;
    std::vector<std::size_t> line;
    std::map<RationalVector, std::size_t> by_key;
    for (std::size_t k = 0; k < V.vectors.size(); ++k) {
        auto p = perp_component(V.form, a, V.vectors[k].v);
        if (p.is_zero()) {
            line.push_back(k);
            continue;
        }
        auto key = p.projective_key();
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            PlaneSlice s;
            s.alpha = alpha;
            s.alpha_perp = p;
            it = by_key.emplace(key, slices.size()).first;
            slices.push_back(std::move(s));
        }
        auto& s = slices[it->second];
        // b from the first nonzero coordinate of alpha_perp
        std::size_t c = 0;
        while (s.alpha_perp[c] == 0)
            ++c;
        Rational b = p[c] / s.alpha_perp[c];
        Rational ca = V.form(a, V.vectors[k].v) / V.form(a, a);
        s.members.push_back(k);
        s.coeffs.emplace_back(ca, b);
    }
    for (auto& s : slices)
        s.line = line;
    return slices;
}

/// All vectors of the system lying in the plane of a slice, including the line through alpha.
inline std::vector<std::size_t> plane_members(const PlaneSlice& s) {
    std::vector<std::size_t> out = s.members;
    out.insert(out.end(), s.line.begin(), s.line.end());
    return out;
}

// ---------------------------------------------------------------------------
// pole conditions

struct PoleViolation {
    std::size_t alpha;
    std::size_t slice;
    Rational v;      // (beta, alpha_perp)^2 of the offending group
    int condition;   // 1 scalar, 2 bivector, 3 four-tensor
};

namespace detail {

struct PoleGroup {
    Rational scalar = 0;    // sum h (a,b)(b,ap)
    RationalMatrix wedge;   // sum h (a,b) (a ^ b)
    Rational quartic = 0;   // sum h (a,b) s^2 (b,ap), with a ^ b = s (a ^ ap)
};

}  // namespace detail

/// Grouped exact form of the three infinite families of pole conditions.
inline std::vector<PoleViolation> pole_conditions(const VSystem& V) {
    std::vector<PoleViolation> out;
    const std::size_t n = V.dim();
    std::set<RationalVector> done;
    for (std::size_t ai = 0; ai < V.vectors.size(); ++ai) {
        const auto& a = V.vectors[ai].v;
        // -alpha gives the same conditions up to sign
        if (done.count(-a))
            continue;
        done.insert(a);
        const auto acov = V.form.lower(a);
        auto slices = plane_decomposition(V, ai);
        for (std::size_t si = 0; si < slices.size(); ++si) {
            const auto& s = slices[si];
            std::map<Rational, detail::PoleGroup> groups;
            for (std::size_t m = 0; m < s.members.size(); ++m) {
                const auto& x = V.vectors[s.members[m]];
                Rational ab = V.form(a, x.v);
                if (ab == 0 || x.h == 0)
                    continue;
                Rational bp = V.form(x.v, s.alpha_perp);
                Rational key = bp * bp;
                if (key == 0)
                    continue;
                auto [it, fresh] = groups.try_emplace(key);
                auto& g = it->second;
                if (fresh)
                    g.wedge = RationalMatrix(n, n);
                Rational w = x.h * ab;
                g.scalar += w * bp;
                auto bcov = V.form.lower(x.v);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j) {
                        Rational e = acov[i] * bcov[j] - acov[j] * bcov[i];
                        if (e != 0)
                            g.wedge(i, j) += w * e;
                    }
                const Rational& sb = s.coeffs[m].second;
                g.quartic += w * sb * sb * bp;
            }
            for (const auto& [key, g] : groups) {
                if (g.scalar != 0)
                    out.push_back({ai, si, key, 1});
                bool wedge_zero = true;
                for (std::size_t i = 0; i < n && wedge_zero; ++i)
                    for (std::size_t j = i + 1; j < n; ++j)
                        if (g.wedge(i, j) != 0) {
                            wedge_zero = false;
                            break;
                        }
                if (!wedge_zero)
                    out.push_back({ai, si, key, 2});
                if (g.quartic != 0)
                    out.push_back({ai, si, key, 3});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2-plane well-distributed-or-reducible

struct PlaneDefect {
    std::size_t alpha;
    RationalVector alpha_perp;
};

/// Every 2-plane meeting the system in two or more lines is either well distributed
/// or the union of exactly two orthogonal lines.
inline std::vector<PlaneDefect> two_plane_check(const VSystem& V) {
    std::vector<PlaneDefect> out;
    std::set<std::pair<RationalVector, RationalVector>> planes_seen;
    for (std::size_t ai = 0; ai < V.vectors.size(); ++ai) {
        const auto& a = V.vectors[ai].v;
        for (const auto& s : plane_decomposition(V, ai)) {
            auto all = plane_members(s);
            std::set<RationalVector> lines;
            for (auto k : all)
                lines.insert(V.vectors[k].v.projective_key());
            // canonical plane key: first two lines in order
            auto l0 = *lines.begin(), l1 = *std::next(lines.begin());
            if (!planes_seen.insert({l0, l1}).second)
                continue;
            if (lines.size() == 2 && V.form(l0, l1) == 0)
                continue;  // reducible
            const RationalVector* basis[2] = {&a, &s.alpha_perp};
            Rational M[2][2], Gp[2][2];
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) {
                    Gp[x][y] = V.form(*basis[x], *basis[y]);
                    M[x][y] = 0;
                    for (auto k : all)
                        M[x][y] += V.vectors[k].h * V.form(V.vectors[k].v, *basis[x]) *
                                   V.form(V.vectors[k].v, *basis[y]);
                }
            // proportionality M = lambda Gp; Gp is diagonal in this basis
            Rational lambda = M[0][0] / Gp[0][0];
            bool ok = M[0][1] == 0 && M[1][0] == 0 && M[1][1] == lambda * Gp[1][1];
            if (!ok)
                out.push_back({ai, s.alpha_perp});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// lattice

namespace detail {

/// Row-style Hermite reduction of integer rows; returns the nonzero rows.
inline std::vector<std::vector<Integer>> integer_row_basis(std::vector<std::vector<Integer>> rows,
                                                           std::size_t ncols) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
        while (true) {
            // smallest nonzero |entry| in column c at or below r
            std::size_t p = rows.size();
            for (std::size_t i = r; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (p == rows.size() || abs(rows[i][c]) < abs(rows[p][c])))
                    p = i;
            if (p == rows.size())
                break;
            std::swap(rows[r], rows[p]);
            bool clean = true;
            for (std::size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0)
                    continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
                for (std::size_t j = c; j < ncols; ++j)
                    rows[i][j] -= q * rows[r][j];
                if (rows[i][c] != 0)
                    clean = false;
            }
            if (clean) {
                ++r;
                break;
            }
        }
    }
    rows.resize(r);
    return rows;
}

}  // namespace detail

struct LatticeResult {
    bool ok = false;
    std::size_t rank = 0;
    std::vector<RationalVector> basis;  // p_j with (p_j, alpha) integral for every alpha
};

/// Dual lattice {p : (p, alpha) in Z for all alpha}.
inline LatticeResult lattice_check(const VSystem& V) {
    const std::size_t n = V.dim();
    std::vector<RationalVector> cov;
    Integer D = 1;
    for (std::size_t k = 0; k < V.vectors.size(); ++k) {
        cov.push_back(V.covector(k));
        for (const auto& c : cov.back())
            mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), c.get_den().get_mpz_t());
    }
    std::vector<std::vector<Integer>> rows;
    for (const auto& c : cov) {
        std::vector<Integer> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            Rational x = c[j] * Rational(D);
            row[j] = x.get_num();
        }
        rows.push_back(std::move(row));
    }
    auto basis = detail::integer_row_basis(std::move(rows), n);
    LatticeResult r;
    r.rank = basis.size();
    if (r.rank < n)
        return r;
    RationalMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = Rational(basis[i][j]) / Rational(D);
    auto inv = inverse(A);
    for (std::size_t j = 0; j < n; ++j) {
        RationalVector p(n);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = inv(i, j);
        r.basis.push_back(p);
    }
    r.ok = true;
    return r;
}

inline bool in_dual_lattice(const VSystem& V, const RationalVector& p) {
    for (const auto& x : V.vectors)
        if (V.form(x.v, p).get_den() != 1)
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// pair classification

enum class PairType { TypeA, TypeB, mixed, other };

inline std::string pair_type_name(PairType t) {
    switch (t) {
    case PairType::TypeA: return "TypeA";
    case PairType::TypeB: return "TypeB";
    case PairType::mixed: return "mixed";
    case PairType::other: return "other";
    }
    return "?";
}

/// Per slice through alpha. TypeA: the plane's vectors form a reflection-closed
/// configuration and sigma_alpha pairs members with equal h. TypeB: members pair as
/// beta <-> beta - alpha with (alpha,beta) h_beta = (alpha, alpha - beta) h_{beta - alpha}.
inline std::vector<PairType> classify_pairs(const VSystem& V, std::size_t alpha) {
    std::map<RationalVector, Rational> h;
    for (const auto& x : V.vectors)
        h[x.v] = x.h;
    const auto& a = V.vectors[alpha].v;
    std::vector<PairType> out;
    for (const auto& s : plane_decomposition(V, alpha)) {
        bool allA = true, allB = true, allAny = true;
        for (auto k : s.members) {
            const auto& b = V.vectors[k].v;
            const Rational hb = V.vectors[k].h;
            Rational ab = V.form(a, b);
            if (ab == 0)
                continue;
            bool isA = false, isB = false;
            if (auto it = h.find(reflect(a, b, V.form)); it != h.end() && it->second == hb)
                isA = true;
            auto g = b - a;
            if (auto it = h.find(g); it != h.end() && ab * hb == V.form(a, a - b) * it->second)
                isB = true;
            auto d = b + a;  // b is the partner of b + a
            if (auto it = h.find(d); it != h.end() && V.form(a, d) * it->second == V.form(a, a - d) * hb)
                isB = true;
            allA = allA && isA;
            allB = allB && isB;
            allAny = allAny && (isA || isB);
        }
        bool closed = true;
        auto all = plane_members(s);
        for (auto x : all) {
            for (auto y : all)
                if (!h.count(reflect(V.vectors[x].v, V.vectors[y].v, V.form))) {
                    closed = false;
                    break;
                }
            if (!closed)
                break;
        }
        PairType t = PairType::other;
        if (allA && closed)
            t = PairType::TypeA;
        else if (allB)
            t = PairType::TypeB;
        else if (allAny)
            t = PairType::mixed;
        out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// full check

inline Report is_elliptic(const VSystem& V) {
    Report r;
    r.check = "vee";
    r.target = V.name;
    r.tolerances["exact"] = 0.0;
    r.status = Status::pass;
    auto fail = [&](const std::string& what) {
        r.status = Status::fail;
        r.details["failed"].push_back(what);
    };
    try {
        V.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("validate: ") + e.what());
        return r;
    }
    auto sm = second_moment(V);
    r.details["hvee"] = to_string(sm.hvee);
    if (!sm.ok)
        fail("second_moment");
    if (!two_plane_check(V).empty())
        fail("two_plane");
    auto q = quartic_check(V);
    if (!q.ok)
        fail("quartic");
    auto pc = pole_conditions(V);
    if (!pc.empty())
        fail("pole_conditions");
    r.details["pole_violations"] = pc.size();
    auto lat = lattice_check(V);
    r.details["lattice_rank"] = lat.rank;
    if (!lat.ok)
        fail("lattice");
    return r;
}

// ---------------------------------------------------------------------------
// catalog

/// Restrict vectors given in an ambient space to coordinates on their span.
/// The span basis is the reduced row echelon basis, so coordinates are the pivot entries.
inline VSystem restrict_to_span(const std::string& name, const BilinearForm& ambient,
                                const std::vector<VVector>& vecs) {
    const std::size_t n = ambient.dim();
    RationalMatrix m(vecs.size(), n);
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = vecs[i].v[j];
    auto piv = row_reduce(m);
    const std::size_t r = piv.size();
    RationalMatrix B(r, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j)
            B(i, j) = m(i, j);
    VSystem V;
    V.name = name;
    V.form = BilinearForm(B * ambient.gram() * B.transpose());
    for (const auto& x : vecs) {
        RationalVector c(r);
        for (std::size_t i = 0; i < r; ++i)
            c[i] = x.v[piv[i]];
        V.vectors.push_back({c, x.h});
    }
    return V;
}

struct CatalogEntry {
    std::string name;
    std::string params;  // parameter slot description
    std::string note;
};

inline std::vector<CatalogEntry> catalog_entries() {
    return {
        {"A1_2", "", "A1 roots, h = 3/8"},
        {"A1_4", "nu", "A1 roots (h = 1/2) and a second pair of norm nu (h = -1/(2 nu^2)); nu/2 must be a rational square"},
        {"A2", "", "A2 roots, h = 1/3"},
        {"B2", "", "B2 roots, h_long = 1/4, h_short = 1 (also the N = 2 member of the BN family)"},
        {"G2", "h", "G2 roots, h_long = (1-h)/18, h_short = (3h-1)/6"},
        {"F4", "h", "F4 roots, h_long = (3-h)/6, h_short = (2h-3)/3"},
        {"E6", "", "E6 roots, h = 1/6"},
        {"E7", "", "E7 roots, h = 1/8"},
        {"E8", "", "E8 roots, h = 1/12"},
        {"AN", "N", "A_N roots (h = 1/2) and the orbit of the last fundamental weight (h = -(N+1)/2)"},
        {"BN", "N", "BC_N vectors under the doubled form: h_long = 1/2, h_mid = 1, h_short = -2N"},
    };
}

namespace detail {

inline Rational need_param(const std::map<std::string, Rational>& p, const std::string& key,
                           const std::string& name) {
    auto it = p.find(key);
    if (it == p.end())
        throw std::invalid_argument(name + " needs parameter " + key);
    return it->second;
}

inline int int_param(const std::map<std::string, Rational>& p, const std::string& key, const std::string& name,
                     int lo) {
    Rational x = need_param(p, key, name);
    if (x.get_den() != 1 || x < lo || x > 64)
        throw std::invalid_argument(name + ": parameter " + key + " must be an integer in [" +
                                    std::to_string(lo) + ", 64]");
    return static_cast<int>(x.get_num().get_si());
}

inline std::optional<Rational> rational_sqrt(const Rational& x) {
    if (x < 0)
        return std::nullopt;
    Integer n = x.get_num(), d = x.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
        return std::nullopt;
    Integer rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    return Rational(rn, rd);
}

inline std::vector<VVector> with_constant_h(const std::vector<RationalVector>& vs, const Rational& h) {
    std::vector<VVector> out;
    for (const auto& v : vs)
        out.push_back({v, h});
    return out;
}

inline std::string param_suffix(const std::map<std::string, Rational>& p) {
    if (p.empty())
        return "";
    std::string s = "(";
    bool first = true;
    for (const auto& [k, v] : p) {
        if (!first)
            s += ",";
        first = false;
        s += k + "=" + (v.get_den() == 1 ? v.get_num().get_str() : to_string(v));
    }
    return s + ")";
}

}  // namespace detail

/// Catalog systems by name.
inline VSystem catalog(const std::string& name, const std::map<std::string, Rational>& params = {}) {
    VSystem V;
    auto check_no_params = [&] {
        if (!params.empty())
            throw std::invalid_argument(name + " takes no parameters");
    };
    RationalMatrix two(1, 1);
    two(0, 0) = 2;
    if (name == "A1_2") {
        check_no_params();
        V.form = BilinearForm(two);
        V.vectors = {{RationalVector{1}, Rational(3, 8)}, {RationalVector{-1}, Rational(3, 8)}};
    } else if (name == "A1_4") {
        Rational nu = detail::need_param(params, "nu", name);
        if (nu <= 0)
            throw std::invalid_argument("A1_4: nu must be positive");
        auto t = detail::rational_sqrt(nu / 2);
        if (!t)
            throw std::invalid_argument("A1_4: nu/2 must be the square of a rational");
        Rational ht = Rational(-1) / (2 * nu * nu);
        V.form = BilinearForm(two);
        V.vectors = {{RationalVector{1}, Rational(1, 2)},
                     {RationalVector{-1}, Rational(1, 2)},
                     {RationalVector{*t}, ht},
                     {RationalVector{-*t}, ht}};
    } else if (name == "A2" || name == "E6" || name == "E7" || name == "E8") {
        check_no_params();
        const Family f = name == "A2" ? Family::A : name == "E6" ? Family::E6 : name == "E7" ? Family::E7 : Family::E8;
        const int rk = name == "A2" ? 2 : name == "E6" ? 6 : name == "E7" ? 7 : 8;
        const Rational h = name == "A2" ? Rational(1, 3) : name == "E6" ? Rational(1, 6)
                          : name == "E7" ? Rational(1, 8) : Rational(1, 12);
        auto rs = build(f, rk);
        V = restrict_to_span(name, rs.form, detail::with_constant_h(rs.roots, h));
    } else if (name == "B2") {
        check_no_params();
        auto rs = build(Family::B, 2);
        V.form = rs.form;
        for (const auto& r : rs.roots)
            V.vectors.push_back({r, rs.form(r, r) == 2 ? Rational(1, 4) : Rational(1)});
    } else if (name == "G2") {
        Rational h = detail::need_param(params, "h", name);
        auto rs = build(Family::G2, 2);
        V.form = rs.form;
        for (const auto& r : rs.roots)
            V.vectors.push_back({r, rs.form(r, r) == 6 ? Rational((1 - h) / 18) : Rational((3 * h - 1) / 6)});
    } else if (name == "F4") {
        Rational h = detail::need_param(params, "h", name);
        auto rs = build(Family::F4, 4);
        V.form = rs.form;
        for (const auto& r : rs.roots)
            V.vectors.push_back({r, rs.form(r, r) == 2 ? Rational((3 - h) / 6) : Rational((2 * h - 3) / 3)});
    } else if (name == "AN") {
        const int N = detail::int_param(params, "N", name, 1);
        auto rs = build(Family::A, N);
        auto vecs = detail::with_constant_h(rs.roots, Rational(1, 2));
        // multiplicities add up: for N = 1 the orbit is closed under negation
        std::map<RationalVector, Rational> extra;
        for (int i = 1; i <= N + 1; ++i) {
            extra[a_beta(N, i)] += ratio(-(N + 1), 2);
            extra[-a_beta(N, i)] += ratio(-(N + 1), 2);
        }
        for (const auto& [b, h] : extra)
            vecs.push_back({b, h});
        V = restrict_to_span(name, rs.form, vecs);
    } else if (name == "BN") {
        const int N = detail::int_param(params, "N", name, 1);
        auto rs = build(Family::BC, N);
        V.form = rs.form;
        for (const auto& r : rs.roots) {
            Rational nn = rs.form(r, r);
            V.vectors.push_back({r, nn == 2 ? Rational(1, 2) : nn == 1 ? Rational(1) : Rational(-2 * N)});
        }
    } else {
        throw std::invalid_argument("unknown catalog system: " + name);
    }
    V.name = name + detail::param_suffix(params);
    V.params = params;
    std::sort(V.vectors.begin(), V.vectors.end(),
              [](const VVector& a, const VVector& b) { return a.v < b.v; });
    return V;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const VSystem& V) {
    nlohmann::json j;
    j["name"] = V.name;
    j["dim"] = V.dim();
    j["form"] = to_json(V.form.gram());
    auto vs = nlohmann::json::array();
    for (const auto& x : V.vectors)
        vs.push_back({{"coords", to_json(x.v)}, {"h", to_string(x.h)}});
    j["vectors"] = vs;
    if (!V.params.empty()) {
        nlohmann::json p;
        for (const auto& [k, v] : V.params)
            p[k] = to_string(v);
        j["params"] = p;
    }
    return j;
}

inline VSystem vsystem_from_json(const nlohmann::json& j) {
    VSystem V;
    V.name = j.value("name", std::string("custom"));
    V.form = BilinearForm(matrix_from_json(j.at("form")));
    if (j.contains("dim") && j.at("dim").get<std::size_t>() != V.dim())
        throw std::invalid_argument("dim does not match the form");
    for (const auto& x : j.at("vectors")) {
        const auto& hj = x.at("h");
        Rational h = hj.is_string() ? parse_rational(hj.get<std::string>())
                                    : Rational(static_cast<long>(hj.get<long long>()));
        V.vectors.push_back({vector_from_json(x.at("coords")), h});
    }
    if (j.contains("params"))
        for (const auto& [k, v] : j.at("params").items())
            V.params[k] = parse_rational(v.get<std::string>());
    return V;
}

}  // namespace ellvee
