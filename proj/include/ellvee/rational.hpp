#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ellvee {

using Rational = mpq_class;
using Integer = mpz_class;

/// Canonical "p/q" text form (denominator always present, q > 0).
inline std::string to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Accepts "p/q", "p", or "-p/q". Throws std::invalid_argument otherwise.
inline Rational parse_rational(const std::string& text) {
    if (text.empty())
        throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    auto valid_int = [](const std::string& s) {
        if (s.empty())
            return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size())
            return false;
        return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                           [](char c) { return c >= '0' && c <= '9'; });
    };
    std::string num = slash == std::string::npos ? text : text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!num.empty() && num[0] == '+')
        num.erase(0, 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
        throw std::invalid_argument("malformed rational literal: " + text);
    Rational r{Integer{num}, Integer{den}};
    if (r.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + text);
    r.canonicalize();
    return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// p/q in lowest terms.
inline Rational ratio(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

/// Exact coordinate vector.
class RationalVector {
  public:
    RationalVector() = default;
    explicit RationalVector(std::size_t n) : coords_(n, Rational{0}) {}
    explicit RationalVector(std::vector<Rational> c) : coords_(std::move(c)) {}
    RationalVector(std::initializer_list<Rational> c) : coords_(c) {}

    [[nodiscard]] std::size_t size() const { return coords_.size(); }
    Rational& operator[](std::size_t i) { return coords_[i]; }
    const Rational& operator[](std::size_t i) const { return coords_[i]; }
    [[nodiscard]] const std::vector<Rational>& coords() const { return coords_; }
    auto begin() const { return coords_.begin(); }
    auto end() const { return coords_.end(); }

    [[nodiscard]] bool is_zero() const {
        return std::all_of(coords_.begin(), coords_.end(),
                           [](const Rational& x) { return x == 0; });
    }

    RationalVector& operator+=(const RationalVector& o) {
        check_dim(o);
        for (std::size_t i = 0; i < size(); ++i)
            coords_[i] += o.coords_[i];
        return *this;
    }
    RationalVector& operator-=(const RationalVector& o) {
        check_dim(o);
        for (std::size_t i = 0; i < size(); ++i)
            coords_[i] -= o.coords_[i];
        return *this;
    }
    RationalVector& operator*=(const Rational& s) {
        for (auto& c : coords_)
            c *= s;
        return *this;
    }
    friend RationalVector operator+(RationalVector a, const RationalVector& b) { return a += b; }
    friend RationalVector operator-(RationalVector a, const RationalVector& b) { return a -= b; }
    friend RationalVector operator*(const Rational& s, RationalVector a) { return a *= s; }
    friend RationalVector operator-(RationalVector a) {
        for (auto& c : a.coords_)
            c = -c;
        return a;
    }
    friend bool operator==(const RationalVector& a, const RationalVector& b) {
        return a.coords_ == b.coords_;
    }
    // Lexicographic order on exact coordinates; used as the canonical set order.
    friend bool operator<(const RationalVector& a, const RationalVector& b) {
        return std::lexicographical_compare(a.coords_.begin(), a.coords_.end(),
                                            b.coords_.begin(), b.coords_.end());
    }

    /// Representative of the line through this vector: scaled so the first
    /// nonzero coordinate is 1.
    [[nodiscard]] RationalVector projective_key() const {
        RationalVector k = *this;
        for (const auto& c : coords_) {
            if (c != 0) {
                Rational inv = 1 / c;
                k *= inv;
                return k;
            }
        }
        return k;
    }

  private:
    void check_dim(const RationalVector& o) const {
        if (o.size() != size())
            throw std::invalid_argument("RationalVector dimension mismatch");
    }
    std::vector<Rational> coords_;
};

/// Dense exact matrix, row-major.
class RationalMatrix {
  public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Rational{0}) {}

    static RationalMatrix identity(std::size_t n, const Rational& scale = 1) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = scale;
        return m;
    }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    [[nodiscard]] RationalVector operator*(const RationalVector& v) const {
        if (v.size() != cols_)
            throw std::invalid_argument("matrix-vector dimension mismatch");
        RationalVector out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out[i] += (*this)(i, j) * v[j];
        return out;
    }

    [[nodiscard]] RationalMatrix operator*(const RationalMatrix& o) const {
        if (cols_ != o.rows_)
            throw std::invalid_argument("matrix product dimension mismatch");
        RationalMatrix out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                if ((*this)(i, k) == 0)
                    continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    out(i, j) += (*this)(i, k) * o(k, j);
            }
        return out;
    }

    [[nodiscard]] RationalMatrix transpose() const {
        RationalMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> row_reduce(RationalMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c) == 0)
            ++p;
        if (p == m.rows())
            continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j)
                std::swap(m(p, j), m(r, j));
        Rational inv = 1 / m(r, c);
        for (std::size_t j = 0; j < m.cols(); ++j)
            m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0)
                continue;
            Rational f = m(i, c);
            for (std::size_t j = 0; j < m.cols(); ++j)
                m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(RationalMatrix m) { return row_reduce(m).size(); }

inline Rational determinant(RationalMatrix m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = m.rows();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m(p, c) == 0)
            ++p;
        if (p == n)
            return 0;
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m(i, c) == 0)
                continue;
            Rational f = m(i, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j)
                m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

inline RationalMatrix inverse(const RationalMatrix& m) {
    const std::size_t n = m.rows();
    if (n != m.cols())
        throw std::invalid_argument("inverse of non-square matrix");
    RationalMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    auto piv = row_reduce(aug);
    if (piv.size() < n || piv[n - 1] != n - 1)
        throw std::domain_error("singular matrix");
    RationalMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv(i, j) = aug(i, n + j);
    return inv;
}

/// Symmetric non-degenerate bilinear form (u, v) = u^T G v.
class BilinearForm {
  public:
    BilinearForm() = default;
    explicit BilinearForm(RationalMatrix gram) : gram_(std::move(gram)) {
        if (gram_.rows() != gram_.cols() || gram_.rows() == 0)
            throw std::invalid_argument("bilinear form must be a non-empty square matrix");
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = i + 1; j < dim(); ++j)
                if (gram_(i, j) != gram_(j, i))
                    throw std::invalid_argument("bilinear form is not symmetric");
        if (determinant(gram_) == 0)
            throw std::invalid_argument("bilinear form is degenerate");
    }

    static BilinearForm euclidean(std::size_t n, const Rational& scale = 1) {
        return BilinearForm(RationalMatrix::identity(n, scale));
    }

    [[nodiscard]] std::size_t dim() const { return gram_.rows(); }
    [[nodiscard]] const RationalMatrix& gram() const { return gram_; }

    [[nodiscard]] Rational operator()(const RationalVector& u, const RationalVector& v) const {
        if (u.size() != dim() || v.size() != dim())
            throw std::invalid_argument("vector dimension does not match form");
        Rational s = 0;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (u[i] == 0)
                continue;
            for (std::size_t j = 0; j < dim(); ++j)
                s += u[i] * gram_(i, j) * v[j];
        }
        return s;
    }

    /// Covector components (v, e_i).
    [[nodiscard]] RationalVector lower(const RationalVector& v) const { return gram_ * v; }

    friend bool operator==(const BilinearForm& a, const BilinearForm& b) {
        return a.gram_ == b.gram_;
    }

  private:
    RationalMatrix gram_;
};

}  // namespace ellvee
