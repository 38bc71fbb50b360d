#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ust/errors.hpp"

namespace ust {

/// Exact probability. All arithmetic in the exact layer is rational; nothing rounds.
class ExactProb {
public:
    ExactProb() = default;
    explicit ExactProb(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }
    ExactProb(long num, long den) : value_(num, den) { value_.canonicalize(); }

    const mpq_class& value() const noexcept { return value_; }
    double to_double() const { return value_.get_d(); }

    /// "num/den" in lowest terms ("3/4", "1/1", "0/1").
    std::string fraction() const { return value_.get_num().get_str() + "/" + value_.get_den().get_str(); }

    /// Decimal rendering truncated to `digits` significant digits.
    std::string decimal(int digits = 40) const { return to_decimal(value_, digits); }

    static std::string to_decimal(const mpq_class& q, int digits) {
        if (q == 0) return "0";
        std::string out = q < 0 ? "-" : "";
        mpz_class num = abs(q.get_num());
        const mpz_class& den = q.get_den();
        mpz_class ip = num / den;
        mpz_class rem = num % den;
        out += ip.get_str();
        int significant = ip == 0 ? 0 : static_cast<int>(ip.get_str().size());
        if (rem == 0 || significant >= digits) return out;
        out += '.';
        while (rem != 0 && significant < digits) {
            rem *= 10;
            mpz_class digit = rem / den;
            rem %= den;
            out += digit.get_str();
            if (significant > 0 || digit != 0) ++significant;
        }
        return out;
    }

    friend bool operator==(const ExactProb& a, const ExactProb& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const ExactProb& a, const ExactProb& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    mpq_class value_{0};
};

/// Number of spanning trees; parallel edges yield distinct trees.
using TreeCount = mpz_class;

template <class T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Fraction-free (Bareiss) determinant of a square integer matrix.
inline mpz_class bareiss_determinant(DenseMatrix<mpz_class> a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw PreconditionError("determinant of a non-square matrix");
    if (n == 0) return 1;
    int sign = 1;
    mpz_class prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class t = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = std::move(t);
            }
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

/// Solves A x = B (B may hold several right-hand sides as columns) by exact Gaussian
/// elimination, pivoting on the first nonzero entry of each column. Returns nullopt when A
/// is singular.
inline std::optional<DenseMatrix<mpq_class>> solve_exact(DenseMatrix<mpq_class> a, DenseMatrix<mpq_class> b) {
    const std::size_t n = a.rows();
    if (n != a.cols() || b.rows() != n) throw PreconditionError("solve_exact: dimension mismatch");
    const std::size_t m = b.cols();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) return std::nullopt;
        a.swap_rows(k, p);
        b.swap_rows(k, p);
        const mpq_class inv = 1 / a(k, k);
        for (std::size_t j = k; j < n; ++j) a(k, j) *= inv;
        for (std::size_t j = 0; j < m; ++j) b(k, j) *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0) continue;
            const mpq_class f = a(i, k);
            for (std::size_t j = k; j < n; ++j)
                if (a(k, j) != 0) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < m; ++j)
                if (b(k, j) != 0) b(i, j) -= f * b(k, j);
        }
    }
    return b;
}

}  // namespace ust
