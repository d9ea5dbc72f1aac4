#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace locsym {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Dense row-major square matrix over an exact or floating scalar.
template <class T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, T(0)) {}
    SquareMatrix(int n, std::vector<T> entries) : n_(n), a_(std::move(entries)) {
        if (a_.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("SquareMatrix: wrong entry count");
    }

    static SquareMatrix identity(int n) {
        SquareMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int size() const { return n_; }
    T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<T>& entries() const { return a_; }

    SquareMatrix operator*(const SquareMatrix& b) const {
        SquareMatrix c(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const T& aik = (*this)(i, k);
                if (aik == T(0)) continue;
                for (int j = 0; j < n_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    bool operator==(const SquareMatrix& b) const { return n_ == b.n_ && a_ == b.a_; }

    SquareMatrix transpose() const {
        SquareMatrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    int n_ = 0;
    std::vector<T> a_;
};

// Gaussian elimination with partial pivoting (largest magnitude for floats,
// first nonzero for exact scalars).
template <class T>
T determinant(SquareMatrix<T> m) {
    const int n = m.size();
    T det(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        if constexpr (std::is_floating_point_v<T>) {
            T best(0);
            for (int r = c; r < n; ++r) {
                T v = m(r, c) < T(0) ? -m(r, c) : m(r, c);
                if (v > best) { best = v; piv = r; }
            }
        } else {
            for (int r = c; r < n; ++r)
                if (m(r, c) != T(0)) { piv = r; break; }
        }
        if (piv < 0 || m(piv, c) == T(0)) return T(0);
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            T f = m(r, c) / m(c, c);
            if (f == T(0)) continue;
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

template <class T>
SquareMatrix<T> inverse(const SquareMatrix<T>& m) {
    const int n = m.size();
    SquareMatrix<T> a = m;
    SquareMatrix<T> inv = SquareMatrix<T>::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        if constexpr (std::is_floating_point_v<T>) {
            T best(0);
            for (int r = c; r < n; ++r) {
                T v = a(r, c) < T(0) ? -a(r, c) : a(r, c);
                if (v > best) { best = v; piv = r; }
            }
        } else {
            for (int r = c; r < n; ++r)
                if (a(r, c) != T(0)) { piv = r; break; }
        }
        if (piv < 0 || a(piv, c) == T(0)) throw std::domain_error("inverse: singular matrix");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        const T p = a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) /= p;
            inv(c, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const T f = a(r, c);
            if (f == T(0)) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

} // namespace locsym
