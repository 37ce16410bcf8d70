#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "crgeo/dual.hpp"

namespace crgeo {

// Largest supported chart dimension (m <= 3).
inline constexpr int kMaxDim = 7;

template <class S>
struct Vec {
    int n = 0;
    std::array<S, kMaxDim> a{};

    Vec() = default;
    explicit Vec(int size) : n(size) {
        if (size < 0 || size > kMaxDim) throw std::length_error("Vec size exceeds kMaxDim");
        for (int i = 0; i < n; ++i) a[i] = S(0.0);
    }
    Vec(std::initializer_list<S> init) : n(static_cast<int>(init.size())) {
        if (n > kMaxDim) throw std::length_error("Vec size exceeds kMaxDim");
        int i = 0;
        for (const S& s : init) a[i++] = s;
    }
    S& operator[](int i) { return a[i]; }
    const S& operator[](int i) const { return a[i]; }
    int size() const { return n; }

    Vec& operator+=(const Vec& o) { for (int i = 0; i < n; ++i) a[i] += o.a[i]; return *this; }
    Vec& operator-=(const Vec& o) { for (int i = 0; i < n; ++i) a[i] -= o.a[i]; return *this; }
};

// Row-major n x c matrix.
template <class S>
struct Mat {
    int r = 0;
    int c = 0;
    std::array<S, kMaxDim * kMaxDim> a{};

    Mat() = default;
    Mat(int rows, int cols) : r(rows), c(cols) {
        if (rows < 0 || cols < 0 || rows > kMaxDim || cols > kMaxDim) throw std::length_error("Mat shape exceeds kMaxDim");
        for (int i = 0; i < r * c; ++i) a[i] = S(0.0);
    }
    S& operator()(int i, int j) { return a[i * c + j]; }
    const S& operator()(int i, int j) const { return a[i * c + j]; }
    int rows() const { return r; }
    int cols() const { return c; }

    Vec<S> col(int j) const {
        Vec<S> v(r);
        for (int i = 0; i < r; ++i) v[i] = (*this)(i, j);
        return v;
    }
    Vec<S> row(int i) const {
        Vec<S> v(c);
        for (int j = 0; j < c; ++j) v[j] = (*this)(i, j);
        return v;
    }
    void set_col(int j, const Vec<S>& v) { for (int i = 0; i < r; ++i) (*this)(i, j) = v[i]; }
    void set_row(int i, const Vec<S>& v) { for (int j = 0; j < c; ++j) (*this)(i, j) = v[j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = S(1.0);
        return m;
    }
};

template <class S> using CVec = Vec<Cx<S>>;
template <class S> using CMat = Mat<Cx<S>>;

template <class S> Vec<S> operator+(Vec<S> x, const Vec<S>& y) { x += y; return x; }
template <class S> Vec<S> operator-(Vec<S> x, const Vec<S>& y) { x -= y; return x; }
template <class S> Vec<S> operator-(Vec<S> x) { for (int i = 0; i < x.n; ++i) x[i] = -x[i]; return x; }
template <class S, class F> Vec<S> operator*(const F& s, Vec<S> x) { for (int i = 0; i < x.n; ++i) x[i] = s * x[i]; return x; }

template <class S> S dot(const Vec<S>& x, const Vec<S>& y) {
    S s(0.0);
    for (int i = 0; i < x.n; ++i) s += x[i] * y[i];
    return s;
}

template <class S> Vec<S> matvec(const Mat<S>& m, const Vec<S>& x) {
    Vec<S> y(m.r);
    for (int i = 0; i < m.r; ++i) {
        S s(0.0);
        for (int j = 0; j < m.c; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

template <class S> Mat<S> matmul(const Mat<S>& x, const Mat<S>& y) {
    Mat<S> z(x.r, y.c);
    for (int i = 0; i < x.r; ++i)
        for (int k = 0; k < x.c; ++k) {
            const S& xik = x(i, k);
            for (int j = 0; j < y.c; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

template <class S> Mat<S> transpose(const Mat<S>& x) {
    Mat<S> y(x.c, x.r);
    for (int i = 0; i < x.r; ++i)
        for (int j = 0; j < x.c; ++j) y(j, i) = x(i, j);
    return y;
}

// x^T M y
template <class S> S bilinear(const Mat<S>& m, const Vec<S>& x, const Vec<S>& y) { return dot(x, matvec(m, y)); }

template <class S> CVec<S> to_complex(const Vec<S>& x) {
    CVec<S> z(x.n);
    for (int i = 0; i < x.n; ++i) z[i] = Cx<S>(x[i], S(0.0));
    return z;
}
template <class S> Vec<S> real_part(const CVec<S>& z) {
    Vec<S> x(z.n);
    for (int i = 0; i < z.n; ++i) x[i] = z[i].re;
    return x;
}
template <class S> Vec<S> imag_part(const CVec<S>& z) {
    Vec<S> x(z.n);
    for (int i = 0; i < z.n; ++i) x[i] = z[i].im;
    return x;
}
template <class S> CVec<S> conj(CVec<S> z) { for (int i = 0; i < z.n; ++i) z[i] = conj(z[i]); return z; }

// Real matrix acting on a complex vector.
template <class S> CVec<S> matvec(const Mat<S>& m, const CVec<S>& z) {
    CVec<S> y(m.r);
    for (int i = 0; i < m.r; ++i) {
        S re(0.0), im(0.0);
        for (int j = 0; j < m.c; ++j) {
            re += m(i, j) * z[j].re;
            im += m(i, j) * z[j].im;
        }
        y[i] = Cx<S>(re, im);
    }
    return y;
}

// Bilinear (not sesquilinear) pairing x^T M y over complex vectors with a real M.
template <class S> Cx<S> bilinear(const Mat<S>& m, const CVec<S>& x, const CVec<S>& y) {
    CVec<S> my = matvec(m, y);
    Cx<S> s(0.0);
    for (int i = 0; i < x.n; ++i) s += x[i] * my[i];
    return s;
}

// Real covector applied to a complex vector.
template <class S> Cx<S> apply(const Vec<S>& w, const CVec<S>& z) {
    S re(0.0), im(0.0);
    for (int i = 0; i < w.n; ++i) {
        re += w[i] * z[i].re;
        im += w[i] * z[i].im;
    }
    return {re, im};
}
// Complex covector applied to a complex vector.
template <class S> Cx<S> apply(const CVec<S>& w, const CVec<S>& z) {
    Cx<S> s(0.0);
    for (int i = 0; i < w.n; ++i) s += w[i] * z[i];
    return s;
}

class SingularMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solve A X = B by Gaussian elimination, pivoting on primal magnitudes.
template <class T>
Mat<T> solve(Mat<T> A, Mat<T> B, double tiny = 1e-14) {
    const int n = A.r;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = primal_abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = primal_abs(A(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (!(best > tiny)) throw SingularMatrix("singular linear system");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            for (int j = 0; j < B.c; ++j) std::swap(B(k, j), B(p, j));
        }
        for (int i = k + 1; i < n; ++i) {
            T f = A(i, k) / A(k, k);
            if (primal_abs(f) == 0.0) continue;
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
            for (int j = 0; j < B.c; ++j) B(i, j) -= f * B(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < B.c; ++j) {
            T s = B(k, j);
            for (int i = k + 1; i < n; ++i) s -= A(k, i) * B(i, j);
            B(k, j) = s / A(k, k);
        }
    }
    return B;
}

template <class T> Vec<T> solve(const Mat<T>& A, const Vec<T>& b, double tiny = 1e-14) {
    Mat<T> B(b.n, 1);
    for (int i = 0; i < b.n; ++i) B(i, 0) = b[i];
    return solve(A, B, tiny).col(0);
}

template <class T> Mat<T> inverse(const Mat<T>& A, double tiny = 1e-14) { return solve(A, Mat<T>::identity(A.r), tiny); }

inline double max_abs(const Vec<double>& x) {
    double m = 0.0;
    for (int i = 0; i < x.n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}
inline double max_abs(const CVec<double>& x) {
    double m = 0.0;
    for (int i = 0; i < x.n; ++i) m = std::max(m, primal_abs(x[i]));
    return m;
}
inline double max_abs(const Mat<double>& x) {
    double m = 0.0;
    for (int i = 0; i < x.r * x.c; ++i) m = std::max(m, std::abs(x.a[i]));
    return m;
}
inline double max_abs(const CMat<double>& x) {
    double m = 0.0;
    for (int i = 0; i < x.r * x.c; ++i) m = std::max(m, primal_abs(x.a[i]));
    return m;
}
inline double norm(const Vec<double>& x) { return std::sqrt(dot(x, x)); }

inline Vec<double> to_vec(const std::vector<double>& v) {
    Vec<double> x(static_cast<int>(v.size()));
    for (int i = 0; i < x.n; ++i) x[i] = v[i];
    return x;
}
inline std::vector<double> to_std(const Vec<double>& x) { return std::vector<double>(x.a.begin(), x.a.begin() + x.n); }

}  // namespace crgeo
