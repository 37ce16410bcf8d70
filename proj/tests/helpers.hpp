#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crgeo/linalg.hpp"

namespace crgeo::test {

// Constant vector promoted to the scalar type of x.
template <class T>
Vec<T> lift_vec(const Vec<double>& v, const Vec<T>&) {
    Vec<T> out(v.n);
    for (int i = 0; i < v.n; ++i) out[i] = T(v[i]);
    return out;
}

template <class T>
Vec<T> linear_field(const Mat<double>& A, const Vec<T>& x) {
    Vec<T> out(A.r);
    for (int i = 0; i < A.r; ++i)
        for (int j = 0; j < A.c; ++j) out[i] += A(i, j) * x[j];
    return out;
}

inline Mat<double> mat3(std::initializer_list<double> v) {
    Mat<double> M(3, 3);
    int k = 0;
    for (double x : v) M.a[static_cast<std::size_t>(k++)] = x;
    return M;
}

inline double max_abs_diff(const Vec<double>& a, const Vec<double>& b) { return max_abs(a - b); }
inline double max_abs_diff(const Mat<double>& a, const Mat<double>& b) {
    double m = 0.0;
    for (int i = 0; i < a.r * a.c; ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

}  // namespace crgeo::test
