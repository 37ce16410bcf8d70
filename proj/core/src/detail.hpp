#pragma once

#include "crgeo/cr.hpp"
#include "kernel.hpp"

namespace crgeo::detail {

kernel::Ctx ctx_for(const Structure& S, const AdaptedFrame& f, const DiffConfig& cfg);
kernel::Ctx ctx_at(const Structure& S, const Vec<double>& p, const DiffConfig& cfg, bool prefer_analytic = true);
AdaptedFrame frame_from_local(const kernel::Local<double>& L, const kernel::Ctx& c, const Vec<double>& p);

template <class T>
Mat<T> metric_matrix_of(const kernel::Local<T>& L) {
    const int n = L.th.n;
    Mat<T> PH = Mat<T>::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) PH(i, j) -= L.xi[i] * L.th[j];
    Mat<T> G = matmul(transpose(PH), matmul(L.H, PH));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) += L.th[i] * L.th[j];
    return G;
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite ") + what);
}

}  // namespace crgeo::detail
