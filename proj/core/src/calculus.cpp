#include "crgeo/calculus.hpp"

#include <cmath>

#include "crgeo/diff.hpp"

namespace crgeo {
namespace {

void check_finite(double x) {
    if (!std::isfinite(x)) throw NumericalError("non-finite derivative");
}
void check_finite(const Vec<double>& v) {
    for (int i = 0; i < v.n; ++i) check_finite(v[i]);
}
void check_finite(const CVec<double>& v) {
    for (int i = 0; i < v.n; ++i) {
        check_finite(v[i].re);
        check_finite(v[i].im);
    }
}

void require(const Chart& chart, const Vec<double>& p) { chart.require_inside(p); }

}  // namespace

double directional_derivative(const Chart& chart, const ScalarField& f, const Vec<double>& p, const Vec<double>& v,
                              const DiffConfig& cfg) {
    require(chart, p);
    auto r = directional([&](const auto& x) { return f(x); }, p, v, cfg, cfg.fd_step);
    check_finite(r.deriv);
    return r.deriv;
}

Vec<double> lie_bracket(const Chart& chart, const VectorField& X, const VectorField& Y, const Vec<double>& p,
                        const DiffConfig& cfg) {
    require(chart, p);
    Vec<double> xv = X(p), yv = Y(p);
    auto dy = directional([&](const auto& x) { return Y(x); }, p, xv, cfg, cfg.fd_step);
    auto dx = directional([&](const auto& x) { return X(x); }, p, yv, cfg, cfg.fd_step);
    Vec<double> out = dy.deriv - dx.deriv;
    check_finite(out);
    return out;
}

CVec<double> lie_bracket(const Chart& chart, const ComplexVectorField& X, const ComplexVectorField& Y,
                         const Vec<double>& p, const DiffConfig& cfg) {
    require(chart, p);
    const int n = p.n;
    auto px = partials([&](const auto& x) { return X(x); }, p, cfg, cfg.fd_step);
    auto py = partials([&](const auto& x) { return Y(x); }, p, cfg, cfg.fd_step);
    CVec<double> out(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out[i] += px.value[j] * py.d[j][i] - py.value[j] * px.d[j][i];
    check_finite(out);
    return out;
}

Mat<double> exterior_derivative_matrix(const Chart& chart, const OneFormField& w, const Vec<double>& p,
                                       const DiffConfig& cfg) {
    require(chart, p);
    const int n = p.n;
    auto jet = partials([&](const auto& x) { return w(x); }, p, cfg, cfg.fd_step);
    Mat<double> W(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) W(i, j) = 0.5 * (jet.d[i][j] - jet.d[j][i]);
    for (int i = 0; i < n * n; ++i) check_finite(W.a[i]);
    return W;
}

double exterior_derivative(const Chart& chart, const OneFormField& w, const Vec<double>& p, const Vec<double>& X,
                           const Vec<double>& Y, const DiffConfig& cfg) {
    return bilinear(exterior_derivative_matrix(chart, w, p, cfg), X, Y);
}

Cx<double> exterior_derivative(const Chart& chart, const OneFormField& w, const Vec<double>& p,
                               const CVec<double>& X, const CVec<double>& Y, const DiffConfig& cfg) {
    return bilinear(exterior_derivative_matrix(chart, w, p, cfg), X, Y);
}

double exterior_derivative(const Chart& chart, const OneFormField& w, const VectorField& X, const VectorField& Y,
                           const Vec<double>& p, const DiffConfig& cfg) {
    require(chart, p);
    Vec<double> xv = X(p), yv = Y(p);
    auto wy = directional([&](const auto& x) { return dot(w(x), Y(x)); }, p, xv, cfg, cfg.fd_step);
    auto wx = directional([&](const auto& x) { return dot(w(x), X(x)); }, p, yv, cfg, cfg.fd_step);
    Vec<double> br = lie_bracket(chart, X, Y, p, cfg);
    double out = 0.5 * (wy.deriv - wx.deriv - dot(w(p), br));
    check_finite(out);
    return out;
}

TwoFormField wedge_1_1(const OneFormField& a, const OneFormField& b) {
    return TwoFormField([a, b](const auto& x) {
        auto av = a(x);
        auto bv = b(x);
        using T = std::decay_t<decltype(av[0])>;
        Mat<T> m(x.n, x.n);
        for (int i = 0; i < x.n; ++i)
            for (int j = 0; j < x.n; ++j) m(i, j) = 0.5 * (av[i] * bv[j] - av[j] * bv[i]);
        return m;
    });
}

double eval_two_form(const Mat<double>& w, const Vec<double>& X, const Vec<double>& Y) { return bilinear(w, X, Y); }

Cx<double> eval_two_form(const Mat<double>& w, const CVec<double>& X, const CVec<double>& Y) {
    return bilinear(w, X, Y);
}

std::vector<double> exterior_derivative2_components(const Chart& chart, const TwoFormField& w,
                                                    const Vec<double>& p, const DiffConfig& cfg) {
    require(chart, p);
    const int n = p.n;
    auto jet = partials([&](const auto& x) { return w(x); }, p, cfg, cfg.fd_step);
    std::vector<double> out(static_cast<std::size_t>(n * n * n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double v = (jet.d[a](b, c) - jet.d[b](a, c) + jet.d[c](a, b)) / 3.0;
                check_finite(v);
                out[static_cast<std::size_t>((a * n + b) * n + c)] = v;
            }
    return out;
}

double exterior_derivative2(const Chart& chart, const TwoFormField& w, const Vec<double>& p, const Vec<double>& X,
                            const Vec<double>& Y, const Vec<double>& Z, const DiffConfig& cfg) {
    const int n = p.n;
    auto d = exterior_derivative2_components(chart, w, p, cfg);
    double s = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) s += d[static_cast<std::size_t>((a * n + b) * n + c)] * X[a] * Y[b] * Z[c];
    return s;
}

}  // namespace crgeo
