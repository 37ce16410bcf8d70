#include "crgeo/connection.hpp"

#include <algorithm>
#include <cmath>

#include "crgeo/calculus.hpp"
#include "detail.hpp"

namespace crgeo {

namespace {

ConnectionData from_kernel(const kernel::Conn<double>& K, const kernel::Ctx& c, const Vec<double>& p) {
    ConnectionData out;
    out.base = p;
    out.m = K.m;
    out.frame = detail::frame_from_local(K.jet.L, c, p);
    out.gamma = K.gam;
    out.brackets = K.brk;
    out.sigma = K.sigma;
    return out;
}

void check(const Christoffel& G) {
    for (double v : G.a) detail::require_finite(v, "connection coefficient");
}

}  // namespace

ConnectionData connection_at(const Structure& S, const AdaptedFrame& frame, const Vec<double>& p,
                             const DiffConfig& cfg) {
    S.chart.require_inside(p);
    kernel::Ctx c = detail::ctx_for(S, frame, cfg);
    return from_kernel(kernel::connection(c, p), c, p);
}

ConnectionData connection_at(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    kernel::Ctx c = detail::ctx_at(S, p, cfg);
    return from_kernel(kernel::connection(c, p), c, p);
}

Christoffel coordinate_christoffels(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    kernel::Ctx c = detail::ctx_at(S, p, cfg);
    auto t = kernel::christoffel(c, p);
    Christoffel G{t.n, std::move(t.a)};
    check(G);
    return G;
}

Vec<double> covariant_derivative(const Structure& S, const Vec<double>& p, const Vec<double>& X,
                                 const VectorField& Y, const DiffConfig& cfg) {
    Christoffel G = coordinate_christoffels(S, p, cfg);
    auto dy = directional([&](const auto& x) { return Y(x); }, p, X, cfg, cfg.fd_step);
    const int n = p.n;
    Vec<double> out = dy.deriv;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[k] += G(k, i, j) * X[i] * dy.value[j];
    return out;
}

CVec<double> covariant_derivative(const Structure& S, const Vec<double>& p, const CVec<double>& X,
                                  const ComplexVectorField& Y, const DiffConfig& cfg) {
    Christoffel G = coordinate_christoffels(S, p, cfg);
    auto py = partials([&](const auto& x) { return Y(x); }, p, cfg, cfg.fd_step);
    const int n = p.n;
    CVec<double> out(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            out[k] += X[i] * py.d[i][k];
            for (int j = 0; j < n; ++j) out[k] += G(k, i, j) * (X[i] * py.value[j]);
        }
    return out;
}

Vec<double> torsion(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                    const DiffConfig& cfg) {
    Christoffel G = coordinate_christoffels(S, p, cfg);
    const int n = p.n;
    Vec<double> out(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[k] += (G(k, i, j) - G(k, j, i)) * X[i] * Y[j];
    return out;
}

CVec<double> torsion(const Structure& S, const Vec<double>& p, const CVec<double>& X, const CVec<double>& Y,
                     const DiffConfig& cfg) {
    Christoffel G = coordinate_christoffels(S, p, cfg);
    const int n = p.n;
    CVec<double> out(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[k] += (G(k, i, j) - G(k, j, i)) * (X[i] * Y[j]);
    return out;
}

TorsionData torsion_decomposition(const ConnectionData& K, const Structure& S, const DiffConfig& cfg) {
    TorsionData t;
    const int m = K.m;
    const int n = K.dim();
    t.m = m;
    t.A_holo = CMat<double>(m, m);
    t.A_mixed = CMat<double>(m, m);
    t.T2.assign(static_cast<std::size_t>(m), CMat<double>(m, m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            t.A_holo(a, b) = K.torsion(1 + a, 0, 1 + b);
            t.A_mixed(a, b) = K.torsion(1 + a, 0, 1 + m + b);
            for (int g = 0; g < m; ++g) {
                t.T2[a](b, g) = K.torsion(1 + a, 1 + b, 1 + g);
                t.theta11 = std::max(t.theta11, primal_abs(K.torsion(1 + a, 1 + b, 1 + m + g)));
                t.theta02 = std::max(t.theta02, primal_abs(K.torsion(1 + a, 1 + m + b, 1 + m + g)));
            }
        }
    // tau = E * Tor0 * C restricted to real vectors.
    CMat<double> tor0(n, n);
    for (int A = 0; A < n; ++A)
        for (int B = 0; B < n; ++B) tor0(A, B) = K.torsion(A, 0, B);
    CMat<double> M = matmul(K.frame.E, matmul(tor0, K.frame.coframe));
    t.tau = Mat<double>(n, n);
    for (int i = 0; i < n * n; ++i) t.tau.a[i] = M.a[i].re;
    Mat<double> J = S.J(K.base);
    t.sigma = matmul(t.tau, J);
    Mat<double> JT = matmul(J, t.tau);
    for (int i = 0; i < n * n; ++i) t.sigma.a[i] += JT.a[i];
    (void)cfg;
    return t;
}

TorsionData torsion_decomposition(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    return torsion_decomposition(connection_at(S, p, cfg), S, cfg);
}

double ConnectionResiduals::max() const {
    return std::max({metric_frame, type, theta11, sigma_skew, torsion_zz, torsion_zbzb, torsion_levi, torsion_xi});
}

ConnectionResiduals connection_residuals(const ConnectionData& K, const CMat<double>& levi) {
    ConnectionResiduals r;
    const int m = K.m;
    const int n = K.dim();
    auto upd = [](double& acc, Cx<double> z) { acc = std::max(acc, primal_abs(z)); };
    for (int C = 0; C < n; ++C) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                upd(r.metric_frame, K.one_form(1 + a, 1 + b, C) + K.one_form(1 + m + b, 1 + m + a, C));
                upd(r.type, K.Gamma(1 + m + a, C, 1 + b));
                upd(r.type, K.Gamma(1 + a, C, 1 + m + b));
            }
        for (int B = 0; B < n; ++B) {
            upd(r.type, K.Gamma(0, C, B));
            upd(r.type, K.Gamma(B, C, 0));
        }
    }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            upd(r.sigma_skew, K.torsion(1 + a, 0, 1 + b) - conj(K.torsion(1 + b, 0, 1 + a)));
            upd(r.torsion_zz, K.torsion(0, 1 + a, 1 + b));
            upd(r.torsion_levi, K.torsion(0, 1 + a, 1 + m + b) - times_i(levi(a, b)) * 2.0);
            for (int g = 0; g < m; ++g) {
                upd(r.theta11, K.torsion(1 + a, 1 + b, 1 + m + g));
                upd(r.torsion_zbzb, K.torsion(1 + a, 1 + m + b, 1 + m + g));
            }
        }
    for (int B = 0; B < n; ++B) upd(r.torsion_xi, K.torsion(0, 0, B));
    return r;
}

CMat<double> levi_matrix(const Structure& S, const AdaptedFrame& f, const DiffConfig& cfg) {
    const int m = f.m();
    kernel::Ctx c{&S, cfg, {}};
    Mat<double> W = kernel::dtheta_at(c, f.base);
    Mat<double> J = S.J(f.base);
    CMat<double> L(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) L(a, b) = bilinear(W, f.eta[a], matvec(J, f.etabar[b]));
    return L;
}

double CoordinateAxioms::max() const {
    return std::max({nabla_g, nabla_J, nabla_xi, nabla_theta, torsion_antisym});
}

namespace {

template <class T>
struct Tensors {
    Mat<T> G, J;
    Vec<T> xi, th;
    template <class Ar> void io(Ar& ar) { ar(G, J, xi, th); }
};

}  // namespace

CoordinateAxioms coordinate_axioms(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    kernel::Ctx c = detail::ctx_at(S, p, cfg);
    auto K = kernel::connection(c, p);
    auto Gt = kernel::christoffel_from(K);
    const int n = p.n;
    auto jet = partials(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x[0])>;
            kernel::Local<T> L;
            L.th = S.theta(x);
            L.xi = kernel::reeb_at(c, x, L.th);
            L.H = S.h(x);
            Tensors<T> t{detail::metric_matrix_of(L), S.J(x), L.xi, L.th};
            return t;
        },
        p, cfg, cfg.fd_step);
    const Tensors<double>& v = jet.value;
    auto G = [&](int k, int i, int j) { return Gt(k, i, j); };
    CoordinateAxioms r;
    for (int k = 0; k < n; ++k) {
        const Tensors<double>& d = jet.d[k];
        for (int i = 0; i < n; ++i) {
            double nx = d.xi[i], nt = d.th[i];
            for (int l = 0; l < n; ++l) {
                nx += G(i, k, l) * v.xi[l];
                nt -= G(l, k, i) * v.th[l];
            }
            r.nabla_xi = std::max(r.nabla_xi, std::abs(nx));
            r.nabla_theta = std::max(r.nabla_theta, std::abs(nt));
            for (int j = 0; j < n; ++j) {
                double ng = d.G(i, j), nj = d.J(i, j);
                for (int l = 0; l < n; ++l) {
                    ng -= G(l, k, i) * v.G(l, j) + G(l, k, j) * v.G(i, l);
                    nj += G(i, k, l) * v.J(l, j) - G(l, k, j) * v.J(i, l);
                }
                r.nabla_g = std::max(r.nabla_g, std::abs(ng));
                r.nabla_J = std::max(r.nabla_J, std::abs(nj));
            }
        }
    }
    // Frame torsion mapped to coordinates versus the antisymmetric part of Gamma.
    const kernel::Local<double>& L = K.jet.L;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                Cx<double> s(0.0);
                for (int A = 0; A < n; ++A)
                    for (int C = 0; C < n; ++C)
                        for (int B = 0; B < n; ++B)
                            s += L.E(k, A) * K.tor(A, C, B) * L.C(C, i) * L.C(B, j);
                r.torsion_antisym = std::max(r.torsion_antisym, std::abs(s.re - (G(k, i, j) - G(k, j, i))));
            }
        }
    return r;
}

Classification classify(const Structure& S, const std::vector<Vec<double>>& points, double tol,
                        const DiffConfig& cfg) {
    Classification out;
    out.tol = tol;
    TwoFormField omega = kahler_form_field(S, cfg);
    for (const Vec<double>& p : points) {
        ConnectionData K = connection_at(S, p, cfg);
        TorsionData t = torsion_decomposition(K, S, cfg);
        const int m = K.m;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                out.sigma = std::max(out.sigma, primal_abs(t.A_holo(a, b)));
                // A^alphabar_beta = conj(A^alpha_betabar)
                out.tau_asym = std::max(out.tau_asym, primal_abs(conj(t.A_mixed(a, b)) - conj(t.A_mixed(b, a))));
                out.tau = std::max({out.tau, primal_abs(t.A_holo(a, b)), primal_abs(t.A_mixed(a, b))});
                for (int g = 0; g < m; ++g) out.theta20 = std::max(out.theta20, primal_abs(t.T2[a](b, g)));
            }
        // Independent path: exterior derivative of Omega = g(J., .).
        const int n = p.n;
        auto d = exterior_derivative2_components(S.chart, omega, p, cfg);
        auto dw = [&](const Vec<double>& X, const Vec<double>& Y, const Vec<double>& Z) {
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c) s += d[static_cast<std::size_t>((a * n + b) * n + c)] * X[a] * Y[b] * Z[c];
            return s;
        };
        for (double v : d) out.domega = std::max(out.domega, std::abs(v));
        std::vector<Vec<double>> hb;
        for (int i = 1; i < n; ++i) hb.push_back(K.frame.real_vec(i));
        for (std::size_t i = 0; i < hb.size(); ++i)
            for (std::size_t j = i + 1; j < hb.size(); ++j) {
                out.ixi_domega = std::max(out.ixi_domega, std::abs(dw(K.frame.eta0, hb[i], hb[j])));
                for (std::size_t k = j + 1; k < hb.size(); ++k)
                    out.domega_h = std::max(out.domega_h, std::abs(dw(hb[i], hb[j], hb[k])));
            }
    }
    out.horizontally_kahler = out.theta20 <= tol;
    out.pseudo_kahler = out.horizontally_kahler && out.sigma <= tol && out.tau_asym <= tol;
    out.sasakian_type = out.pseudo_kahler && out.tau <= tol;
    out.domega_horizontally_kahler = out.domega_h <= tol;
    out.domega_pseudo_kahler = out.domega <= tol;
    out.agrees = out.domega_horizontally_kahler == out.horizontally_kahler &&
                 out.domega_pseudo_kahler == out.pseudo_kahler;
    return out;
}

}  // namespace crgeo
