#include "crgeo/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "detail.hpp"

namespace crgeo {

namespace {

using kernel::bar;
using C = Cx<double>;

template <class T>
struct Pack {
    kernel::Tensor3<T> G;
    std::vector<CMat<T>> gam;
    std::vector<CVec<T>> brk;
    CMat<T> E, Co;
    Mat<T> J;
    template <class Ar> void io(Ar& ar) { ar(G, gam, brk, E, Co, J); }
};

// Everything at p that needs one derivative of the connection.
struct Analysis {
    int n = 0, m = 0;
    kernel::Ctx ctx;
    Partials<Pack<double>> P;
    CurvatureData R;

    const Pack<double>& v() const { return P.value; }
    // frame derivative eta_D(f) given coordinate partial accessor
    template <class F>
    C along(int D, const F& f) const {
        C s(0.0);
        for (int i = 0; i < n; ++i) s += v().E(i, D) * f(P.d[static_cast<std::size_t>(i)]);
        return s;
    }
    C gam(int A, int Cc, int B) const { return v().gam[static_cast<std::size_t>(Cc)](A, B); }
    C tor(int A, int Cc, int B) const { return tor_of(v(), A, Cc, B); }
    static C tor_of(const Pack<double>& k, int A, int Cc, int B) {
        const int nn = k.E.r;
        return k.gam[static_cast<std::size_t>(Cc)](A, B) - k.gam[static_cast<std::size_t>(B)](A, Cc) -
               k.brk[static_cast<std::size_t>(Cc * nn + B)][A];
    }
    // (nabla_{eta_Cd} T)^A(eta_B, eta_D)
    C DT(int A, int B, int D, int Cd) const {
        C s = along(Cd, [&](const Pack<double>& d) { return tor_of(d, A, B, D); });
        for (int E = 0; E < n; ++E)
            s += -tor(A, E, D) * gam(E, Cd, B) - tor(A, B, E) * gam(E, Cd, D) + tor(E, B, D) * gam(A, Cd, E);
        return s;
    }
};

Analysis analyze(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    Analysis a;
    a.n = p.n;
    a.m = (p.n - 1) / 2;
    a.ctx = detail::ctx_at(S, p, cfg);
    const kernel::Ctx& c = a.ctx;
    a.P = partials(
        [&](const auto& y) {
            using T = std::decay_t<decltype(y[0])>;
            auto K = kernel::connection(c, y);
            Pack<T> pk;
            pk.G = kernel::christoffel_from(K);
            pk.gam = K.gam;
            pk.brk = K.brk;
            pk.E = K.jet.L.E;
            pk.Co = K.jet.L.C;
            pk.J = K.jet.L.J;
            return pk;
        },
        p, cfg, c.step());

    const int n = a.n, m = a.m;
    Partials<kernel::Tensor3<double>> gj;
    gj.value = a.P.value.G;
    gj.value.n = n;
    for (auto& d : a.P.d) {
        gj.d.push_back(d.G);
        gj.d.back().n = n;
    }
    CurvatureData& R = a.R;
    R.base = p;
    R.m = m;
    R.Rc = kernel::riemann_from(gj);
    for (double x : R.Rc) detail::require_finite(x, "curvature component");

    kernel::Local<double> L = kernel::local_at(c, p);
    R.frame = detail::frame_from_local(L, c, p);
    R.g = detail::metric_matrix_of(L);

    // Frame components by successive contraction.
    const auto& E = a.v().E;
    const auto& Co = a.v().Co;
    const std::size_t n4 = static_cast<std::size_t>(n * n * n * n);
    std::vector<C> t1(n4), t2(n4), t3(n4);
    auto id = [n](int i, int j, int k, int l) { return static_cast<std::size_t>(((i * n + j) * n + k) * n + l); };
    for (int k = 0; k < n; ++k)
        for (int cc = 0; cc < n; ++cc)
            for (int aa = 0; aa < n; ++aa)
                for (int D = 0; D < n; ++D) {
                    C s(0.0);
                    for (int b = 0; b < n; ++b) s += R.Rc[id(k, cc, aa, b)] * E(b, D);
                    t1[id(k, cc, aa, D)] = s;
                }
    for (int k = 0; k < n; ++k)
        for (int cc = 0; cc < n; ++cc)
            for (int Cc = 0; Cc < n; ++Cc)
                for (int D = 0; D < n; ++D) {
                    C s(0.0);
                    for (int aa = 0; aa < n; ++aa) s += t1[id(k, cc, aa, D)] * E(aa, Cc);
                    t2[id(k, cc, Cc, D)] = s;
                }
    for (int k = 0; k < n; ++k)
        for (int B = 0; B < n; ++B)
            for (int Cc = 0; Cc < n; ++Cc)
                for (int D = 0; D < n; ++D) {
                    C s(0.0);
                    for (int cc = 0; cc < n; ++cc) s += t2[id(k, cc, Cc, D)] * E(cc, B);
                    t3[id(k, B, Cc, D)] = s;
                }
    R.R.assign(n4, C(0.0));
    for (int A = 0; A < n; ++A)
        for (int B = 0; B < n; ++B)
            for (int Cc = 0; Cc < n; ++Cc)
                for (int D = 0; D < n; ++D) {
                    C s(0.0);
                    for (int k = 0; k < n; ++k) s += Co(A, k) * t3[id(k, B, Cc, D)];
                    R.R[id(A, B, Cc, D)] = s;
                }

    for (int al = 0; al < m; ++al) {
        const Vec<double>& e = R.frame.e[static_cast<std::size_t>(al)];
        const Vec<double>& je = R.frame.Je[static_cast<std::size_t>(al)];
        R.K_theta.push_back(R.scalar(e, je, e, je));
    }
    R.ric_b = CMat<double>(m, m);
    R.ric_b_conj = CMat<double>(m, m);
    for (int l = 0; l < m; ++l)
        for (int mu = 0; mu < m; ++mu) {
            C s(0.0), t(0.0);
            for (int al = 0; al < m; ++al) {
                s += R.frame_component(1 + al, 1 + l, 1 + al, 1 + m + mu);
                t += R.frame_component(1 + m + al, 1 + m + mu, 1 + m + al, 1 + l);
            }
            R.ric_b(l, mu) = s;
            R.ric_b_conj(l, mu) = t;
        }
    for (int al = 0; al < m; ++al) {
        R.rho += R.ric_b(al, al).re;
        R.rho_M += R.ric_b(al, al).re + R.ric_b_conj(al, al).re;
    }
    return a;
}

void upd(double& acc, C z) { acc = std::max(acc, primal_abs(z)); }

C two_i(C z) { return times_i(z) * 2.0; }

}  // namespace

Vec<double> CurvatureData::apply(const Vec<double>& X, const Vec<double>& Y, const Vec<double>& Z) const {
    const int n = dim();
    Vec<double> out(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int c = 0; c < n; ++c)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += Rc[static_cast<std::size_t>(((k * n + c) * n + a) * n + b)] * Z[c] * X[a] * Y[b];
        out[k] = s;
    }
    return out;
}

double CurvatureData::scalar(const Vec<double>& X, const Vec<double>& Y, const Vec<double>& Z,
                             const Vec<double>& W) const {
    return bilinear(g, X, apply(Z, W, Y));
}

double CurvatureData::ricci(const Vec<double>& X, const Vec<double>& Y) const {
    const int n = dim();
    double s = 0.0;
    for (int k = 0; k < n; ++k)
        for (int c = 0; c < n; ++c)
            for (int b = 0; b < n; ++b) s += Rc[static_cast<std::size_t>(((k * n + c) * n + k) * n + b)] * X[c] * Y[b];
    return s;
}

CurvatureData curvature_components(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    return analyze(S, p, cfg).R;
}

Vec<double> curvature(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                      const Vec<double>& Z, const DiffConfig& cfg) {
    return curvature_components(S, p, cfg).apply(X, Y, Z);
}

Vec<double> curvature(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                      const VectorField& Z, const DiffConfig& cfg) {
    S.chart.require_inside(p);
    kernel::Ctx c = detail::ctx_at(S, p, cfg);
    const int n = p.n;
    // nabla_V Z as a field, evaluated at any scalar.
    auto nab = [&](const Vec<double>& V) {
        return [&, V](const auto& x) {
            using T = std::decay_t<decltype(x[0])>;
            Vec<T> Vt(n);
            for (int i = 0; i < n; ++i) Vt[i] = T(V[i]);
            auto dz = directional([&](const auto& y) { return Z(y); }, x, Vt, cfg, cfg.fd_step);
            auto G = kernel::christoffel(c, x);
            Vec<T> out = dz.deriv;
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) out[k] += G(k, i, j) * Vt[i] * dz.value[j];
            return out;
        };
    };
    auto G = kernel::christoffel(c, p);
    auto second = [&](const Vec<double>& A, const Vec<double>& B) {
        auto d = directional(nab(B), p, A, cfg, c.step());
        Vec<double> out = d.deriv;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out[k] += G(k, i, j) * A[i] * d.value[j];
        return out;
    };
    Vec<double> r = second(X, Y) - second(Y, X);
    for (int i = 0; i < n; ++i) detail::require_finite(r[i], "curvature");
    return r;
}

double curvature_scalar(const Structure& S, const Vec<double>& p, const Vec<double>& X, const Vec<double>& Y,
                        const Vec<double>& Z, const Vec<double>& W, const DiffConfig& cfg) {
    return curvature_components(S, p, cfg).scalar(X, Y, Z, W);
}

double StructureResiduals::max() const { return std::max({first, second, dtheta_levi, metric_skew}); }

StructureResiduals structure_equation_residuals(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    Analysis a = analyze(S, p, cfg);
    const int n = a.n, m = a.m;
    const auto& v = a.v();
    StructureResiduals r;
    // d omega(eta_C, eta_D) for a 1-form with coordinate jets.
    auto d1 = [&](const auto& comp, int Cc, int D) {
        C s(0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                C w = (comp(a.P.d[static_cast<std::size_t>(i)], j) - comp(a.P.d[static_cast<std::size_t>(j)], i)) * 0.5;
                s += w * v.E(i, Cc) * v.E(j, D);
            }
        return s;
    };
    // First structure equation: d theta^alpha = -theta^alpha_B ^ theta^B + 1/2 T^alpha.
    for (int al = 0; al < m; ++al) {
        const int A = 1 + al;
        auto comp = [A](const Pack<double>& k, int j) { return k.Co(A, j); };
        for (int Cc = 0; Cc < n; ++Cc)
            for (int D = 0; D < n; ++D) {
                C lhs = d1(comp, Cc, D);
                auto is_h = [m](int X) { return X >= 1 && X <= m; };
                C T(0.0);
                if (Cc == 0 && D != 0) T += a.tor(A, 0, D);
                if (D == 0 && Cc != 0) T -= a.tor(A, 0, Cc);
                if (is_h(Cc) && is_h(D)) T += a.tor(A, Cc, D);
                C rhs = (a.gam(A, Cc, D) - a.gam(A, D, Cc)) * (-0.5) + T * 0.5;
                upd(r.first, lhs - rhs);
            }
    }
    // Second structure equation with theta^alpha_beta = Gamma^alpha_{C beta} theta^C.
    for (int al = 0; al < m; ++al)
        for (int be = 0; be < m; ++be) {
            const int A = 1 + al, B = 1 + be;
            // product rule on sum_C Gamma^A_{C B} Co(C, j)
            auto dform = [&](int i, int j) {
                const Pack<double>& d = a.P.d[static_cast<std::size_t>(i)];
                C s(0.0);
                for (int Cc = 0; Cc < n; ++Cc)
                    s += d.gam[static_cast<std::size_t>(Cc)](A, B) * v.Co(Cc, j) +
                         v.gam[static_cast<std::size_t>(Cc)](A, B) * d.Co(Cc, j);
                return s;
            };
            for (int Ee = 0; Ee < n; ++Ee)
                for (int F = 0; F < n; ++F) {
                    C lhs(0.0);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) lhs += (dform(i, j) - dform(j, i)) * 0.5 * v.E(i, Ee) * v.E(j, F);
                    C quad(0.0);
                    for (int G = 0; G < n; ++G)
                        quad += a.gam(A, Ee, G) * a.gam(G, F, B) - a.gam(A, F, G) * a.gam(G, Ee, B);
                    upd(r.second, lhs + quad * 0.5 - a.R.frame_component(A, B, Ee, F) * 0.5);
                }
        }
    // d theta = 2i L_{alpha betabar} theta^alpha ^ theta^betabar
    CMat<double> levi = levi_matrix(S, a.R.frame, cfg);
    auto th = [](const Pack<double>& k, int j) { return k.Co(0, j); };
    for (int Cc = 0; Cc < n; ++Cc)
        for (int D = 0; D < n; ++D) {
            C rhs(0.0);
            for (int x = 0; x < m; ++x)
                for (int y = 0; y < m; ++y) {
                    double w = (Cc == 1 + x && D == 1 + m + y ? 1.0 : 0.0) - (D == 1 + x && Cc == 1 + m + y ? 1.0 : 0.0);
                    if (w != 0.0) rhs += times_i(levi(x, y)) * w;
                }
            upd(r.dtheta_levi, d1(th, Cc, D) - rhs);
        }
    for (int Cc = 0; Cc < n; ++Cc)
        for (int x = 0; x < m; ++x)
            for (int y = 0; y < m; ++y) upd(r.metric_skew, a.gam(1 + x, Cc, 1 + y) + a.gam(1 + m + y, Cc, 1 + m + x));
    return r;
}

double BianchiResiduals::max() const {
    double s = std::max({ricci_contraction, vertical_and_type, antisymmetry, metric_skew});
    for (double x : identity) s = std::max(s, x);
    if (simplified_applicable)
        for (double x : simplified) s = std::max(s, x);
    return s;
}

BianchiResiduals bianchi_residuals(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    Analysis a = analyze(S, p, cfg);
    const int n = a.n, m = a.m;
    const auto& v = a.v();
    const CurvatureData& R = a.R;
    BianchiResiduals r;

    // L(eta_A, eta_B) = dtheta(eta_A, J eta_B)
    Mat<double> W(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) W(i, j) = 0.5 * (a.P.d[static_cast<std::size_t>(i)].Co(0, j).re - a.P.d[static_cast<std::size_t>(j)].Co(0, i).re);
    auto Lf = [&](int A, int B) { return bilinear(W, v.E.col(A), matvec(v.J, v.E.col(B))); };
    auto Rf = [&](int A, int B, int Cc, int D) { return R.frame_component(A, B, Cc, D); };
    auto At = [&](int A, int B) { return a.tor(A, 0, B); };
    auto T = [&](int A, int B, int D) { return a.tor(A, B, D); };
    auto DT = [&](int A, int B, int D, int Cd) { return a.DT(A, B, D, Cd); };
    auto b = [m](int X) { return bar(X, m); };

    double sig = 0.0, t20 = 0.0;
    for (int x = 1; x <= m; ++x)
        for (int y = 1; y <= m; ++y) {
            sig = std::max(sig, primal_abs(At(x, y)));
            for (int z = 1; z <= m; ++z) t20 = std::max(t20, primal_abs(T(x, y, z)));
        }
    r.simplified_applicable = sig <= 1e-6 && t20 <= 1e-6;

    for (int al = 1; al <= m; ++al)
        for (int be = 1; be <= m; ++be)
            for (int la = 1; la <= m; ++la)
                for (int mu = 1; mu <= m; ++mu) {
                    upd(r.identity[0], Rf(al, be, la, mu) - two_i(Lf(b(al), la) * At(b(be), mu) - Lf(b(al), mu) * At(b(be), la)));
                    upd(r.identity[1], Rf(al, be, b(la), b(mu)) -
                                           two_i(Lf(be, b(la)) * At(al, b(mu)) - Lf(be, b(mu)) * At(al, b(la))));
                    C s3 = DT(b(be), 0, b(al), mu) - DT(b(be), 0, mu, b(al));
                    C s4 = DT(al, 0, b(mu), be) - DT(al, 0, be, b(mu));
                    C s6 = DT(al, 0, mu, be) - DT(al, 0, be, mu) - DT(al, be, mu, 0);
                    for (int l = 1; l <= m; ++l) {
                        s3 += T(b(be), b(al), b(l)) * At(b(l), mu);
                        s4 -= T(al, be, l) * At(l, b(mu));
                        s6 += At(al, l) * T(l, be, mu) - (T(al, be, l) * At(l, mu) - T(al, mu, l) * At(l, be));
                    }
                    upd(r.identity[2], Rf(al, be, 0, mu) - s3);
                    upd(r.identity[3], Rf(al, be, 0, b(mu)) - s4);
                    upd(r.identity[4], Rf(al, be, la, b(mu)) - Rf(al, la, be, b(mu)) -
                                           (DT(al, be, la, b(mu)) + two_i(At(al, be) * Lf(la, b(mu)) - At(al, la) * Lf(be, b(mu)))));
                    upd(r.identity[5], Rf(al, be, 0, mu) - Rf(al, mu, 0, be) - s6);
                    C s7 = DT(al, 0, b(be), b(la)) - DT(al, 0, b(la), b(be));
                    for (int l = 1; l <= m; ++l) s7 -= At(al, b(l)) * T(b(l), b(be), b(la));
                    upd(r.identity[6], s7);

                    upd(r.simplified[0], Rf(al, be, 0, mu) + DT(b(be), 0, mu, b(al)));
                    upd(r.simplified[1], Rf(al, be, 0, b(mu)) - DT(al, 0, b(mu), be));
                    upd(r.simplified[2], Rf(al, be, la, b(mu)) - Rf(al, la, be, b(mu)));
                    upd(r.simplified[3], DT(al, 0, b(be), b(la)) - DT(al, 0, b(la), b(be)));
                }

    // Ricci via the coordinate trace against the frame contraction.
    for (int l = 0; l < m; ++l)
        for (int mu = 0; mu < m; ++mu) {
            const CVec<double> X = v.E.col(1 + l), Y = v.E.col(1 + m + mu);
            C s(0.0);
            for (int k = 0; k < n; ++k)
                for (int c = 0; c < n; ++c)
                    for (int bb = 0; bb < n; ++bb)
                        s += R.Rc[static_cast<std::size_t>(((k * n + c) * n + k) * n + bb)] * X[c] * Y[bb];
            upd(r.ricci_contraction, s - R.ric_b(l, mu));
        }

    // Metric skew with lowered index: R_{ABCD} = g(eta_A, eta_E) R^E_{BCD}.
    auto lower = [&](int A, int B, int Cc, int D) {
        C s(0.0);
        for (int E = 0; E < n; ++E) s += bilinear(R.g, v.E.col(A), v.E.col(E)) * Rf(E, B, Cc, D);
        return s;
    };
    for (int B = 0; B < n; ++B)
        for (int Cc = 0; Cc < n; ++Cc)
            for (int D = 0; D < n; ++D) {
                upd(r.vertical_and_type, Rf(0, B, Cc, D));
                upd(r.vertical_and_type, Rf(B, 0, Cc, D));
                for (int x = 1; x <= m; ++x)
                    for (int y = 1; y <= m; ++y) upd(r.vertical_and_type, Rf(x, b(y), Cc, D));
                for (int A = 0; A < n; ++A) upd(r.antisymmetry, Rf(A, B, Cc, D) + Rf(A, B, D, Cc));
                for (int x = 1; x <= m; ++x) upd(r.metric_skew, lower(b(x), B, Cc, D) + lower(B, b(x), Cc, D));
            }
    return r;
}

double sectional(const CurvatureData& R, const Vec<double>& v1, const Vec<double>& v2) {
    double a = bilinear(R.g, v1, v1), b = bilinear(R.g, v1, v2), c = bilinear(R.g, v2, v2);
    double area2 = a * c - b * b;
    if (!(area2 >= 1e-20)) throw ContractViolation("degenerate plane");
    Vec<double> e1 = (1.0 / std::sqrt(a)) * v1;
    Vec<double> w = v2 - (b / a) * v1;
    Vec<double> e2 = (1.0 / std::sqrt(bilinear(R.g, w, w))) * w;
    return R.scalar(e1, e2, e1, e2);
}

double sectional(const Structure& S, const Vec<double>& p, const Vec<double>& v1, const Vec<double>& v2,
                 const DiffConfig& cfg) {
    return sectional(curvature_components(S, p, cfg), v1, v2);
}

double pseudo_hermitian_sectional(const CurvatureData& R, const Structure& S, const Vec<double>& e) {
    const Vec<double>& p = R.base;
    Vec<double> th = S.theta(p);
    Vec<double> h = e - dot(th, e) * R.frame.eta0;
    Vec<double> jh = matvec(S.J(p), h);
    return sectional(R, h, jh);
}

double pseudo_hermitian_sectional(const Structure& S, const Vec<double>& p, const Vec<double>& e,
                                  const DiffConfig& cfg) {
    return pseudo_hermitian_sectional(curvature_components(S, p, cfg), S, e);
}

RicciData ricci_and_scalar(const CurvatureData& R) {
    RicciData out;
    const int n = R.dim();
    out.ric = Mat<double>(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += R.Rc[static_cast<std::size_t>(((k * n + i) * n + k) * n + j)];
            out.ric(i, j) = s;
        }
    out.ric_b = R.ric_b;
    out.ric_b_conj = R.ric_b_conj;
    out.rho = R.rho;
    out.rho_M = R.rho_M;
    for (int B = 0; B < n; ++B)
        for (int D = 0; D < n; ++D) upd(out.vertical_trace, R.frame_component(0, B, 0, D));
    return out;
}

RicciData ricci_and_scalar(const Structure& S, const Vec<double>& p, const DiffConfig& cfg) {
    return ricci_and_scalar(curvature_components(S, p, cfg));
}

double space_form_tensor(const Structure& S, const Vec<double>& p, double c, const Vec<double>& X,
                         const Vec<double>& Y, const Vec<double>& Z, const Vec<double>& W, const DiffConfig& cfg) {
    Mat<double> G = metric_matrix(S, p, cfg);
    Mat<double> J = S.J(p);
    auto h = [&](const Vec<double>& v) { return project_H(S, p, v, cfg); };
    Vec<double> x = h(X), y = h(Y), z = h(Z), w = h(W);
    auto ip = [&](const Vec<double>& u, const Vec<double>& q) { return bilinear(G, u, q); };
    Vec<double> jy = matvec(J, y), jz = matvec(J, z), jw = matvec(J, w);
    return c / 4.0 *
           (ip(x, z) * ip(y, w) - ip(x, w) * ip(y, z) + ip(x, jz) * ip(y, jw) - ip(x, jw) * ip(y, jz) +
            2.0 * ip(x, jy) * ip(z, jw));
}

PseudoEinstein pseudo_einstein_check(const Structure& S, const std::vector<Vec<double>>& points, double tol,
                                     const DiffConfig& cfg) {
    PseudoEinstein out;
    std::vector<double> lam;
    std::vector<CMat<double>> mats;
    for (const Vec<double>& p : points) {
        CurvatureData R = curvature_components(S, p, cfg);
        const int m = R.m;
        double t = 0.0;
        for (int a = 0; a < m; ++a) t += R.ric_b(a, a).re;
        lam.push_back(t / m);
        mats.push_back(R.ric_b);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) upd(out.asymmetry, R.ric_b(a, b) - R.ric_b_conj(b, a));
    }
    if (lam.empty()) return out;
    double mean = 0.0;
    for (double l : lam) mean += l;
    mean /= static_cast<double>(lam.size());
    for (double l : lam) out.variance += (l - mean) * (l - mean);
    out.variance /= static_cast<double>(lam.size());
    out.lambda = mean;
    for (const CMat<double>& M : mats)
        for (int a = 0; a < M.r; ++a)
            for (int b = 0; b < M.c; ++b) upd(out.residual, M(a, b) - C(a == b ? mean : 0.0));
    out.is_pseudo_einstein = out.residual <= tol && out.variance <= tol && out.asymmetry <= tol;
    return out;
}

double reconstruct_from_holomorphic(const std::function<double(const Vec<double>&)>& Q, const Mat<double>& J,
                                    const Vec<double>& X, const Vec<double>& Y, const Vec<double>& Z,
                                    const Vec<double>& W) {
    auto k = [&](const Vec<double>& x, const Vec<double>& y) {
        Vec<double> jy = matvec(J, y);
        return (3.0 * Q(x + jy) + 3.0 * Q(x - jy) - Q(x + y) - Q(x - y) - 4.0 * Q(x) - 4.0 * Q(y)) / 32.0;
    };
    auto D = [&](const Vec<double>& A, const Vec<double>& B) {
        return (k(X + A, Y + B) - k(X + A, Y - B) - k(X - A, Y + B) + k(X - A, Y - B)) / 4.0;
    };
    return (D(Z, W) - D(W, Z)) / 6.0;
}

}  // namespace crgeo
